#pragma once

// Dense layers with explicit forward/backward passes. Everything is double
// precision and single threaded so runs are reproducible to the bit on one
// machine. Sequences are row-major: one row per token.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tuplespec::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Param {
  std::string name;
  Matrix value;
  Matrix grad;
  Matrix adam_m;
  Matrix adam_v;

  void zero_grad() { grad.setZero(); }
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Owns every trainable tensor of a model. Layers hold raw pointers into the
// registry; the registry outlives them inside SpecModel.
class ParamRegistry {
 public:
  Param& create(const std::string& name, int rows, int cols);
  Param* find(const std::string& name);
  const std::vector<std::unique_ptr<Param>>& params() const { return params_; }

  void zero_grad();
  // One Adam update over all registered tensors; step counts from 1.
  void adam_step(const AdamConfig& cfg, int64_t step);
  int64_t count_scalars() const;

  void save_weights(std::ostream& out) const;
  void load_weights(std::istream& in);

 private:
  std::vector<std::unique_ptr<Param>> params_;
};

void init_normal(Param& p, std::mt19937_64& rng, double stddev);
void init_zeros(Param& p);
void init_ones(Param& p);

struct LinearCache {
  Matrix x;
};

class Linear {
 public:
  void init(ParamRegistry& reg, const std::string& name, int in, int out);
  Matrix forward(const Matrix& x, LinearCache& cache) const;
  // Accumulates parameter gradients, returns the input gradient.
  Matrix backward(const Matrix& dy, const LinearCache& cache) const;

  Param* w = nullptr;
  Param* b = nullptr;
};

struct LayerNormCache {
  Matrix xhat;
  Vector inv_std;
};

class LayerNorm {
 public:
  void init(ParamRegistry& reg, const std::string& name, int dim);
  Matrix forward(const Matrix& x, LayerNormCache& cache) const;
  Matrix backward(const Matrix& dy, const LayerNormCache& cache) const;

  Param* gamma = nullptr;
  Param* beta = nullptr;
  double eps = 1e-12;
};

Matrix gelu(const Matrix& x);
Matrix gelu_backward(const Matrix& dy, const Matrix& x);
Matrix relu(const Matrix& x);
Matrix relu_backward(const Matrix& dy, const Matrix& x);

// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& x);

struct AttentionCache {
  Matrix q, k, v;
  std::vector<Matrix> attn;  // one n-by-n matrix per head
  Matrix concat;
  LinearCache qc, kc, vc, oc;
};

class MultiHeadAttention {
 public:
  void init(ParamRegistry& reg, const std::string& name, int d_model, int heads);
  Matrix forward(const Matrix& x, AttentionCache& cache) const;
  Matrix backward(const Matrix& dy, const AttentionCache& cache) const;

  Linear wq, wk, wv, wo;
  int heads_ = 0;
  int d_model_ = 0;
};

struct FeedForwardCache {
  LinearCache c1, c2;
  Matrix pre_act;
};

class FeedForward {
 public:
  void init(ParamRegistry& reg, const std::string& name, int d_model, int d_ff);
  Matrix forward(const Matrix& x, FeedForwardCache& cache) const;
  Matrix backward(const Matrix& dy, const FeedForwardCache& cache) const;

  Linear w1, w2;
};

struct EncoderLayerCache {
  AttentionCache attn;
  LayerNormCache ln1;
  FeedForwardCache ffn;
  LayerNormCache ln2;
};

// Post-layer-norm transformer block: x = LN(x + attn(x)); x = LN(x + ffn(x)).
class EncoderLayer {
 public:
  void init(ParamRegistry& reg, const std::string& name, int d_model, int heads, int d_ff);
  Matrix forward(const Matrix& x, EncoderLayerCache& cache) const;
  Matrix backward(const Matrix& dy, const EncoderLayerCache& cache) const;

  MultiHeadAttention attn;
  LayerNorm ln1;
  FeedForward ffn;
  LayerNorm ln2;
};

struct AttnPoolCache {
  Matrix x;
  Vector weights;
};

// Single learned query over a token-state matrix; returns a weighted mean.
class AttentionPool {
 public:
  void init(ParamRegistry& reg, const std::string& name, int d_model);
  Vector forward(const Matrix& x, AttnPoolCache& cache) const;
  Matrix backward(const Vector& dy, const AttnPoolCache& cache) const;

  Param* query = nullptr;
};

}  // namespace tuplespec::nn
