#include "tuplespec/nn.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "tuplespec/errors.hpp"

namespace tuplespec::nn {

Param& ParamRegistry::create(const std::string& name, int rows, int cols) {
  if (find(name)) throw RuntimeFailure("duplicate parameter name: " + name);
  auto p = std::make_unique<Param>();
  p->name = name;
  p->value = Matrix::Zero(rows, cols);
  p->grad = Matrix::Zero(rows, cols);
  p->adam_m = Matrix::Zero(rows, cols);
  p->adam_v = Matrix::Zero(rows, cols);
  params_.push_back(std::move(p));
  return *params_.back();
}

Param* ParamRegistry::find(const std::string& name) {
  for (auto& p : params_)
    if (p->name == name) return p.get();
  return nullptr;
}

void ParamRegistry::zero_grad() {
  for (auto& p : params_) p->zero_grad();
}

void ParamRegistry::adam_step(const AdamConfig& cfg, int64_t step) {
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
  for (auto& p : params_) {
    p->adam_m = cfg.beta1 * p->adam_m + (1.0 - cfg.beta1) * p->grad;
    p->adam_v = cfg.beta2 * p->adam_v + (1.0 - cfg.beta2) * p->grad.cwiseProduct(p->grad);
    Matrix mhat = p->adam_m / bc1;
    Matrix vhat = p->adam_v / bc2;
    p->value -= cfg.lr * (mhat.array() / (vhat.array().sqrt() + cfg.eps)).matrix();
  }
}

int64_t ParamRegistry::count_scalars() const {
  int64_t n = 0;
  for (const auto& p : params_) n += static_cast<int64_t>(p->value.size());
  return n;
}

void ParamRegistry::save_weights(std::ostream& out) const {
  for (const auto& p : params_) {
    out.write(reinterpret_cast<const char*>(p->value.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(p->value.size())));
  }
  if (!out) throw RuntimeFailure("weight serialization failed");
}

void ParamRegistry::load_weights(std::istream& in) {
  for (auto& p : params_) {
    in.read(reinterpret_cast<char*>(p->value.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(p->value.size())));
    if (!in) throw DataError("weight file is shorter than the registered parameters");
  }
  // Trailing bytes mean the file was produced by a different configuration.
  char probe;
  if (in.read(&probe, 1))
    throw DataError("weight file is longer than the registered parameters");
}

void init_normal(Param& p, std::mt19937_64& rng, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  double* data = p.value.data();
  for (Eigen::Index i = 0; i < p.value.size(); ++i) data[i] = dist(rng);
}

void init_zeros(Param& p) { p.value.setZero(); }

void init_ones(Param& p) { p.value.setOnes(); }

void Linear::init(ParamRegistry& reg, const std::string& name, int in, int out) {
  w = &reg.create(name + ".w", in, out);
  b = &reg.create(name + ".b", 1, out);
}

Matrix Linear::forward(const Matrix& x, LinearCache& cache) const {
  cache.x = x;
  return (x * w->value).rowwise() + b->value.row(0);
}

Matrix Linear::backward(const Matrix& dy, const LinearCache& cache) const {
  w->grad += cache.x.transpose() * dy;
  b->grad.row(0) += dy.colwise().sum();
  return dy * w->value.transpose();
}

void LayerNorm::init(ParamRegistry& reg, const std::string& name, int dim) {
  gamma = &reg.create(name + ".gamma", 1, dim);
  beta = &reg.create(name + ".beta", 1, dim);
  init_ones(*gamma);
}

Matrix LayerNorm::forward(const Matrix& x, LayerNormCache& cache) const {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  cache.xhat.resize(n, d);
  cache.inv_std.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double mean = x.row(i).mean();
    Eigen::RowVectorXd centered = x.row(i).array() - mean;
    double var = centered.squaredNorm() / static_cast<double>(d);
    double inv = 1.0 / std::sqrt(var + eps);
    cache.inv_std(i) = inv;
    cache.xhat.row(i) = centered * inv;
  }
  Matrix out = (cache.xhat.array().rowwise() * gamma->value.row(0).array()).matrix();
  out.rowwise() += beta->value.row(0);
  return out;
}

Matrix LayerNorm::backward(const Matrix& dy, const LayerNormCache& cache) const {
  const Eigen::Index n = dy.rows();
  const Eigen::Index d = dy.cols();
  gamma->grad.row(0) += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  beta->grad.row(0) += dy.colwise().sum();

  Matrix dx(n, d);
  const double dd = static_cast<double>(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::RowVectorXd dxhat = dy.row(i).array() * gamma->value.row(0).array();
    double sum_dxhat = dxhat.sum();
    double sum_dxhat_xhat = (dxhat.array() * cache.xhat.row(i).array()).sum();
    dx.row(i) = (cache.inv_std(i) / dd) *
                (dd * dxhat.array() - sum_dxhat - cache.xhat.row(i).array() * sum_dxhat_xhat);
  }
  return dx;
}

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

Matrix gelu(const Matrix& x) {
  return x.unaryExpr([](double v) { return 0.5 * v * (1.0 + std::erf(v * kInvSqrt2)); });
}

Matrix gelu_backward(const Matrix& dy, const Matrix& x) {
  Matrix dgelu = x.unaryExpr([](double v) {
    double cdf = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
    double pdf = kInvSqrt2Pi * std::exp(-0.5 * v * v);
    return cdf + v * pdf;
  });
  return dy.cwiseProduct(dgelu);
}

Matrix relu(const Matrix& x) {
  return x.cwiseMax(0.0);
}

Matrix relu_backward(const Matrix& dy, const Matrix& x) {
  return dy.cwiseProduct(x.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
}

Matrix softmax_rows(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double mx = x.row(i).maxCoeff();
    Eigen::RowVectorXd e = (x.row(i).array() - mx).exp();
    out.row(i) = e / e.sum();
  }
  return out;
}

void MultiHeadAttention::init(ParamRegistry& reg, const std::string& name, int d_model,
                              int heads) {
  if (d_model % heads != 0)
    throw ConfigError("attention width " + std::to_string(d_model) +
                      " is not divisible by " + std::to_string(heads) + " heads");
  heads_ = heads;
  d_model_ = d_model;
  wq.init(reg, name + ".wq", d_model, d_model);
  wk.init(reg, name + ".wk", d_model, d_model);
  wv.init(reg, name + ".wv", d_model, d_model);
  wo.init(reg, name + ".wo", d_model, d_model);
}

Matrix MultiHeadAttention::forward(const Matrix& x, AttentionCache& cache) const {
  const Eigen::Index n = x.rows();
  const int dk = d_model_ / heads_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  cache.q = wq.forward(x, cache.qc);
  cache.k = wk.forward(x, cache.kc);
  cache.v = wv.forward(x, cache.vc);
  cache.attn.assign(static_cast<size_t>(heads_), Matrix());
  cache.concat.resize(n, d_model_);
  for (int h = 0; h < heads_; ++h) {
    auto qh = cache.q.middleCols(h * dk, dk);
    auto kh = cache.k.middleCols(h * dk, dk);
    auto vh = cache.v.middleCols(h * dk, dk);
    Matrix scores = qh * kh.transpose() * scale;
    cache.attn[static_cast<size_t>(h)] = softmax_rows(scores);
    cache.concat.middleCols(h * dk, dk) = cache.attn[static_cast<size_t>(h)] * vh;
  }
  return wo.forward(cache.concat, cache.oc);
}

Matrix MultiHeadAttention::backward(const Matrix& dy, const AttentionCache& cache) const {
  const Eigen::Index n = dy.rows();
  const int dk = d_model_ / heads_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  Matrix dconcat = wo.backward(dy, cache.oc);
  Matrix dq = Matrix::Zero(n, d_model_);
  Matrix dk_mat = Matrix::Zero(n, d_model_);
  Matrix dv = Matrix::Zero(n, d_model_);
  for (int h = 0; h < heads_; ++h) {
    const Matrix& a = cache.attn[static_cast<size_t>(h)];
    auto qh = cache.q.middleCols(h * dk, dk);
    auto kh = cache.k.middleCols(h * dk, dk);
    auto vh = cache.v.middleCols(h * dk, dk);
    Matrix dctx = dconcat.middleCols(h * dk, dk);

    Matrix da = dctx * vh.transpose();
    dv.middleCols(h * dk, dk) = a.transpose() * dctx;

    // Softmax Jacobian applied row by row: ds = a .* (da - rowsum(da .* a)).
    Matrix dscores(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double dot = (da.row(i).array() * a.row(i).array()).sum();
      dscores.row(i) = a.row(i).array() * (da.row(i).array() - dot);
    }
    dscores *= scale;
    dq.middleCols(h * dk, dk) = dscores * kh;
    dk_mat.middleCols(h * dk, dk) = dscores.transpose() * qh;
  }
  Matrix dx = wq.backward(dq, cache.qc);
  dx += wk.backward(dk_mat, cache.kc);
  dx += wv.backward(dv, cache.vc);
  return dx;
}

void FeedForward::init(ParamRegistry& reg, const std::string& name, int d_model, int d_ff) {
  w1.init(reg, name + ".w1", d_model, d_ff);
  w2.init(reg, name + ".w2", d_ff, d_model);
}

Matrix FeedForward::forward(const Matrix& x, FeedForwardCache& cache) const {
  cache.pre_act = w1.forward(x, cache.c1);
  return w2.forward(gelu(cache.pre_act), cache.c2);
}

Matrix FeedForward::backward(const Matrix& dy, const FeedForwardCache& cache) const {
  Matrix dhidden = w2.backward(dy, cache.c2);
  return w1.backward(gelu_backward(dhidden, cache.pre_act), cache.c1);
}

void EncoderLayer::init(ParamRegistry& reg, const std::string& name, int d_model, int heads,
                        int d_ff) {
  attn.init(reg, name + ".attn", d_model, heads);
  ln1.init(reg, name + ".ln1", d_model);
  ffn.init(reg, name + ".ffn", d_model, d_ff);
  ln2.init(reg, name + ".ln2", d_model);
}

Matrix EncoderLayer::forward(const Matrix& x, EncoderLayerCache& cache) const {
  Matrix a = ln1.forward(x + attn.forward(x, cache.attn), cache.ln1);
  return ln2.forward(a + ffn.forward(a, cache.ffn), cache.ln2);
}

Matrix EncoderLayer::backward(const Matrix& dy, const EncoderLayerCache& cache) const {
  Matrix da = ln2.backward(dy, cache.ln2);
  da += ffn.backward(da, cache.ffn);
  Matrix dx = ln1.backward(da, cache.ln1);
  dx += attn.backward(dx, cache.attn);
  return dx;
}

void AttentionPool::init(ParamRegistry& reg, const std::string& name, int d_model) {
  query = &reg.create(name + ".query", 1, d_model);
}

Vector AttentionPool::forward(const Matrix& x, AttnPoolCache& cache) const {
  cache.x = x;
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.cols()));
  Vector scores = x * query->value.row(0).transpose() * scale;
  double mx = scores.maxCoeff();
  Vector e = (scores.array() - mx).exp();
  cache.weights = e / e.sum();
  return x.transpose() * cache.weights;
}

Matrix AttentionPool::backward(const Vector& dy, const AttnPoolCache& cache) const {
  const double scale = 1.0 / std::sqrt(static_cast<double>(cache.x.cols()));

  // pooled = xᵀ w, so dx gets w_i · dy plus the path through the weights.
  Matrix dx = cache.weights * dy.transpose();

  Vector dw = cache.x * dy;
  double dot = dw.dot(cache.weights);
  Vector dscores = cache.weights.array() * (dw.array() - dot);
  dscores *= scale;

  query->grad.row(0) += (cache.x.transpose() * dscores).transpose();
  dx += dscores * query->value.row(0);
  return dx;
}

}  // namespace tuplespec::nn
