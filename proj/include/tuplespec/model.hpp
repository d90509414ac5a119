#pragma once

// The tuple speculation classifier and its ablation variants. A model owns
// one parameter registry covering the token tables, the encoder, the pooling
// query, the graph layer and the classification head, so checkpoints are a
// single uniform tensor dump.

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tuplespec/depparse.hpp"
#include "tuplespec/encoder.hpp"
#include "tuplespec/nn.hpp"
#include "tuplespec/tokenizer.hpp"
#include "tuplespec/types.hpp"

namespace tuplespec {

enum class Variant {
  SemSentence,
  SemTuple,
  SemRelation,
  SynSub,
  SynFull,
  SemSentSynFull,
  SemRelSynFull,
  OieSpec,  // SEM_relation + SYN_sub
};

enum class Mode { Binary, Multiclass };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);
std::string mode_name(Mode m);
Mode mode_from_name(const std::string& name);

bool variant_uses_sem(Variant v);
bool variant_uses_syn(Variant v);
// Semantic side of the variant: pooling scope or relation head.
bool variant_pools_sentence(Variant v);
bool variant_pools_tuple(Variant v);

struct ModelConfig {
  Variant variant = Variant::OieSpec;
  Mode mode = Mode::Binary;
  std::string encoder_id;
  int max_length = 0;  // 0 keeps the encoder's own limit
  bool average_relation_span = false;
};

struct Prediction {
  std::string id;
  std::vector<double> probs;
  int label = 0;
  Mode mode = Mode::Binary;
};

// A corpus sentence mapped to encoder pieces, with the truncation window
// already applied. piece_owner[i] is the corpus token a piece belongs to
// (-1 for [CLS]/[SEP]).
struct EncodedExample {
  std::vector<int> piece_ids;
  std::vector<int> piece_owner;
  std::vector<bool> piece_is_relation;
  std::vector<int> kept_tokens;  // corpus token indices, ascending
  bool truncated = false;

  int token_row(int corpus_token) const;  // -1 when outside the window
};

struct GcnNeighborRef {
  int row;          // row into the token-state matrix
  int label_index;  // column of W_dep
};

struct GcnCache {
  std::vector<GcnNeighborRef> neighbors;
  std::vector<nn::Vector> h_u;
  std::vector<double> phi;
  nn::Vector pre_act;
  Eigen::Index n_rows = 0;
};

// One-hop relation-aware aggregation (strength = state dot label embedding,
// then a shared linear map, summed and rectified).
class RelationGcn {
 public:
  void init(nn::ParamRegistry& reg, const std::string& name, int d, int n_labels);
  nn::Vector forward(const std::vector<GcnNeighborRef>& neighbors, const nn::Matrix& states,
                     GcnCache& cache) const;
  // Returns the gradient w.r.t. the full token-state matrix.
  nn::Matrix backward(const nn::Vector& dy, const GcnCache& cache) const;

  nn::Param* w_r = nullptr;
  nn::Param* w_dep = nullptr;
};

struct TrainConfig {
  uint64_t seed = 42;
  int epochs = 3;
  int batch_size = 32;
  double learning_rate = 2e-5;
  std::optional<std::array<double, kNumSpeculationClasses>> class_weights;
};

struct EpochLog {
  int epoch = 0;
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
  double seconds = 0.0;
};

class SpecModel {
 public:
  // Fresh model: resolves the encoder id, loads pretrained tensors when the
  // id is a checkpoint directory, otherwise random-initializes from seed.
  SpecModel(const ModelConfig& cfg, uint64_t seed);

  static std::unique_ptr<SpecModel> load(const std::filesystem::path& dir);
  void save(const std::filesystem::path& dir) const;

  Prediction classify(const Instance& instance, const DependencyParse* parse) const;
  std::vector<Prediction> predict_batch(const std::vector<Instance>& instances,
                                        const ParseMap* parses) const;

  // Forward + backward for one instance; gradients are scaled by `scale` and
  // accumulated into the registry. Returns the (unscaled) loss and optionally
  // the argmax label of the forward pass.
  double loss_and_gradients(const Instance& instance, const DependencyParse* parse, double scale,
                            int* predicted = nullptr);

  std::vector<EpochLog> train(const std::vector<Instance>& instances, const ParseMap* parses,
                              const TrainConfig& tc);

  // Exposed for white-box tests.
  EncodedExample encode_example(const Instance& instance) const;
  nn::Matrix build_input(const EncodedExample& enc) const;
  int relation_head_token(const Instance& instance, const DependencyParse* parse) const;

  nn::ParamRegistry& params() { return reg_; }
  const nn::ParamRegistry& params() const { return reg_; }
  const ModelConfig& config() const { return cfg_; }
  const EncoderConfig& encoder_config() const { return encoder_->config(); }
  const std::vector<std::string>& dep_labels() const { return dep_labels_; }
  int n_classes() const { return cfg_.mode == Mode::Binary ? 2 : kNumSpeculationClasses; }
  int d_model() const { return encoder_->config().d_model; }
  int head_input_width() const;
  int effective_max_length() const;

  RelationGcn& gcn() { return gcn_; }

 private:
  struct ForwardPass;

  SpecModel(const ModelConfig& cfg, const EncoderConfig& enc_cfg,
            std::vector<std::string> dep_labels);
  void build_params();
  void forward(const Instance& instance, const DependencyParse* parse, ForwardPass& fp) const;
  void backward(ForwardPass& fp, int gold, double scale);
  int label_index(const std::string& label) const;

  ModelConfig cfg_;
  nn::ParamRegistry reg_;
  std::unique_ptr<TransformerEncoder> encoder_;
  std::unique_ptr<Tokenizer> tokenizer_;
  std::filesystem::path vocab_file_;
  std::vector<std::string> dep_labels_;

  nn::Param* w_word_ = nullptr;
  nn::Param* w_rel_ = nullptr;
  nn::AttentionPool pool_;
  RelationGcn gcn_;
  nn::Linear head_;
};

}  // namespace tuplespec
