#include "tuplespec/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "tuplespec/errors.hpp"
#include "tuplespec/log.hpp"
#include "tuplespec/util.hpp"

namespace tuplespec {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::SemSentence: return "sem_sentence";
    case Variant::SemTuple: return "sem_tuple";
    case Variant::SemRelation: return "sem_relation";
    case Variant::SynSub: return "syn_sub";
    case Variant::SynFull: return "syn_full";
    case Variant::SemSentSynFull: return "sem_sent+syn_full";
    case Variant::SemRelSynFull: return "sem_rel+syn_full";
    case Variant::OieSpec: return "oie_spec";
  }
  throw RuntimeFailure("bad variant");
}

Variant variant_from_name(const std::string& name) {
  for (Variant v : {Variant::SemSentence, Variant::SemTuple, Variant::SemRelation,
                    Variant::SynSub, Variant::SynFull, Variant::SemSentSynFull,
                    Variant::SemRelSynFull, Variant::OieSpec}) {
    if (variant_name(v) == name) return v;
  }
  throw ConfigError("unknown variant '" + name + "'");
}

std::string mode_name(Mode m) { return m == Mode::Binary ? "binary" : "multiclass"; }

Mode mode_from_name(const std::string& name) {
  if (name == "binary") return Mode::Binary;
  if (name == "multiclass") return Mode::Multiclass;
  throw ConfigError("unknown mode '" + name + "' (expected binary or multiclass)");
}

bool variant_uses_sem(Variant v) {
  return v != Variant::SynSub && v != Variant::SynFull;
}

bool variant_uses_syn(Variant v) {
  return v == Variant::SynSub || v == Variant::SynFull || v == Variant::SemSentSynFull ||
         v == Variant::SemRelSynFull || v == Variant::OieSpec;
}

bool variant_pools_sentence(Variant v) {
  return v == Variant::SemSentence || v == Variant::SemSentSynFull;
}

bool variant_pools_tuple(Variant v) { return v == Variant::SemTuple; }

int EncodedExample::token_row(int corpus_token) const {
  auto it = std::lower_bound(kept_tokens.begin(), kept_tokens.end(), corpus_token);
  if (it == kept_tokens.end() || *it != corpus_token) return -1;
  return static_cast<int>(it - kept_tokens.begin());
}

void RelationGcn::init(nn::ParamRegistry& reg, const std::string& name, int d, int n_labels) {
  w_r = &reg.create(name + ".w_r", d, d);
  w_dep = &reg.create(name + ".w_dep", d, n_labels);
}

nn::Vector RelationGcn::forward(const std::vector<GcnNeighborRef>& neighbors,
                                const nn::Matrix& states, GcnCache& cache) const {
  const Eigen::Index d = w_r->value.rows();
  cache.neighbors = neighbors;
  cache.n_rows = states.rows();
  cache.h_u.clear();
  cache.phi.clear();
  cache.pre_act = nn::Vector::Zero(d);
  for (const auto& nb : neighbors) {
    nn::Vector h = states.row(nb.row).transpose();
    double phi = h.dot(w_dep->value.col(nb.label_index));
    cache.pre_act += phi * (w_r->value * h);
    cache.h_u.push_back(std::move(h));
    cache.phi.push_back(phi);
  }
  return cache.pre_act.cwiseMax(0.0);
}

nn::Matrix RelationGcn::backward(const nn::Vector& dy, const GcnCache& cache) const {
  const Eigen::Index d = w_r->value.rows();
  nn::Vector ds =
      dy.cwiseProduct(cache.pre_act.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
  nn::Matrix dstates = nn::Matrix::Zero(cache.n_rows, d);
  for (size_t i = 0; i < cache.neighbors.size(); ++i) {
    const auto& nb = cache.neighbors[i];
    const nn::Vector& h = cache.h_u[i];
    double phi = cache.phi[i];
    nn::Vector t = w_r->value * h;
    double dphi = ds.dot(t);
    w_r->grad += phi * (ds * h.transpose());
    w_dep->grad.col(nb.label_index) += dphi * h;
    dstates.row(nb.row) +=
        (phi * (w_r->value.transpose() * ds) + dphi * w_dep->value.col(nb.label_index))
            .transpose();
  }
  return dstates;
}

struct SpecModel::ForwardPass {
  const Instance* instance = nullptr;
  EncodedExample enc;
  nn::Matrix input;
  EncoderCache enc_cache;
  nn::Matrix piece_states;
  nn::Matrix token_states;
  std::vector<int> piece_count;

  bool used_pool = false;
  std::vector<int> pooled_rows;
  nn::AttnPoolCache pool_cache;

  bool used_relation = false;
  std::vector<int> rel_rows;  // singleton unless averaging over the span

  bool used_syn = false;
  GcnCache gcn_cache;

  nn::LinearCache head_cache;
  nn::Vector probs;
};

SpecModel::SpecModel(const ModelConfig& cfg, uint64_t seed)
    : SpecModel(cfg, resolve_encoder_spec(cfg.encoder_id).config, default_dep_labels()) {
  auto spec = resolve_encoder_spec(cfg.encoder_id);
  std::mt19937_64 rng(seed);
  nn::init_normal(*w_rel_, rng, 0.02);
  nn::init_normal(*pool_.query, rng, 0.02);
  nn::init_normal(*gcn_.w_r, rng, 0.02);
  nn::init_normal(*gcn_.w_dep, rng, 0.02);
  // Head stays zero so an untrained model is exactly uniform.
  if (spec.pretrained_dir) {
    auto pretrained = load_pretrained_encoder(*spec.pretrained_dir);
    encoder_->load_tensors(pretrained);
    auto it = pretrained.tensors.find("embeddings.word");
    if (it == pretrained.tensors.end())
      throw DataError("encoder checkpoint lacks tensor embeddings.word");
    if (it->second.rows() != w_word_->value.rows() || it->second.cols() != w_word_->value.cols())
      throw DataError("embeddings.word shape does not match the declared vocabulary");
    w_word_->value = it->second;
    vocab_file_ = pretrained.vocab_file;
    if (encoder_->config().tokenizer == "wordpiece")
      tokenizer_ = std::make_unique<WordPieceTokenizer>(vocab_file_);
  } else {
    nn::init_normal(*w_word_, rng, 0.02);
    encoder_->init_random(rng);
  }
  if (!tokenizer_) {
    if (encoder_->config().tokenizer == "hash")
      tokenizer_ = std::make_unique<HashTokenizer>(encoder_->config().vocab_size);
    else
      throw ConfigError("wordpiece tokenizer requires a checkpoint directory encoder");
  }
  log::info("model " + variant_name(cfg_.variant) + "/" + mode_name(cfg_.mode) + " with " +
            std::to_string(reg_.count_scalars()) + " parameters, tokenizer " +
            tokenizer_->describe());
}

SpecModel::SpecModel(const ModelConfig& cfg, const EncoderConfig& enc_cfg,
                     std::vector<std::string> dep_labels)
    : cfg_(cfg), dep_labels_(std::move(dep_labels)) {
  const int d = enc_cfg.d_model;
  w_word_ = &reg_.create("model.w_word", enc_cfg.vocab_size, d);
  w_rel_ = &reg_.create("model.w_rel", 2, d);
  encoder_ = std::make_unique<TransformerEncoder>(reg_, enc_cfg);
  pool_.init(reg_, "model.pool", d);
  gcn_.init(reg_, "model.gcn", d, static_cast<int>(dep_labels_.size()));
  head_.init(reg_, "model.head", head_input_width(), n_classes());
}

int SpecModel::head_input_width() const {
  int d = encoder_->config().d_model;
  return (variant_uses_sem(cfg_.variant) && variant_uses_syn(cfg_.variant)) ? 2 * d : d;
}

int SpecModel::effective_max_length() const {
  int limit = encoder_->config().max_len;
  if (cfg_.max_length > 0 && cfg_.max_length < limit) limit = cfg_.max_length;
  return limit;
}

int SpecModel::label_index(const std::string& label) const {
  for (size_t i = 0; i < dep_labels_.size(); ++i)
    if (dep_labels_[i] == label) return static_cast<int>(i);
  throw DataError("dependency label '" + label +
                  "' is not in the model's label vocabulary (" +
                  std::to_string(dep_labels_.size()) + " labels)");
}

int SpecModel::relation_head_token(const Instance& instance, const DependencyParse* parse) const {
  if (parse) return relation_head(instance, *parse);
  if (instance.relation_span.size() == 1) return instance.relation_span.begin;
  throw DataError("instance " + instance.id() +
                  " has a multi-token relation; a parse is required to locate its head");
}

EncodedExample SpecModel::encode_example(const Instance& instance) const {
  const auto& tokens = instance.tokens;
  const Span& span = instance.relation_span;
  if (span.empty() || span.begin < 0 || span.end > static_cast<int>(tokens.size()))
    throw DataError("instance " + instance.id() + " has a bad relation span");

  std::vector<std::vector<int>> pieces(tokens.size());
  std::vector<int> cost(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    pieces[i] = tokenizer_->pieces(tokens[i]);
    cost[i] = static_cast<int>(pieces[i].size());
  }

  const int budget = effective_max_length() - 2;  // [CLS] and [SEP]
  int lo = span.begin;
  int hi = span.end;
  int used = 0;
  for (int t = lo; t < hi; ++t) used += cost[static_cast<size_t>(t)];
  if (used > budget)
    throw DataError("instance " + instance.id() + ": relation span alone needs " +
                    std::to_string(used) + " pieces, over the encoder window of " +
                    std::to_string(budget));
  // Grow the window around the relation one token a side at a time; arguments
  // and context are dropped from the outside in, the relation never is.
  bool grew = true;
  while (grew) {
    grew = false;
    if (lo > 0 && used + cost[static_cast<size_t>(lo - 1)] <= budget) {
      --lo;
      used += cost[static_cast<size_t>(lo)];
      grew = true;
    }
    if (hi < static_cast<int>(tokens.size()) && used + cost[static_cast<size_t>(hi)] <= budget) {
      used += cost[static_cast<size_t>(hi)];
      ++hi;
      grew = true;
    }
  }

  EncodedExample enc;
  enc.truncated = lo != 0 || hi != static_cast<int>(tokens.size());
  if (enc.truncated)
    log::info("sentence " + instance.sentence_id + ": truncated to tokens [" +
              std::to_string(lo) + "," + std::to_string(hi) + ") of " +
              std::to_string(tokens.size()));
  enc.piece_ids.push_back(tokenizer_->cls_id());
  enc.piece_owner.push_back(-1);
  enc.piece_is_relation.push_back(false);
  for (int t = lo; t < hi; ++t) {
    enc.kept_tokens.push_back(t);
    bool in_rel = span.contains(t);
    for (int pid : pieces[static_cast<size_t>(t)]) {
      enc.piece_ids.push_back(pid);
      enc.piece_owner.push_back(t);
      enc.piece_is_relation.push_back(in_rel);
    }
  }
  enc.piece_ids.push_back(tokenizer_->sep_id());
  enc.piece_owner.push_back(-1);
  enc.piece_is_relation.push_back(false);
  return enc;
}

nn::Matrix SpecModel::build_input(const EncodedExample& enc) const {
  const int d = encoder_->config().d_model;
  nn::Matrix x(static_cast<Eigen::Index>(enc.piece_ids.size()), d);
  for (size_t i = 0; i < enc.piece_ids.size(); ++i) {
    int pid = enc.piece_ids[i];
    if (pid < 0 || pid >= encoder_->config().vocab_size)
      throw RuntimeFailure("piece id out of vocabulary range");
    x.row(static_cast<Eigen::Index>(i)) =
        w_word_->value.row(pid) + w_rel_->value.row(enc.piece_is_relation[i] ? 0 : 1);
  }
  return x;
}

void SpecModel::forward(const Instance& instance, const DependencyParse* parse,
                        ForwardPass& fp) const {
  const int d = encoder_->config().d_model;
  const bool uses_syn = variant_uses_syn(cfg_.variant);
  const bool uses_sem = variant_uses_sem(cfg_.variant);
  const bool pools = variant_pools_sentence(cfg_.variant) || variant_pools_tuple(cfg_.variant);

  if (uses_syn && !parse)
    throw DataError("variant " + variant_name(cfg_.variant) + " needs a dependency parse for " +
                    instance.id());

  fp.instance = &instance;
  fp.enc = encode_example(instance);
  fp.input = build_input(fp.enc);
  fp.piece_states = encoder_->forward(fp.input, fp.enc_cache);

  const int n_kept = static_cast<int>(fp.enc.kept_tokens.size());
  fp.token_states = nn::Matrix::Zero(n_kept, d);
  fp.piece_count.assign(static_cast<size_t>(n_kept), 0);
  for (size_t i = 0; i < fp.enc.piece_owner.size(); ++i) {
    int owner = fp.enc.piece_owner[i];
    if (owner < 0) continue;
    int row = fp.enc.token_row(owner);
    fp.token_states.row(row) += fp.piece_states.row(static_cast<Eigen::Index>(i));
    fp.piece_count[static_cast<size_t>(row)]++;
  }
  for (int r = 0; r < n_kept; ++r)
    fp.token_states.row(r) /= static_cast<double>(fp.piece_count[static_cast<size_t>(r)]);

  int head_token = -1;
  if (uses_syn || (uses_sem && !pools))
    head_token = relation_head_token(instance, parse);

  nn::Vector h_sem, h_syn;
  if (uses_sem) {
    if (pools) {
      fp.used_pool = true;
      if (variant_pools_sentence(cfg_.variant)) {
        fp.pooled_rows.resize(static_cast<size_t>(n_kept));
        std::iota(fp.pooled_rows.begin(), fp.pooled_rows.end(), 0);
      } else {
        std::set<int> rows;
        for (int t = instance.relation_span.begin; t < instance.relation_span.end; ++t) {
          int r = fp.enc.token_row(t);
          if (r >= 0) rows.insert(r);
        }
        for (const auto& arg : instance.arguments) {
          for (int t = arg.span.begin; t < arg.span.end; ++t) {
            int r = fp.enc.token_row(t);
            if (r >= 0) rows.insert(r);
          }
        }
        fp.pooled_rows.assign(rows.begin(), rows.end());
      }
      nn::Matrix pooled_input(static_cast<Eigen::Index>(fp.pooled_rows.size()), d);
      for (size_t i = 0; i < fp.pooled_rows.size(); ++i)
        pooled_input.row(static_cast<Eigen::Index>(i)) = fp.token_states.row(fp.pooled_rows[i]);
      h_sem = pool_.forward(pooled_input, fp.pool_cache);
    } else {
      fp.used_relation = true;
      if (cfg_.average_relation_span) {
        for (int t = instance.relation_span.begin; t < instance.relation_span.end; ++t) {
          int r = fp.enc.token_row(t);
          if (r >= 0) fp.rel_rows.push_back(r);
        }
      } else {
        fp.rel_rows.push_back(fp.enc.token_row(head_token));
      }
      h_sem = nn::Vector::Zero(d);
      for (int r : fp.rel_rows) h_sem += fp.token_states.row(r).transpose();
      h_sem /= static_cast<double>(fp.rel_rows.size());
    }
  }

  if (uses_syn) {
    fp.used_syn = true;
    Neighborhood neigh = extract_subgraph(*parse, head_token);
    std::vector<GcnNeighborRef> refs;
    for (const auto& edge : neigh.neighbors) {
      int row = fp.enc.token_row(edge.token);
      if (row < 0) {
        log::debug("sentence " + instance.sentence_id + ": neighbour token " +
                   std::to_string(edge.token) + " fell outside the encoder window");
        continue;
      }
      refs.push_back({row, label_index(edge.label)});
    }
    h_syn = gcn_.forward(refs, fp.token_states, fp.gcn_cache);
  }

  nn::Matrix h_final(1, head_input_width());
  if (uses_sem && uses_syn) {
    h_final.row(0).head(d) = h_sem.transpose();
    h_final.row(0).tail(d) = h_syn.transpose();
  } else if (uses_sem) {
    h_final.row(0) = h_sem.transpose();
  } else {
    h_final.row(0) = h_syn.transpose();
  }

  nn::Matrix logits = head_.forward(h_final, fp.head_cache);
  fp.probs = nn::softmax_rows(logits).row(0).transpose();
}

void SpecModel::backward(ForwardPass& fp, int gold, double scale) {
  const int d = encoder_->config().d_model;
  const int n_kept = static_cast<int>(fp.enc.kept_tokens.size());

  nn::Matrix dlogits(1, n_classes());
  dlogits.row(0) = fp.probs.transpose();
  dlogits(0, gold) -= 1.0;
  dlogits *= scale;

  nn::Matrix dh_final = head_.backward(dlogits, fp.head_cache);

  nn::Matrix d_tokens = nn::Matrix::Zero(n_kept, d);
  if (fp.used_pool || fp.used_relation) {
    nn::Vector d_sem = dh_final.row(0).head(d).transpose();
    if (fp.used_pool) {
      nn::Matrix d_subset = pool_.backward(d_sem, fp.pool_cache);
      for (size_t i = 0; i < fp.pooled_rows.size(); ++i)
        d_tokens.row(fp.pooled_rows[i]) += d_subset.row(static_cast<Eigen::Index>(i));
    } else {
      double inv = 1.0 / static_cast<double>(fp.rel_rows.size());
      for (int r : fp.rel_rows) d_tokens.row(r) += inv * d_sem.transpose();
    }
  }
  if (fp.used_syn) {
    nn::Vector d_syn = dh_final.row(0).tail(d).transpose();
    d_tokens += gcn_.backward(d_syn, fp.gcn_cache);
  }

  nn::Matrix d_pieces = nn::Matrix::Zero(fp.piece_states.rows(), d);
  for (size_t i = 0; i < fp.enc.piece_owner.size(); ++i) {
    int owner = fp.enc.piece_owner[i];
    if (owner < 0) continue;
    int row = fp.enc.token_row(owner);
    d_pieces.row(static_cast<Eigen::Index>(i)) =
        d_tokens.row(row) / static_cast<double>(fp.piece_count[static_cast<size_t>(row)]);
  }

  nn::Matrix d_input = encoder_->backward(d_pieces, fp.enc_cache);
  for (size_t i = 0; i < fp.enc.piece_ids.size(); ++i) {
    w_word_->grad.row(fp.enc.piece_ids[i]) += d_input.row(static_cast<Eigen::Index>(i));
    w_rel_->grad.row(fp.enc.piece_is_relation[i] ? 0 : 1) +=
        d_input.row(static_cast<Eigen::Index>(i));
  }
}

namespace {

int gold_class(const Instance& instance, Mode mode) {
  return mode == Mode::Binary ? instance.gold_binary : static_cast<int>(instance.gold_type);
}

int argmax_label(const nn::Vector& probs) {
  int best = 0;
  for (int i = 1; i < probs.size(); ++i)
    if (probs(i) > probs(best)) best = i;
  return best;
}

}  // namespace

Prediction SpecModel::classify(const Instance& instance, const DependencyParse* parse) const {
  ForwardPass fp;
  forward(instance, parse, fp);
  Prediction pred;
  pred.id = instance.id();
  pred.mode = cfg_.mode;
  pred.probs.assign(fp.probs.data(), fp.probs.data() + fp.probs.size());
  pred.label = argmax_label(fp.probs);
  return pred;
}

std::vector<Prediction> SpecModel::predict_batch(const std::vector<Instance>& instances,
                                                 const ParseMap* parses) const {
  if (variant_uses_syn(cfg_.variant) && !parses)
    throw ConfigError("variant " + variant_name(cfg_.variant) + " needs a parse cache");
  std::vector<Prediction> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) {
    const DependencyParse* parse = nullptr;
    if (parses) parse = &parse_for(*parses, inst);
    out.push_back(classify(inst, parse));
  }
  return out;
}

double SpecModel::loss_and_gradients(const Instance& instance, const DependencyParse* parse,
                                     double scale, int* predicted) {
  ForwardPass fp;
  forward(instance, parse, fp);
  int gold = gold_class(instance, cfg_.mode);
  if (gold < 0 || gold >= n_classes())
    throw RuntimeFailure("gold class " + std::to_string(gold) + " out of range for " +
                         mode_name(cfg_.mode));
  if (predicted) *predicted = argmax_label(fp.probs);
  double p = std::max(fp.probs(gold), 1e-300);
  backward(fp, gold, scale);
  return -std::log(p);
}

std::vector<EpochLog> SpecModel::train(const std::vector<Instance>& instances,
                                       const ParseMap* parses, const TrainConfig& tc) {
  if (instances.empty()) throw DataError("no training instances");
  if (variant_uses_syn(cfg_.variant) && !parses)
    throw ConfigError("variant " + variant_name(cfg_.variant) + " needs a parse cache");
  if (tc.epochs <= 0 || tc.batch_size <= 0 || tc.learning_rate <= 0.0)
    throw ConfigError("epochs, batch_size and learning_rate must be positive");

  std::vector<size_t> order(instances.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(tc.seed);

  nn::AdamConfig adam;
  adam.lr = tc.learning_rate;
  int64_t step = 0;
  std::vector<EpochLog> logs;

  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    int64_t correct = 0;

    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(tc.batch_size)) {
      size_t stop = std::min(order.size(), start + static_cast<size_t>(tc.batch_size));
      reg_.zero_grad();
      double batch_loss = 0.0;
      for (size_t k = start; k < stop; ++k) {
        const Instance& inst = instances[order[k]];
        const DependencyParse* parse = parses ? &parse_for(*parses, inst) : nullptr;
        double weight = 1.0;
        if (tc.class_weights)
          weight = (*tc.class_weights)[static_cast<size_t>(gold_class(inst, cfg_.mode))];
        int predicted = -1;
        double loss = loss_and_gradients(
            inst, parse, weight / static_cast<double>(stop - start), &predicted);
        if (!std::isfinite(loss))
          throw RuntimeFailure("non-finite loss at epoch " + std::to_string(epoch) +
                               ", instance " + inst.id());
        batch_loss += weight * loss;
        loss_sum += weight * loss;
        if (predicted == gold_class(inst, cfg_.mode)) ++correct;
      }
      if (!std::isfinite(batch_loss))
        throw RuntimeFailure("non-finite batch loss at epoch " + std::to_string(epoch));
      reg_.adam_step(adam, ++step);
    }

    auto t1 = std::chrono::steady_clock::now();
    EpochLog el;
    el.epoch = epoch;
    el.mean_loss = loss_sum / static_cast<double>(instances.size());
    el.train_accuracy = static_cast<double>(correct) / static_cast<double>(instances.size());
    el.seconds = std::chrono::duration<double>(t1 - t0).count();
    logs.push_back(el);
    log::info("epoch " + std::to_string(epoch) + ": loss " + std::to_string(el.mean_loss) +
              ", train acc " + std::to_string(el.train_accuracy) + ", " +
              std::to_string(el.seconds) + "s");
  }
  return logs;
}

void SpecModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json j;
  j["format"] = "tuplespec-model-v1";
  j["variant"] = variant_name(cfg_.variant);
  j["mode"] = mode_name(cfg_.mode);
  j["encoder_id"] = cfg_.encoder_id;
  j["max_length"] = cfg_.max_length;
  j["average_relation_span"] = cfg_.average_relation_span;
  const auto& ec = encoder_->config();
  j["encoder"] = {{"d_model", ec.d_model}, {"layers", ec.layers},       {"heads", ec.heads},
                  {"d_ff", ec.d_ff},       {"vocab_size", ec.vocab_size}, {"max_len", ec.max_len},
                  {"tokenizer", ec.tokenizer}};
  j["dep_labels"] = dep_labels_;
  auto tensors = nlohmann::ordered_json::array();
  for (const auto& p : reg_.params()) {
    tensors.push_back({{"name", p->name},
                       {"rows", static_cast<int>(p->value.rows())},
                       {"cols", static_cast<int>(p->value.cols())}});
  }
  j["tensors"] = std::move(tensors);
  util::write_file(dir / "model.json", j.dump(2) + "\n");

  std::ofstream out(dir / "weights.bin", std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot write " + (dir / "weights.bin").string());
  reg_.save_weights(out);

  if (ec.tokenizer == "wordpiece") {
    auto dst = dir / "vocab.txt";
    if (!std::filesystem::exists(dst) || !std::filesystem::equivalent(vocab_file_, dst))
      std::filesystem::copy_file(vocab_file_, dst,
                                 std::filesystem::copy_options::overwrite_existing);
  }
}

std::unique_ptr<SpecModel> SpecModel::load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "model.json");
  if (!in) throw DataError("missing model.json in " + dir.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(dir.string() + "/model.json: " + e.what());
  }
  if (j.value("format", "") != "tuplespec-model-v1")
    throw DataError(dir.string() + ": not a model checkpoint");

  ModelConfig cfg;
  cfg.variant = variant_from_name(j.at("variant").get<std::string>());
  cfg.mode = mode_from_name(j.at("mode").get<std::string>());
  cfg.encoder_id = j.at("encoder_id").get<std::string>();
  cfg.max_length = j.at("max_length").get<int>();
  cfg.average_relation_span = j.at("average_relation_span").get<bool>();

  EncoderConfig ec;
  const auto& ej = j.at("encoder");
  ec.d_model = ej.at("d_model").get<int>();
  ec.layers = ej.at("layers").get<int>();
  ec.heads = ej.at("heads").get<int>();
  ec.d_ff = ej.at("d_ff").get<int>();
  ec.vocab_size = ej.at("vocab_size").get<int>();
  ec.max_len = ej.at("max_len").get<int>();
  ec.tokenizer = ej.at("tokenizer").get<std::string>();

  auto labels = j.at("dep_labels").get<std::vector<std::string>>();
  std::unique_ptr<SpecModel> model(new SpecModel(cfg, ec, std::move(labels)));

  const auto& tensors = j.at("tensors");
  const auto& params = model->reg_.params();
  if (tensors.size() != params.size())
    throw DataError(dir.string() + ": checkpoint lists " + std::to_string(tensors.size()) +
                    " tensors, model has " + std::to_string(params.size()));
  for (size_t i = 0; i < params.size(); ++i) {
    const auto& tj = tensors[i];
    if (tj.at("name").get<std::string>() != params[i]->name ||
        tj.at("rows").get<int>() != params[i]->value.rows() ||
        tj.at("cols").get<int>() != params[i]->value.cols())
      throw DataError(dir.string() + ": tensor " + std::to_string(i) +
                      " does not match the model layout (" + params[i]->name + ")");
  }
  std::ifstream win(dir / "weights.bin", std::ios::binary);
  if (!win) throw DataError("missing weights.bin in " + dir.string());
  model->reg_.load_weights(win);

  if (ec.tokenizer == "wordpiece") {
    model->vocab_file_ = dir / "vocab.txt";
    model->tokenizer_ = std::make_unique<WordPieceTokenizer>(model->vocab_file_);
  } else {
    model->tokenizer_ = std::make_unique<HashTokenizer>(ec.vocab_size);
  }
  return model;
}

}  // namespace tuplespec
