#include "tuplespec/encoder.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "tuplespec/errors.hpp"
#include "tuplespec/util.hpp"

namespace tuplespec {

namespace {

EncoderConfig config_from_json(const nlohmann::json& j, const std::string& context) {
  EncoderConfig cfg;
  cfg.d_model = j.at("d_model").get<int>();
  cfg.layers = j.at("layers").get<int>();
  cfg.heads = j.at("heads").get<int>();
  cfg.d_ff = j.at("d_ff").get<int>();
  cfg.vocab_size = j.at("vocab_size").get<int>();
  cfg.max_len = j.at("max_len").get<int>();
  cfg.tokenizer = j.value("tokenizer", std::string("wordpiece"));
  if (cfg.d_model <= 0 || cfg.layers <= 0 || cfg.heads <= 0 || cfg.d_ff <= 0 ||
      cfg.vocab_size <= 0 || cfg.max_len <= 0)
    throw ConfigError(context + ": encoder dimensions must be positive");
  if (cfg.d_model % cfg.heads != 0)
    throw ConfigError(context + ": d_model must be divisible by the head count");
  return cfg;
}

}  // namespace

EncoderSpec resolve_encoder_spec(const std::string& encoder_id) {
  EncoderSpec spec;
  spec.id = encoder_id;
  if (encoder_id.rfind("scratch:", 0) == 0) {
    nlohmann::json j;
    for (const auto& kv : util::split(encoder_id.substr(8), ',')) {
      auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw ConfigError("bad scratch encoder field '" + kv + "' (expected key=value)");
      std::string key = kv.substr(0, eq);
      std::string val = kv.substr(eq + 1);
      if (key == "dh") key = "d_model";
      else if (key == "dff") key = "d_ff";
      else if (key != "layers" && key != "heads" && key != "vocab" && key != "max_len")
        throw ConfigError("unknown scratch encoder key '" + key + "'");
      if (key == "vocab") key = "vocab_size";
      try {
        j[key] = std::stoi(val);
      } catch (const std::exception&) {
        throw ConfigError("scratch encoder value for " + key + " is not an integer: " + val);
      }
    }
    for (const char* req : {"d_model", "layers", "heads", "d_ff", "vocab_size", "max_len"})
      if (!j.contains(req))
        throw ConfigError(std::string("scratch encoder spec is missing ") + req);
    j["tokenizer"] = "hash";
    spec.config = config_from_json(j, encoder_id);
    return spec;
  }

  std::filesystem::path dir(encoder_id);
  if (!std::filesystem::is_directory(dir))
    throw ConfigError("encoder '" + encoder_id +
                      "' is neither a checkpoint directory nor a scratch: spec");
  std::ifstream in(dir / "encoder.json");
  if (!in) throw DataError("missing encoder.json in " + dir.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(dir.string() + "/encoder.json: " + e.what());
  }
  spec.pretrained_dir = dir;
  spec.config = config_from_json(j, dir.string());
  return spec;
}

PretrainedTensors load_pretrained_encoder(const std::filesystem::path& dir) {
  std::ifstream jin(dir / "encoder.json");
  if (!jin) throw DataError("missing encoder.json in " + dir.string());
  nlohmann::json j;
  try {
    jin >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(dir.string() + "/encoder.json: " + e.what());
  }

  PretrainedTensors out;
  out.config = config_from_json(j, dir.string());
  if (out.config.tokenizer == "wordpiece") {
    out.vocab_file = dir / "vocab.txt";
    if (!std::filesystem::exists(out.vocab_file))
      throw DataError("missing vocab.txt in " + dir.string());
  }

  std::ifstream win(dir / "weights.bin", std::ios::binary);
  if (!win) throw DataError("missing weights.bin in " + dir.string());
  for (const auto& tj : j.at("tensors")) {
    std::string name = tj.at("name").get<std::string>();
    int rows = tj.at("rows").get<int>();
    int cols = tj.at("cols").get<int>();
    if (rows <= 0 || cols <= 0)
      throw DataError(dir.string() + ": tensor " + name + " has a non-positive shape");
    std::vector<double> buf(static_cast<size_t>(rows) * static_cast<size_t>(cols));
    win.read(reinterpret_cast<char*>(buf.data()),
             static_cast<std::streamsize>(buf.size() * sizeof(double)));
    if (!win) throw DataError(dir.string() + ": weights.bin truncated at tensor " + name);
    using RowMajor =
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    out.tensors[name] = Eigen::Map<RowMajor>(buf.data(), rows, cols);
  }
  char probe;
  if (win.read(&probe, 1))
    throw DataError(dir.string() + ": weights.bin has trailing bytes beyond the tensor index");
  return out;
}

TransformerEncoder::TransformerEncoder(nn::ParamRegistry& reg, const EncoderConfig& cfg)
    : cfg_(cfg) {
  pos_ = &reg.create("enc.pos", cfg.max_len, cfg.d_model);
  input_ln_.init(reg, "enc.ln", cfg.d_model);
  layers_.resize(static_cast<size_t>(cfg.layers));
  for (int i = 0; i < cfg.layers; ++i)
    layers_[static_cast<size_t>(i)].init(reg, "enc.layer" + std::to_string(i), cfg.d_model,
                                         cfg.heads, cfg.d_ff);
}

void TransformerEncoder::init_random(std::mt19937_64& rng) {
  nn::init_normal(*pos_, rng, 0.02);
  for (auto& layer : layers_) {
    nn::init_normal(*layer.attn.wq.w, rng, 0.02);
    nn::init_normal(*layer.attn.wk.w, rng, 0.02);
    nn::init_normal(*layer.attn.wv.w, rng, 0.02);
    nn::init_normal(*layer.attn.wo.w, rng, 0.02);
    nn::init_normal(*layer.ffn.w1.w, rng, 0.02);
    nn::init_normal(*layer.ffn.w2.w, rng, 0.02);
  }
}

void TransformerEncoder::load_tensors(const PretrainedTensors& pretrained) {
  auto take = [&](const std::string& name, nn::Param* dst) {
    auto it = pretrained.tensors.find(name);
    if (it == pretrained.tensors.end())
      throw DataError("encoder checkpoint lacks tensor " + name);
    if (it->second.rows() != dst->value.rows() || it->second.cols() != dst->value.cols())
      throw DataError("encoder tensor " + name + " has shape " +
                      std::to_string(it->second.rows()) + "x" +
                      std::to_string(it->second.cols()) + ", expected " +
                      std::to_string(dst->value.rows()) + "x" +
                      std::to_string(dst->value.cols()));
    dst->value = it->second;
  };
  take("embeddings.position", pos_);
  take("embeddings.ln.gamma", input_ln_.gamma);
  take("embeddings.ln.beta", input_ln_.beta);
  for (size_t i = 0; i < layers_.size(); ++i) {
    std::string p = "layer" + std::to_string(i) + ".";
    auto& l = layers_[i];
    take(p + "attn.wq", l.attn.wq.w);
    take(p + "attn.bq", l.attn.wq.b);
    take(p + "attn.wk", l.attn.wk.w);
    take(p + "attn.bk", l.attn.wk.b);
    take(p + "attn.wv", l.attn.wv.w);
    take(p + "attn.bv", l.attn.wv.b);
    take(p + "attn.wo", l.attn.wo.w);
    take(p + "attn.bo", l.attn.wo.b);
    take(p + "attn.ln.gamma", l.ln1.gamma);
    take(p + "attn.ln.beta", l.ln1.beta);
    take(p + "ffn.w1", l.ffn.w1.w);
    take(p + "ffn.b1", l.ffn.w1.b);
    take(p + "ffn.w2", l.ffn.w2.w);
    take(p + "ffn.b2", l.ffn.w2.b);
    take(p + "ffn.ln.gamma", l.ln2.gamma);
    take(p + "ffn.ln.beta", l.ln2.beta);
  }
}

nn::Matrix TransformerEncoder::forward(const nn::Matrix& input_embeddings,
                                       EncoderCache& cache) const {
  const Eigen::Index n = input_embeddings.rows();
  if (n == 0) throw RuntimeFailure("encoder got an empty sequence");
  if (n > cfg_.max_len)
    throw RuntimeFailure("sequence of " + std::to_string(n) +
                         " pieces exceeds the encoder limit of " + std::to_string(cfg_.max_len));
  nn::Matrix x = input_embeddings + pos_->value.topRows(n);
  x = input_ln_.forward(x, cache.input_ln);
  cache.layers.resize(layers_.size());
  for (size_t i = 0; i < layers_.size(); ++i) x = layers_[i].forward(x, cache.layers[i]);
  return x;
}

nn::Matrix TransformerEncoder::backward(const nn::Matrix& d_output,
                                        const EncoderCache& cache) const {
  nn::Matrix d = d_output;
  for (size_t i = layers_.size(); i-- > 0;) d = layers_[i].backward(d, cache.layers[i]);
  d = input_ln_.backward(d, cache.input_ln);
  pos_->grad.topRows(d.rows()) += d;
  return d;
}

}  // namespace tuplespec
