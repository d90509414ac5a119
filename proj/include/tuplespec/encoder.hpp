#pragma once

// Bidirectional transformer encoder over externally built input embeddings.
// The caller supplies one embedding row per piece; the encoder adds position
// embeddings, applies the input layer norm and the stack of post-LN blocks.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tuplespec/nn.hpp"

namespace tuplespec {

struct EncoderConfig {
  int d_model = 768;
  int layers = 12;
  int heads = 12;
  int d_ff = 3072;
  int vocab_size = 30522;
  int max_len = 512;
  std::string tokenizer = "wordpiece";  // "wordpiece" or "hash"
};

// Where encoder weights come from: a converted pretrained checkpoint
// directory, or random initialization from a "scratch:..." spec string.
struct EncoderSpec {
  std::string id;  // verbatim config string
  std::optional<std::filesystem::path> pretrained_dir;
  EncoderConfig config;  // authoritative once resolved
};

// Accepts either a directory path (pretrained checkpoint) or
// "scratch:dh=64,layers=2,heads=2,dff=128,vocab=1000,max_len=64".
EncoderSpec resolve_encoder_spec(const std::string& encoder_id);

// A converted checkpoint directory holds encoder.json (config + tensor
// index), vocab.txt (WordPiece vocabulary) and weights.bin (row-major raw
// doubles, tensors in index order).
struct PretrainedTensors {
  EncoderConfig config;
  std::map<std::string, nn::Matrix> tensors;
  std::filesystem::path vocab_file;
};

PretrainedTensors load_pretrained_encoder(const std::filesystem::path& dir);

struct EncoderCache {
  nn::LayerNormCache input_ln;
  std::vector<nn::EncoderLayerCache> layers;
};

class TransformerEncoder {
 public:
  // Registers all parameters under "enc." in reg, zero-valued.
  TransformerEncoder(nn::ParamRegistry& reg, const EncoderConfig& cfg);

  void init_random(std::mt19937_64& rng);
  // Fills parameters from a converted checkpoint's tensor map; every encoder
  // tensor must be present with matching shape.
  void load_tensors(const PretrainedTensors& pretrained);

  nn::Matrix forward(const nn::Matrix& input_embeddings, EncoderCache& cache) const;
  // Returns the gradient w.r.t. the input embeddings.
  nn::Matrix backward(const nn::Matrix& d_output, const EncoderCache& cache) const;

  const EncoderConfig& config() const { return cfg_; }

 private:
  EncoderConfig cfg_;
  nn::Param* pos_ = nullptr;
  nn::LayerNorm input_ln_;
  std::vector<nn::EncoderLayer> layers_;
};

}  // namespace tuplespec
