#pragma once

// Sub-word tokenizers for the encoder. Corpus tokens are already split by the
// dataset, so a tokenizer only maps a single surface token to piece ids.

#include <filesystem>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace tuplespec {

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  // Piece ids for one corpus token; never empty (unknown words map to [UNK]).
  virtual std::vector<int> pieces(const std::string& token) const = 0;
  virtual int vocab_size() const = 0;
  virtual int cls_id() const = 0;
  virtual int sep_id() const = 0;
  virtual std::string describe() const = 0;
};

// Greedy longest-match-first WordPiece over a vocab.txt (one piece per line,
// id = line number, continuations prefixed "##"). Lowercases its input.
class WordPieceTokenizer : public Tokenizer {
 public:
  explicit WordPieceTokenizer(const std::filesystem::path& vocab_file);

  std::vector<int> pieces(const std::string& token) const override;
  int vocab_size() const override { return static_cast<int>(id_of_.size()); }
  int cls_id() const override { return cls_; }
  int sep_id() const override { return sep_; }
  std::string describe() const override;

 private:
  std::unordered_map<std::string, int> id_of_;
  int unk_ = -1;
  int cls_ = -1;
  int sep_ = -1;
  std::filesystem::path source_;
};

// Hashes each lowercased token into a fixed-size vocabulary. Stands in for a
// real sub-word vocabulary when training small encoders from scratch; ids 0-3
// are reserved for [PAD]/[CLS]/[SEP]/[UNK].
class HashTokenizer : public Tokenizer {
 public:
  explicit HashTokenizer(int vocab_size);

  std::vector<int> pieces(const std::string& token) const override;
  int vocab_size() const override { return vocab_; }
  int cls_id() const override { return 1; }
  int sep_id() const override { return 2; }
  std::string describe() const override;

 private:
  int vocab_;
};

}  // namespace tuplespec
