#include "tuplespec/tokenizer.hpp"

#include <fstream>

#include "tuplespec/errors.hpp"
#include "tuplespec/util.hpp"

namespace tuplespec {

WordPieceTokenizer::WordPieceTokenizer(const std::filesystem::path& vocab_file)
    : source_(vocab_file) {
  std::ifstream in(vocab_file, std::ios::binary);
  if (!in) throw DataError("cannot open vocabulary: " + vocab_file.string());
  std::string line;
  int id = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    id_of_.emplace(line, id++);
  }
  auto require = [&](const char* piece) {
    auto it = id_of_.find(piece);
    if (it == id_of_.end())
      throw DataError(vocab_file.string() + ": vocabulary lacks " + piece);
    return it->second;
  };
  unk_ = require("[UNK]");
  cls_ = require("[CLS]");
  sep_ = require("[SEP]");
}

std::vector<int> WordPieceTokenizer::pieces(const std::string& token) const {
  std::string word = util::lower_ascii(token);
  if (word.empty() || word.size() > 100) return {unk_};

  std::vector<int> out;
  size_t start = 0;
  while (start < word.size()) {
    size_t end = word.size();
    int found = -1;
    while (end > start) {
      std::string sub = word.substr(start, end - start);
      if (start > 0) sub = "##" + sub;
      auto it = id_of_.find(sub);
      if (it != id_of_.end()) {
        found = it->second;
        break;
      }
      --end;
    }
    if (found < 0) return {unk_};
    out.push_back(found);
    start = end;
  }
  return out;
}

std::string WordPieceTokenizer::describe() const {
  return "wordpiece(" + source_.filename().string() + ", " + std::to_string(id_of_.size()) +
         " pieces)";
}

HashTokenizer::HashTokenizer(int vocab_size) : vocab_(vocab_size) {
  if (vocab_size < 16) throw ConfigError("hash tokenizer needs a vocabulary of at least 16");
}

std::vector<int> HashTokenizer::pieces(const std::string& token) const {
  uint64_t h = util::fnv1a64(util::lower_ascii(token));
  return {4 + static_cast<int>(h % static_cast<uint64_t>(vocab_ - 4))};
}

std::string HashTokenizer::describe() const {
  return "hash(" + std::to_string(vocab_) + ")";
}

}  // namespace tuplespec
