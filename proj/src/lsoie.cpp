#include "tuplespec/lsoie.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "tuplespec/errors.hpp"
#include "tuplespec/log.hpp"
#include "tuplespec/util.hpp"

namespace tuplespec {

namespace {

struct ConllRow {
  int word_id = -1;
  std::string word;
  std::string pred;
  std::string sent_id;
  std::string label;
};

ConllRow parse_conll_row(const std::string& line, const std::string& context,
                         bool* warned_extra) {
  auto cols = util::split(line, '\t');
  if (cols.size() == 1) cols = util::split_ws(line);
  if (cols.size() < 8)
    throw DataError(context + ": expected 8 columns "
                    "(word_id word pred pred_id head_pred_id sent_id run_id label), got " +
                    std::to_string(cols.size()));
  if (cols.size() > 8 && !*warned_extra) {
    log::warn(context + ": ignoring extra columns beyond the 8 documented ones");
    *warned_extra = true;
  }
  ConllRow row;
  try {
    row.word_id = std::stoi(cols[0]);
  } catch (...) {
    throw DataError(context + ": word_id is not an integer: " + cols[0]);
  }
  row.word = cols[1];
  row.pred = cols[2];
  row.sent_id = cols[5];
  row.label = cols[7];
  return row;
}

struct RoleAccumulator {
  // Contiguous BIO runs per role, in encounter order.
  std::vector<Argument> args;
  std::string open_role;
  int open_begin = -1;
  int prev_index = -1;

  void close() {
    if (!open_role.empty()) {
      args.push_back(Argument{open_role, Span{open_begin, prev_index + 1}});
      open_role.clear();
    }
  }

  void feed(const std::string& role, bool begin, int index, const std::string& context) {
    if (begin) {
      close();
      open_role = role;
      open_begin = index;
    } else {
      if (open_role != role || index != prev_index + 1)
        throw DataError(context + ": continuation tag " + role +
                        "-I without a matching open span");
    }
    prev_index = index;
  }
};

RawTuple tuple_from_block(const std::vector<ConllRow>& rows, const std::string& context) {
  RawTuple tup;
  tup.relation_tokens = util::split_ws(rows.empty() ? std::string() : rows.front().pred);
  if (tup.relation_tokens.empty())
    throw DataError(context + ": empty predicate phrase");

  std::vector<int> relation_positions;
  RoleAccumulator roles;
  int open_p = -2;  // word_id of the previous P tag, -2 when no P run is open
  for (const auto& row : rows) {
    const std::string& label = row.label;
    if (label == "O" || label == "-" || label.empty()) {
      roles.close();
      open_p = -2;
      continue;
    }
    auto dash = label.rfind('-');
    if (dash == std::string::npos || dash + 1 >= label.size())
      throw DataError(context + ": malformed BIO label '" + label + "'");
    std::string role = label.substr(0, dash);
    std::string bi = label.substr(dash + 1);
    if (bi != "B" && bi != "I")
      throw DataError(context + ": malformed BIO label '" + label + "'");
    if (role == "P") {
      roles.close();
      if (bi == "I" && row.word_id != open_p + 1)
        throw DataError(context + ": continuation tag P-I without a matching open span");
      relation_positions.push_back(row.word_id);
      open_p = row.word_id;
    } else {
      roles.feed(role, bi == "B", row.word_id, context);
      open_p = -2;
    }
  }
  roles.close();
  tup.arguments = std::move(roles.args);

  if (relation_positions.empty())
    throw DataError(context + ": tuple has no P-tagged relation words");
  for (size_t i = 1; i < relation_positions.size(); ++i) {
    if (relation_positions[i] != relation_positions[i - 1] + 1)
      throw DataError(context + ": P-tagged relation span is not contiguous");
  }
  tup.relation_span = Span{relation_positions.front(), relation_positions.back() + 1};
  return tup;
}

std::vector<SentenceRecord> load_conll(const std::filesystem::path& path, Subset subset) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open LSOIE file: " + path.string());

  std::vector<SentenceRecord> records;
  SentenceRecord* current = nullptr;
  std::string current_sent_key;

  std::vector<ConllRow> block;
  int64_t block_start_line = 1;
  std::string line;
  int64_t lineno = 0;
  bool warned_extra = false;

  auto flush_block = [&]() {
    if (block.empty()) return;
    const std::string context = path.string() + ":" + std::to_string(block_start_line);
    std::vector<std::string> tokens(block.size());
    for (const auto& row : block) {
      if (row.word_id < 0 || row.word_id >= static_cast<int>(block.size()))
        throw DataError(context + ": word_id " + std::to_string(row.word_id) +
                        " out of range for a " + std::to_string(block.size()) + "-token block");
      tokens[static_cast<size_t>(row.word_id)] = row.word;
    }
    const std::string& sent_key = block.front().sent_id;
    if (!current || sent_key != current_sent_key) {
      records.emplace_back();
      current = &records.back();
      current->sentence_id = subset_name(subset) + ":" + sent_key;
      current->subset = subset;
      current->tokens = tokens;
      current_sent_key = sent_key;
    } else if (tokens != current->tokens) {
      throw DataError(context + ": tokens disagree with an earlier block of sentence " +
                      sent_key);
    }
    RawTuple tup = tuple_from_block(block, context);
    if (tup.relation_span.end > static_cast<int>(current->tokens.size()))
      throw DataError(context + ": relation span exceeds sentence length");
    for (const auto& arg : tup.arguments) {
      if (arg.span.end > static_cast<int>(current->tokens.size()))
        throw DataError(context + ": argument span exceeds sentence length");
    }
    current->tuples.push_back(std::move(tup));
    block.clear();
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush_block();
      continue;
    }
    if (line[0] == '#') continue;
    if (block.empty()) block_start_line = lineno;
    block.push_back(parse_conll_row(line, path.string() + ":" + std::to_string(lineno),
                                    &warned_extra));
  }
  flush_block();
  return records;
}

std::vector<SentenceRecord> load_jsonl(const std::filesystem::path& path, Subset subset) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open LSOIE file: " + path.string());
  std::vector<SentenceRecord> records;
  std::string line;
  int64_t lineno = 0;
  bool warned_unknown = false;
  static const std::set<std::string> known_sentence = {"sentence_id", "tokens", "tuples"};
  static const std::set<std::string> known_tuple = {"relation_tokens", "relation_span",
                                                    "arguments"};
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string context = path.string() + ":" + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(context + ": invalid JSON: " + e.what());
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!known_sentence.count(it.key()) && !warned_unknown) {
        log::warn(context + ": ignoring unknown field '" + it.key() + "'");
        warned_unknown = true;
      }
    }
    try {
      SentenceRecord rec;
      rec.subset = subset;
      rec.sentence_id = subset_name(subset) + ":" + j.at("sentence_id").get<std::string>();
      rec.tokens = j.at("tokens").get<std::vector<std::string>>();
      if (rec.tokens.empty()) throw DataError(context + ": tokens must be non-empty");
      for (const auto& tj : j.at("tuples")) {
        for (auto it = tj.begin(); it != tj.end(); ++it) {
          if (!known_tuple.count(it.key()) && !warned_unknown) {
            log::warn(context + ": ignoring unknown tuple field '" + it.key() + "'");
            warned_unknown = true;
          }
        }
        RawTuple tup;
        tup.relation_tokens = tj.at("relation_tokens").get<std::vector<std::string>>();
        if (tup.relation_tokens.empty())
          throw DataError(context + ": relation_tokens must be non-empty");
        auto rs = tj.at("relation_span");
        tup.relation_span = Span{rs.at(0).get<int>(), rs.at(1).get<int>()};
        if (tup.relation_span.begin < 0 ||
            tup.relation_span.end > static_cast<int>(rec.tokens.size()))
          throw DataError(context + ": relation span out of range");
        for (const auto& aj : tj.at("arguments")) {
          Argument a;
          a.role = aj.at("role").get<std::string>();
          a.span = Span{aj.at("span").at(0).get<int>(), aj.at("span").at(1).get<int>()};
          if (a.span.begin < 0 || a.span.end > static_cast<int>(rec.tokens.size()))
            throw DataError(context + ": argument span out of range");
          tup.arguments.push_back(std::move(a));
        }
        rec.tuples.push_back(std::move(tup));
      }
      records.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(context + ": " + e.what());
    }
  }
  return records;
}

}  // namespace

std::vector<SentenceRecord> load_lsoie(const std::filesystem::path& path, Subset subset) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw DataError("cannot open LSOIE file: " + path.string());
  char c = 0;
  bool json = false;
  while (probe.get(c)) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    json = (c == '{');
    break;
  }
  auto records = json ? load_jsonl(path, subset) : load_conll(path, subset);
  for (const auto& rec : records) {
    if (rec.tokens.empty())
      throw DataError(path.string() + ": sentence " + rec.sentence_id + " has no tokens");
  }
  return records;
}

LsoieDirLayout discover_lsoie_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw DataError("LSOIE directory not found: " + dir.string());
  LsoieDirLayout layout;
  auto assign = [&](const std::filesystem::path& p) {
    std::string name = util::lower_ascii(p.filename().string());
    bool wiki = name.find("wiki") != std::string::npos;
    bool sci = name.find("sci") != std::string::npos;
    bool train = name.find("train") != std::string::npos;
    bool test = name.find("test") != std::string::npos;
    if (wiki == sci || train == test) return;
    std::filesystem::path& slot = wiki ? (train ? layout.wiki_train : layout.wiki_test)
                                       : (train ? layout.sci_train : layout.sci_test);
    if (!slot.empty())
      throw DataError("multiple candidate files for one LSOIE subset: " + slot.string() +
                      " and " + p.string());
    slot = p;
  };
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    if (ext == ".conll" || ext == ".jsonl" || ext == ".json" || ext == ".txt")
      assign(entry.path());
  }
  for (const auto& [slot, name] :
       {std::pair{&layout.wiki_train, "wiki_train"}, {&layout.wiki_test, "wiki_test"},
        {&layout.sci_train, "sci_train"}, {&layout.sci_test, "sci_test"}}) {
    if (slot->empty())
      throw DataError("no LSOIE file found for subset " + std::string(name) + " under " +
                      dir.string());
  }
  return layout;
}

std::vector<SentenceRecord> load_lsoie_subset_files(const LsoieDirLayout& layout) {
  std::vector<SentenceRecord> all;
  auto append = [&](const std::filesystem::path& p, Subset s) {
    auto recs = load_lsoie(p, s);
    log::info("loaded " + std::to_string(recs.size()) + " sentences from " + p.string());
    all.insert(all.end(), std::make_move_iterator(recs.begin()),
               std::make_move_iterator(recs.end()));
  };
  append(layout.wiki_train, Subset::WikiTrain);
  append(layout.wiki_test, Subset::WikiTest);
  append(layout.sci_train, Subset::SciTrain);
  append(layout.sci_test, Subset::SciTest);
  return all;
}

}  // namespace tuplespec
