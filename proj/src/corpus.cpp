#include "tuplespec/corpus.hpp"

#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "tuplespec/errors.hpp"
#include "tuplespec/log.hpp"
#include "tuplespec/util.hpp"

namespace tuplespec {

using ordered_json = nlohmann::ordered_json;

std::pair<SpeculationType, std::vector<std::string>> extract_speculation_label(
    const std::vector<std::string>& relation_tokens) {
  if (relation_tokens.empty()) throw DataError("relation has no tokens");
  SpeculationType type = modal_from_surface(util::lower_ascii(relation_tokens.front()));
  if (type == SpeculationType::None) return {type, relation_tokens};
  if (relation_tokens.size() == 1)
    throw DataError("relation '" + relation_tokens.front() + "' has no content word");
  return {type, std::vector<std::string>(relation_tokens.begin() + 1, relation_tokens.end())};
}

namespace {

std::string token_key(const std::vector<std::string>& tokens) {
  // \x1f never occurs in corpus tokens, so joining is collision-free.
  return util::join(tokens, "\x1f");
}

}  // namespace

std::vector<SentenceRecord> deduplicate(const std::vector<SentenceRecord>& wiki,
                                        const std::vector<SentenceRecord>& sci) {
  std::unordered_set<std::string> wiki_keys;
  wiki_keys.reserve(wiki.size() * 2);
  for (const auto& rec : wiki) wiki_keys.insert(token_key(rec.tokens));

  std::vector<SentenceRecord> out;
  out.reserve(wiki.size() + sci.size());
  out.insert(out.end(), wiki.begin(), wiki.end());
  size_t dropped = 0;
  for (const auto& rec : sci) {
    if (wiki_keys.count(token_key(rec.tokens))) {
      ++dropped;
      continue;
    }
    out.push_back(rec);
  }
  if (dropped)
    log::info("deduplicate: dropped " + std::to_string(dropped) +
              " sci sentences repeated in wiki");
  return out;
}

std::vector<Instance> build_instances(const std::vector<SentenceRecord>& records) {
  std::vector<Instance> out;
  for (const auto& rec : records) {
    int tuple_index = 0;
    for (const auto& tup : rec.tuples) {
      Instance inst;
      inst.sentence_id = rec.sentence_id;
      inst.subset = rec.subset;
      inst.tokens = rec.tokens;
      inst.relation_span = tup.relation_span;
      inst.arguments = tup.arguments;
      inst.tuple_index = tuple_index++;
      try {
        auto [type, clean] = extract_speculation_label(tup.relation_tokens);
        inst.gold_type = type;
        inst.clean_relation_tokens = std::move(clean);
        if (type != SpeculationType::None) inst.modal = modal_surface(type);
      } catch (const DataError& e) {
        throw DataError("sentence " + rec.sentence_id + " tuple " +
                        std::to_string(inst.tuple_index) + ": " + e.what());
      }
      if (!inst.clean_relation_tokens.empty() &&
          modal_from_surface(util::lower_ascii(inst.clean_relation_tokens.front())) !=
              SpeculationType::None) {
        throw DataError("sentence " + rec.sentence_id + " tuple " +
                        std::to_string(inst.tuple_index) +
                        ": relation still begins with a modal after extraction: " +
                        inst.clean_relation_tokens.front());
      }
      inst.gold_binary = inst.gold_type != SpeculationType::None;
      out.push_back(std::move(inst));
    }
  }
  return out;
}

CorpusStats corpus_stats(const std::vector<Instance>& instances) {
  CorpusStats stats;
  std::unordered_set<std::string> seen_sentences;
  std::array<std::unordered_set<std::string>, 4> seen_by_subset;
  for (const auto& inst : instances) {
    auto& sub = stats.counts(inst.subset);
    sub.tuples += 1;
    stats.total.tuples += 1;
    if (inst.gold_binary) {
      sub.speculative += 1;
      stats.total.speculative += 1;
    }
    if (seen_by_subset[static_cast<size_t>(inst.subset)].insert(inst.sentence_id).second)
      sub.sentences += 1;
    if (seen_sentences.insert(inst.sentence_id).second) stats.total.sentences += 1;
  }
  return stats;
}

namespace {

ordered_json span_to_json(const Span& s) { return ordered_json::array({s.begin, s.end}); }

Span span_from_json(const nlohmann::json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw DataError(context + ": span must be a [begin, end) integer pair");
  return Span{j[0].get<int>(), j[1].get<int>()};
}

const std::unordered_set<std::string>& known_instance_fields() {
  static const std::unordered_set<std::string> known = {
      "sentence_id", "subset",    "tokens",    "relation_span", "clean_relation",
      "modal",       "arguments", "gold_type", "gold_binary",   "tuple_index"};
  return known;
}

Instance instance_from_parsed(const nlohmann::json& j, const std::string& context) {
  try {
    Instance inst;
    inst.sentence_id = j.at("sentence_id").get<std::string>();
    inst.subset = subset_from_name(j.at("subset").get<std::string>());
    inst.tokens = j.at("tokens").get<std::vector<std::string>>();
    inst.relation_span = span_from_json(j.at("relation_span"), context);
    inst.clean_relation_tokens = j.at("clean_relation").get<std::vector<std::string>>();
    if (!j.at("modal").is_null()) inst.modal = j.at("modal").get<std::string>();
    for (const auto& aj : j.at("arguments")) {
      Argument a;
      a.role = aj.at("role").get<std::string>();
      a.span = span_from_json(aj.at("span"), context);
      inst.arguments.push_back(std::move(a));
    }
    inst.gold_type = speculation_type_from_name(j.at("gold_type").get<std::string>());
    inst.gold_binary = j.at("gold_binary").get<bool>();
    if (inst.gold_binary != (inst.gold_type != SpeculationType::None))
      throw DataError(context + ": gold_binary disagrees with gold_type");
    if (inst.tokens.empty()) throw DataError(context + ": tokens must be non-empty");
    if (j.contains("tuple_index")) inst.tuple_index = j.at("tuple_index").get<int>();
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(context + ": " + e.what());
  }
}

}  // namespace

std::string instance_to_jsonl(const Instance& inst) {
  ordered_json j;
  j["sentence_id"] = inst.sentence_id;
  j["subset"] = subset_name(inst.subset);
  j["tokens"] = inst.tokens;
  j["relation_span"] = span_to_json(inst.relation_span);
  j["clean_relation"] = inst.clean_relation_tokens;
  if (inst.modal)
    j["modal"] = *inst.modal;
  else
    j["modal"] = nullptr;
  ordered_json args = ordered_json::array();
  for (const auto& a : inst.arguments) {
    ordered_json aj;
    aj["role"] = a.role;
    aj["span"] = span_to_json(a.span);
    args.push_back(std::move(aj));
  }
  j["arguments"] = std::move(args);
  j["gold_type"] = speculation_type_name(inst.gold_type);
  j["gold_binary"] = inst.gold_binary;
  return j.dump();
}

void write_instances(const std::filesystem::path& path, const std::vector<Instance>& instances) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write instance file: " + path.string());
  for (const auto& inst : instances) out << instance_to_jsonl(inst) << "\n";
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<Instance> read_instances(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open instance file: " + path.string());
  std::vector<Instance> out;
  std::unordered_map<std::string, int> per_sentence;
  std::string line;
  int64_t lineno = 0;
  bool warned_unknown = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string context = path.string() + ":" + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(context + ": invalid JSON: " + e.what());
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!known_instance_fields().count(it.key()) && !warned_unknown) {
        log::warn(context + ": ignoring unknown field '" + it.key() + "'");
        warned_unknown = true;
      }
    }
    Instance inst = instance_from_parsed(j, context);
    inst.tuple_index = per_sentence[inst.sentence_id]++;
    out.push_back(std::move(inst));
  }
  return out;
}

Instance instance_from_jsonl(const std::string& line, const std::string& context) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(context + ": invalid JSON: " + e.what());
  }
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known_instance_fields().count(it.key()))
      log::warn(context + ": ignoring unknown field '" + it.key() + "'");
  return instance_from_parsed(j, context);
}

}  // namespace tuplespec
