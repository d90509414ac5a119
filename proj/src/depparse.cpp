#include "tuplespec/depparse.hpp"

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "tuplespec/corpus.hpp"
#include "tuplespec/errors.hpp"
#include "tuplespec/log.hpp"
#include "tuplespec/util.hpp"

namespace tuplespec {

int DependencyParse::head_of(int token) const {
  for (const auto& arc : arcs) {
    if (arc.dep == token) return arc.head;
  }
  return -1;
}

void DependencyParse::validate(const std::string& context) const {
  if (n_tokens <= 0) throw DataError(context + ": parse has no tokens");
  if (static_cast<int>(arcs.size()) != n_tokens - 1)
    throw DataError(context + ": expected " + std::to_string(n_tokens - 1) + " arcs for " +
                    std::to_string(n_tokens) + " tokens, got " + std::to_string(arcs.size()));
  std::vector<int> head(static_cast<size_t>(n_tokens), -1);
  std::vector<bool> has_head(static_cast<size_t>(n_tokens), false);
  for (const auto& arc : arcs) {
    if (arc.head < 0 || arc.head >= n_tokens || arc.dep < 0 || arc.dep >= n_tokens)
      throw DataError(context + ": arc index out of range");
    if (arc.head == arc.dep) throw DataError(context + ": self-loop arc");
    if (has_head[static_cast<size_t>(arc.dep)])
      throw DataError(context + ": token " + std::to_string(arc.dep) + " has two heads");
    has_head[static_cast<size_t>(arc.dep)] = true;
    head[static_cast<size_t>(arc.dep)] = arc.head;
    if (arc.label.empty()) throw DataError(context + ": empty dependency label");
  }
  // Every token must reach the root without revisiting a node.
  for (int t = 0; t < n_tokens; ++t) {
    int cur = t;
    int steps = 0;
    while (cur != -1) {
      if (++steps > n_tokens) throw DataError(context + ": cycle in dependency arcs");
      cur = head[static_cast<size_t>(cur)];
    }
  }
}

int relation_head(const Instance& instance, const DependencyParse& parse) {
  const Span& span = instance.relation_span;
  if (span.empty()) throw DataError("instance " + instance.id() + " has an empty relation span");
  if (span.begin < 0 || span.end > parse.n_tokens)
    throw DataError("instance " + instance.id() + " relation span out of parse range");
  if (span.size() == 1) return span.begin;

  std::vector<int> candidates;
  for (int t = span.begin; t < span.end; ++t) {
    int h = parse.head_of(t);
    if (h == -1 || !span.contains(h)) candidates.push_back(t);
  }
  if (candidates.empty())
    throw DataError("instance " + instance.id() +
                    ": relation span has no syntactic head (cycle inside span)");
  if (candidates.size() > 1)
    log::info("instance " + instance.id() + ": " + std::to_string(candidates.size()) +
              " relation head candidates, taking the leftmost");
  return candidates.front();
}

Neighborhood extract_subgraph(const DependencyParse& parse, int center) {
  if (center < 0 || center >= parse.n_tokens)
    throw DataError("sub-graph center " + std::to_string(center) + " out of range");
  Neighborhood neigh;
  neigh.center = center;
  for (const auto& arc : parse.arcs) {
    if (arc.dep == center)
      neigh.neighbors.push_back({arc.head, arc.label, ArcDirection::HeadOfCenter});
    else if (arc.head == center)
      neigh.neighbors.push_back({arc.dep, arc.label, ArcDirection::DependentOfCenter});
  }
  return neigh;
}

const std::vector<std::string>& default_dep_labels() {
  static const std::vector<std::string> labels = {
      "ROOT",     "acl",      "acomp",    "advcl",     "advmod", "agent",    "amod",
      "appos",    "attr",     "aux",      "auxpass",   "case",   "cc",       "ccomp",
      "compound", "conj",     "csubj",    "csubjpass", "dative", "dep",      "det",
      "dobj",     "expl",     "intj",     "mark",      "meta",   "neg",      "nmod",
      "npadvmod", "nsubj",    "nsubjpass", "nummod",   "oprd",   "parataxis", "pcomp",
      "pobj",     "poss",     "preconj",  "predet",    "prep",   "prt",      "punct",
      "quantmod", "relcl",    "xcomp"};
  return labels;
}

void write_parse_cache(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, DependencyParse>>& parses) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write parse cache: " + path.string());
  for (const auto& [id, parse] : parses) {
    nlohmann::ordered_json j;
    j["sentence_id"] = id;
    j["n_tokens"] = parse.n_tokens;
    auto arcs = nlohmann::ordered_json::array();
    for (const auto& arc : parse.arcs)
      arcs.push_back(nlohmann::ordered_json::array({arc.head, arc.dep, arc.label}));
    j["arcs"] = std::move(arcs);
    out << j.dump() << "\n";
  }
  if (!out) throw DataError("write failed: " + path.string());
}

namespace {

std::pair<std::string, DependencyParse> parse_cache_record(const nlohmann::json& j,
                                                           const std::string& context,
                                                           bool require_n_tokens) {
  DependencyParse parse;
  std::string id = j.at("sentence_id").get<std::string>();
  int max_index = -1;
  for (const auto& aj : j.at("arcs")) {
    if (!aj.is_array() || aj.size() != 3)
      throw DataError(context + ": arc must be a [head, dep, label] triple");
    DependencyArc arc;
    arc.head = aj[0].get<int>();
    arc.dep = aj[1].get<int>();
    arc.label = aj[2].get<std::string>();
    max_index = std::max(max_index, std::max(arc.head, arc.dep));
    parse.arcs.push_back(std::move(arc));
  }
  if (j.contains("n_tokens"))
    parse.n_tokens = j.at("n_tokens").get<int>();
  else if (require_n_tokens)
    throw DataError(context + ": missing n_tokens");
  else
    parse.n_tokens = max_index + 1;
  parse.validate(context + " (sentence " + id + ")");
  return {std::move(id), std::move(parse)};
}

}  // namespace

std::pair<std::string, DependencyParse> parse_record_from_jsonl(const std::string& line,
                                                                const std::string& context) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(context + ": invalid JSON: " + e.what());
  }
  try {
    return parse_cache_record(j, context, false);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(context + ": " + e.what());
  }
}

ParseMap read_parse_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open parse cache: " + path.string());
  ParseMap map;
  std::string line;
  int64_t lineno = 0;
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
    try {
      auto [id, parse] = parse_cache_record(j, context, true);
      if (!map.emplace(id, std::move(parse)).second)
        throw DataError(context + ": duplicate parse for sentence " + id);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(context + ": " + e.what());
    }
  }
  return map;
}

const DependencyParse& parse_for(const ParseMap& parses, const Instance& instance) {
  auto it = parses.find(instance.sentence_id);
  if (it == parses.end())
    throw DataError("no parse for sentence " + instance.sentence_id);
  if (it->second.n_tokens != static_cast<int>(instance.tokens.size()))
    throw DataError("parse/token misalignment for sentence " + instance.sentence_id + ": parse has " +
                    std::to_string(it->second.n_tokens) + " tokens, instance has " +
                    std::to_string(instance.tokens.size()));
  return it->second;
}

namespace {

// Distinct sentences of an instance file, in first-appearance order.
std::vector<std::pair<std::string, std::vector<std::string>>> distinct_sentences(
    const std::filesystem::path& instances_path) {
  auto instances = read_instances(instances_path);
  std::vector<std::pair<std::string, std::vector<std::string>>> sentences;
  std::set<std::string> seen;
  for (const auto& inst : instances) {
    if (seen.insert(inst.sentence_id).second)
      sentences.emplace_back(inst.sentence_id, inst.tokens);
  }
  return sentences;
}

}  // namespace

ParseRunSummary run_external_parser(const std::filesystem::path& instances_path,
                                    const std::string& command,
                                    const std::filesystem::path& out_path) {
  if (command.empty()) throw ConfigError("external parser command is empty");
  auto sentences = distinct_sentences(instances_path);

  auto tmp_dir = std::filesystem::temp_directory_path();
  auto tag = std::to_string(static_cast<unsigned long>(::getpid()));
  auto in_path = tmp_dir / ("tuplespec_parse_in_" + tag + ".jsonl");
  auto raw_path = tmp_dir / ("tuplespec_parse_out_" + tag + ".jsonl");

  {
    std::ofstream out(in_path, std::ios::binary | std::ios::trunc);
    for (const auto& [id, tokens] : sentences) {
      nlohmann::ordered_json j;
      j["sentence_id"] = id;
      j["tokens"] = tokens;
      out << j.dump() << "\n";
    }
  }

  std::string shell = command + " < '" + in_path.string() + "' > '" + raw_path.string() + "'";
  log::info("running external parser: " + command);
  int rc = std::system(shell.c_str());
  std::filesystem::remove(in_path);
  if (rc != 0) {
    std::filesystem::remove(raw_path);
    throw RuntimeFailure("external parser command failed with status " + std::to_string(rc));
  }

  auto summary = import_parse_file(raw_path, instances_path, out_path);
  std::filesystem::remove(raw_path);
  return summary;
}

ParseRunSummary import_parse_file(const std::filesystem::path& arcs_path,
                                  const std::filesystem::path& instances_path,
                                  const std::filesystem::path& out_path) {
  auto sentences = distinct_sentences(instances_path);
  std::map<std::string, int> expected_tokens;
  for (const auto& [id, tokens] : sentences)
    expected_tokens[id] = static_cast<int>(tokens.size());

  std::ifstream in(arcs_path, std::ios::binary);
  if (!in) throw DataError("cannot open parse file: " + arcs_path.string());
  ParseMap parsed;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string context = arcs_path.string() + ":" + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(context + ": invalid JSON: " + e.what());
    }
    auto [id, parse] = parse_cache_record(j, context, false);
    auto it = expected_tokens.find(id);
    if (it == expected_tokens.end()) {
      log::warn(context + ": parse for unknown sentence " + id + ", skipped");
      continue;
    }
    if (!j.contains("n_tokens")) parse.n_tokens = it->second;
    if (parse.n_tokens != it->second)
      throw DataError(context + ": parser/token misalignment for sentence " + id +
                      ": parser produced " + std::to_string(parse.n_tokens) +
                      " tokens, corpus has " + std::to_string(it->second));
    parse.validate(context + " (sentence " + id + ")");
    parsed[id] = std::move(parse);
  }

  ParseRunSummary summary;
  summary.sentences = static_cast<int64_t>(sentences.size());
  std::vector<std::pair<std::string, DependencyParse>> ordered;
  for (const auto& [id, tokens] : sentences) {
    auto it = parsed.find(id);
    if (it == parsed.end())
      throw DataError("parser produced no parse for sentence " + id);
    ordered.emplace_back(id, std::move(it->second));
  }
  summary.parsed = static_cast<int64_t>(ordered.size());
  write_parse_cache(out_path, ordered);
  return summary;
}

}  // namespace tuplespec
