#include "tuplespec/cues.hpp"

#include <algorithm>

#include "tuplespec/errors.hpp"
#include "tuplespec/util.hpp"

namespace tuplespec {

const std::vector<CueEntry>& aggregated_cue_table() {
  // Cue frequencies aggregated over BioScope, SFU and CoDRS, most frequent first.
  static const std::vector<CueEntry> table = {
      {"may", 1665},      {"if", 1294},       {"or", 1017},     {"suggest", 928},
      {"can", 882},       {"would", 832},     {"could", 495},   {"indicate", 404},
      {"think", 362},     {"possible", 304},  {"appear", 260},  {"might", 256},
      {"consider", 250},  {"whether", 247},   {"seem", 228},    {"investigate", 221},
      {"likely", 221},    {"should", 213},    {"believe", 198}, {"examine", 183},
      {"probable", 122},  {"probably", 121},  {"study", 101},   {"allege", 89},
      {"determine", 87},  {"putative", 80},   {"hypothesis", 77}, {"expect", 75},
      {"will", 60},       {"regard", 58}};
  return table;
}

bool CueDictionary::contains(const std::string& folded) const {
  for (const auto& e : entries)
    if (e.cue == folded) return true;
  return false;
}

CueDictionary build_cue_dictionary(int k) {
  if (k != 0 && k != 10 && k != 20 && k != 30)
    throw ConfigError("cue dictionary size must be 0, 10, 20 or 30, got " + std::to_string(k));

  CueDictionary dict;
  dict.k = k;

  // The six modal labels are always present so every dictionary can at least
  // recover the annotation vocabulary.
  static const std::vector<std::string> modals = {"can", "might", "will",
                                                  "would", "should", "had"};
  for (const auto& m : modals) dict.entries.push_back({m, 0});

  const auto& table = aggregated_cue_table();
  for (int i = 0; i < k && i < static_cast<int>(table.size()); ++i) {
    bool seen = false;
    for (auto& e : dict.entries) {
      if (e.cue == table[i].cue) {
        e.frequency = table[i].frequency;
        seen = true;
        break;
      }
    }
    if (!seen) dict.entries.push_back(table[i]);
  }

  // Frequency descending, then alphabetical so equal-frequency cues have a
  // stable order across runs.
  std::sort(dict.entries.begin(), dict.entries.end(), [](const CueEntry& a, const CueEntry& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.cue < b.cue;
  });
  return dict;
}

CueDictionary cue_dictionary_by_name(const std::string& name) {
  if (name == "modal") return build_cue_dictionary(0);
  if (name == "top10") return build_cue_dictionary(10);
  if (name == "top20") return build_cue_dictionary(20);
  if (name == "top30") return build_cue_dictionary(30);
  throw ConfigError("unknown cue dictionary '" + name + "' (expected modal, top10, top20 or top30)");
}

bool keyword_match_classify(const Neighborhood& neigh, const std::vector<std::string>& tokens,
                            const CueDictionary& dict) {
  for (const auto& edge : neigh.neighbors) {
    if (edge.token < 0 || edge.token >= static_cast<int>(tokens.size()))
      throw DataError("neighbourhood token index out of range");
    if (dict.contains(util::lower_ascii(tokens[static_cast<size_t>(edge.token)]))) return true;
  }
  return false;
}

}  // namespace tuplespec
