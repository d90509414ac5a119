#pragma once

#include <string>
#include <vector>

#include "tuplespec/depparse.hpp"

namespace tuplespec {

struct CueEntry {
  std::string cue;
  int frequency = 0;
};

// Speculative-keyword dictionary: the six modals plus the top-k aggregated
// cues, entries ordered by descending aggregated frequency. Matching is
// whole-token, case-folded set membership.
struct CueDictionary {
  int k = 0;
  std::vector<CueEntry> entries;

  bool contains(const std::string& folded_token) const;
};

// The 30 most frequent aggregated speculation cues with their summed
// frequencies, in rank order.
const std::vector<CueEntry>& aggregated_cue_table();

// k must be one of {0, 10, 20, 30}; k = 0 yields the six modals only.
CueDictionary build_cue_dictionary(int k);

// Dictionary names accepted on the command line: modal, top10, top20, top30.
CueDictionary cue_dictionary_by_name(const std::string& name);

// True iff some neighbor token, case-folded, equals a dictionary cue. The
// center token itself is not checked.
bool keyword_match_classify(const Neighborhood& neigh,
                            const std::vector<std::string>& tokens,
                            const CueDictionary& dict);

}  // namespace tuplespec
