#pragma once

// Published evaluation numbers for the LSOIE speculation study, embedded so
// reproduction runs can report per-cell deltas. Values are transcribed from
// the result tables; NaN marks cells the source leaves blank.

#include <array>
#include <string>

namespace tuplespec::ref {

struct CorpusRow {  // dataset statistics per subset
  const char* subset;
  double sentences;
  double tuples;
  double speculative;
  double spec_pct;
};
extern const std::array<CorpusRow, 5> kCorpusTable;  // 4 subsets + total

struct DifficultyRow {  // share of speculative tuples per difficulty, by subset
  const char* subset;
  double n_spec;
  double easy_pct;
  double medium_pct;
  double hard_pct;
};
extern const std::array<DifficultyRow, 5> kDifficultyBySubset;

struct TypeDifficultyCol {  // difficulty breakdown per speculation class
  const char* type;
  double easy_n, easy_pct;
  double medium_n, medium_pct;
  double hard_n, hard_pct;
  double total;
};
extern const std::array<TypeDifficultyCol, 6> kDifficultyByType;

struct BinaryResultRow {  // binary detection results, all baselines + the model
  const char* row;  // modal, top10, top20, top30, sem_sentence, ..., oie_spec
  double macro_p, macro_r, macro_f1;
  double pos_p, pos_r, pos_f1;
  double recall_easy, recall_medium, recall_hard;
};
extern const std::array<BinaryResultRow, 12> kBinaryResults;
const BinaryResultRow* find_binary_result(const std::string& row);

struct MulticlassRow {  // per-class breakdown of the multi-class model
  const char* name;  // non_spec, spec (aggregate), can, might, will, should, would, had
  double n;
  double precision, recall, f1;
};
extern const std::array<MulticlassRow, 8> kMulticlassResults;

// Train/test split sizes after preprocessing.
inline constexpr double kTrainSentences = 38823;
inline constexpr double kTrainTuples = 79128;
inline constexpr double kTestSentences = 11339;
inline constexpr double kTestTuples = 22038;

}  // namespace tuplespec::ref
