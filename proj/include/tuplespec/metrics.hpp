#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tuplespec/difficulty.hpp"
#include "tuplespec/types.hpp"

namespace tuplespec {

// Scores are percentages in [0, 100], kept raw internally; rounding to one
// decimal (half-up) happens only when a report is rendered.
struct Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  // Binary block. Macro is the unweighted mean of the two per-class scores
  // (mean of per-class F1, not F1 of means).
  Score positive;
  Score negative;
  Score macro;

  // Multi-class block, present in multi-class mode: per-class scores plus an
  // aggregate block treating any speculative class as positive.
  bool multiclass = false;
  std::array<Score, kNumSpeculationClasses> per_class{};  // by class index
  std::array<int64_t, kNumSpeculationClasses> class_gold_counts{};

  // Recall over gold-speculative instances by difficulty; precision is
  // intentionally undefined for this block. Filled only when difficulty
  // levels were supplied.
  bool has_difficulty = false;
  std::array<double, 3> recall_by_difficulty{};
  std::array<int64_t, 3> difficulty_gold_counts{};

  int64_t n_instances = 0;
};

// Binary scoring. preds/golds are 0/1, aligned; difficulties must be set for
// every gold-speculative instance.
EvalReport score_binary(const std::vector<int>& preds, const std::vector<int>& golds,
                        const std::vector<std::optional<DifficultyLevel>>& difficulties);

// 7-class scoring; class indices follow SpeculationType. The aggregate
// positive/negative/macro block collapses any speculative class to positive.
EvalReport score_multiclass(const std::vector<int>& preds, const std::vector<int>& golds,
                            const std::vector<std::optional<DifficultyLevel>>& difficulties);

// Per-level recall over gold-speculative instances only. preds/golds are
// binary detection outcomes.
std::array<double, 3> recall_by_difficulty(const std::vector<int>& preds,
                                           const std::vector<int>& golds,
                                           const std::vector<std::optional<DifficultyLevel>>& levels);

}  // namespace tuplespec
