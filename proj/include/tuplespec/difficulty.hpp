#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "tuplespec/types.hpp"

namespace tuplespec {

enum class DifficultyLevel : int { Easy = 0, Medium = 1, Hard = 2 };

std::string difficulty_name(DifficultyLevel level);

// Defined only for speculative instances. EASY when the modal surface form is
// the token immediately preceding the relation head, MEDIUM when it occurs
// anywhere else in the sentence, HARD when it is absent. Case-folded exact
// token match; head is the relation head index from the dependency parse.
DifficultyLevel classify_difficulty(const Instance& instance, int head);

struct LevelCounts {
  std::array<int64_t, 3> n{};  // indexed by DifficultyLevel

  int64_t total() const { return n[0] + n[1] + n[2]; }
  double pct(DifficultyLevel level) const;
};

struct DifficultyStats {
  std::array<LevelCounts, 4> by_subset{};              // all_subsets() order
  std::array<LevelCounts, 6> by_type{};                // speculative_types() order
  LevelCounts total;
};

// Aggregates one level per speculative instance; the two inputs are aligned.
DifficultyStats difficulty_stats(const std::vector<Instance>& instances,
                                 const std::vector<DifficultyLevel>& levels);

}  // namespace tuplespec
