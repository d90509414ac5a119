#include "tuplespec/difficulty.hpp"

#include "tuplespec/errors.hpp"
#include "tuplespec/util.hpp"

namespace tuplespec {

std::string difficulty_name(DifficultyLevel level) {
  switch (level) {
    case DifficultyLevel::Easy: return "easy";
    case DifficultyLevel::Medium: return "medium";
    case DifficultyLevel::Hard: return "hard";
  }
  throw RuntimeFailure("bad difficulty level");
}

DifficultyLevel classify_difficulty(const Instance& instance, int relation_head_token) {
  if (!instance.modal)
    throw DataError("instance " + instance.id() + " is not speculative, difficulty is undefined");
  if (relation_head_token < 0 || relation_head_token >= static_cast<int>(instance.tokens.size()))
    throw DataError("instance " + instance.id() + ": relation head out of range");

  const std::string& modal = *instance.modal;
  if (relation_head_token > 0 &&
      util::lower_ascii(instance.tokens[static_cast<size_t>(relation_head_token - 1)]) == modal)
    return DifficultyLevel::Easy;
  for (const auto& tok : instance.tokens)
    if (util::lower_ascii(tok) == modal) return DifficultyLevel::Medium;
  return DifficultyLevel::Hard;
}

double LevelCounts::pct(DifficultyLevel level) const {
  int64_t t = total();
  if (t == 0) return 0.0;
  return 100.0 * static_cast<double>(n[static_cast<size_t>(level)]) / static_cast<double>(t);
}

DifficultyStats difficulty_stats(const std::vector<Instance>& instances,
                                 const std::vector<DifficultyLevel>& levels) {
  if (instances.size() != levels.size())
    throw RuntimeFailure("difficulty_stats: instances and levels differ in length");
  DifficultyStats stats;
  for (size_t i = 0; i < instances.size(); ++i) {
    const Instance& inst = instances[i];
    if (inst.gold_type == SpeculationType::None)
      throw RuntimeFailure("difficulty_stats: non-speculative instance " + inst.id());
    size_t level = static_cast<size_t>(levels[i]);
    stats.by_subset[static_cast<size_t>(inst.subset)].n[level]++;
    stats.by_type[static_cast<size_t>(inst.gold_type) - 1].n[level]++;
    stats.total.n[level]++;
  }
  return stats;
}

}  // namespace tuplespec
