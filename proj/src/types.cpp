#include "tuplespec/types.hpp"

#include "tuplespec/errors.hpp"
#include "tuplespec/util.hpp"

namespace tuplespec {

const std::array<Subset, 4>& all_subsets() {
  static const std::array<Subset, 4> subsets = {Subset::WikiTrain, Subset::WikiTest,
                                                Subset::SciTrain, Subset::SciTest};
  return subsets;
}

std::string subset_name(Subset s) {
  switch (s) {
    case Subset::WikiTrain: return "wiki_train";
    case Subset::WikiTest: return "wiki_test";
    case Subset::SciTrain: return "sci_train";
    case Subset::SciTest: return "sci_test";
  }
  return "?";
}

Subset subset_from_name(const std::string& name) {
  for (Subset s : all_subsets()) {
    if (subset_name(s) == name) return s;
  }
  throw DataError("unknown subset name: " + name);
}

bool subset_is_train(Subset s) { return s == Subset::WikiTrain || s == Subset::SciTrain; }

const std::array<SpeculationType, 6>& speculative_types() {
  static const std::array<SpeculationType, 6> types = {
      SpeculationType::Can,   SpeculationType::Might,  SpeculationType::Will,
      SpeculationType::Would, SpeculationType::Should, SpeculationType::Had};
  return types;
}

std::string speculation_type_name(SpeculationType t) {
  switch (t) {
    case SpeculationType::None: return "NONE";
    case SpeculationType::Can: return "CAN";
    case SpeculationType::Might: return "MIGHT";
    case SpeculationType::Will: return "WILL";
    case SpeculationType::Would: return "WOULD";
    case SpeculationType::Should: return "SHOULD";
    case SpeculationType::Had: return "HAD";
  }
  return "?";
}

SpeculationType speculation_type_from_name(const std::string& name) {
  for (int i = 0; i < kNumSpeculationClasses; ++i) {
    auto t = static_cast<SpeculationType>(i);
    if (speculation_type_name(t) == name) return t;
  }
  throw DataError("unknown speculation type: " + name);
}

const std::string& modal_surface(SpeculationType t) {
  static const std::string surfaces[kNumSpeculationClasses] = {"",      "can",    "might", "will",
                                                               "would", "should", "had"};
  return surfaces[static_cast<int>(t)];
}

SpeculationType modal_from_surface(const std::string& folded_token) {
  for (SpeculationType t : speculative_types()) {
    if (modal_surface(t) == folded_token) return t;
  }
  return SpeculationType::None;
}

SubsetCounts& CorpusStats::counts(Subset s) { return by_subset[static_cast<size_t>(s)]; }

const SubsetCounts& CorpusStats::counts(Subset s) const {
  return by_subset[static_cast<size_t>(s)];
}

}  // namespace tuplespec
