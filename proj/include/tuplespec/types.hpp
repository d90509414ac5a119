#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tuplespec {

enum class Subset { WikiTrain, WikiTest, SciTrain, SciTest };

const std::array<Subset, 4>& all_subsets();
std::string subset_name(Subset s);
Subset subset_from_name(const std::string& name);
bool subset_is_train(Subset s);

// The six modal classes plus NONE. Class indices are fixed: NONE is 0 and the
// speculative classes follow in this order, which is also the multi-class head
// layout and the argmax tie-break order.
enum class SpeculationType : int {
  None = 0,
  Can = 1,
  Might = 2,
  Will = 3,
  Would = 4,
  Should = 5,
  Had = 6,
};

constexpr int kNumSpeculationClasses = 7;

const std::array<SpeculationType, 6>& speculative_types();
std::string speculation_type_name(SpeculationType t);
SpeculationType speculation_type_from_name(const std::string& name);
// Lowercase surface form of a modal ("can", "might", ...). NONE has none.
const std::string& modal_surface(SpeculationType t);
// Returns NONE when the folded token is not one of the six surface forms.
SpeculationType modal_from_surface(const std::string& folded_token);

// Half-open token index range [begin, end).
struct Span {
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool contains(int i) const { return i >= begin && i < end; }
  bool operator==(const Span&) const = default;
};

struct Argument {
  std::string role;
  Span span;
  bool operator==(const Argument&) const = default;
};

// One tuple as it appears in the distribution: relation tokens may begin with
// a modal verb injected by the conversion, while relation_span covers only the
// relation's in-sentence words.
struct RawTuple {
  std::vector<std::string> relation_tokens;
  Span relation_span;
  std::vector<Argument> arguments;
};

struct SentenceRecord {
  std::string sentence_id;
  Subset subset = Subset::WikiTrain;
  std::vector<std::string> tokens;
  std::vector<RawTuple> tuples;
};

// The unit of classification: one (sentence, tuple) pair with its gold label.
struct Instance {
  std::string sentence_id;
  Subset subset = Subset::WikiTrain;
  std::vector<std::string> tokens;
  Span relation_span;
  std::vector<std::string> clean_relation_tokens;  // modal removed
  std::optional<std::string> modal;                // lowercase surface form
  std::vector<Argument> arguments;
  SpeculationType gold_type = SpeculationType::None;
  bool gold_binary = false;
  int tuple_index = 0;  // ordinal within the sentence, derived from file order

  std::string id() const { return sentence_id + "#" + std::to_string(tuple_index); }
};

struct SubsetCounts {
  int64_t sentences = 0;
  int64_t tuples = 0;
  int64_t speculative = 0;

  double speculative_pct() const {
    return tuples == 0 ? 0.0 : 100.0 * static_cast<double>(speculative) / static_cast<double>(tuples);
  }
};

struct CorpusStats {
  std::array<SubsetCounts, 4> by_subset{};  // indexed by all_subsets() order
  SubsetCounts total;

  SubsetCounts& counts(Subset s);
  const SubsetCounts& counts(Subset s) const;
};

}  // namespace tuplespec
