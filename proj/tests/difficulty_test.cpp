#include <doctest.h>

#include <filesystem>

#include "tuplespec/corpus.hpp"
#include "tuplespec/depparse.hpp"
#include "tuplespec/difficulty.hpp"
#include "tuplespec/errors.hpp"
#include "tuplespec/lsoie.hpp"

using namespace tuplespec;

namespace {

const std::filesystem::path kDataDir = TUPLESPEC_TEST_DATA_DIR;

Instance speculative(std::vector<std::string> tokens, std::string modal) {
  Instance inst;
  inst.sentence_id = "t";
  inst.tokens = std::move(tokens);
  inst.modal = std::move(modal);
  inst.gold_type = modal_from_surface(*inst.modal);
  inst.gold_binary = true;
  return inst;
}

std::vector<Instance> mini_corpus_instances() {
  auto records = load_lsoie_subset_files(discover_lsoie_dir(kDataDir / "lsoie_mini"));
  std::vector<SentenceRecord> wiki, sci;
  for (auto& rec : records) {
    (rec.subset == Subset::WikiTrain || rec.subset == Subset::WikiTest ? wiki : sci)
        .push_back(std::move(rec));
  }
  return build_instances(deduplicate(wiki, sci));
}

}  // namespace

TEST_CASE("modal adjacent to the relation head is easy") {
  auto inst = speculative({"The", "drug", "might", "cure", "it"}, "might");
  CHECK(classify_difficulty(inst, 3) == DifficultyLevel::Easy);
  // Case-folded match.
  auto caps = speculative({"Might", "cure", "it"}, "might");
  CHECK(classify_difficulty(caps, 1) == DifficultyLevel::Easy);
}

TEST_CASE("modal elsewhere in the sentence is medium") {
  auto inst = speculative({"He", "would", "eventually", "go", "home"}, "would");
  CHECK(classify_difficulty(inst, 3) == DifficultyLevel::Medium);
}

TEST_CASE("absent modal is hard") {
  auto inst = speculative({"The", "UN", "plans", "to", "release", "it"}, "will");
  CHECK(classify_difficulty(inst, 4) == DifficultyLevel::Hard);
}

TEST_CASE("head at position zero cannot have an adjacent modal") {
  auto inst = speculative({"Go", "home", "you", "should"}, "should");
  CHECK(classify_difficulty(inst, 0) == DifficultyLevel::Medium);
}

TEST_CASE("difficulty is undefined for non-speculative instances") {
  Instance inst;
  inst.sentence_id = "t";
  inst.tokens = {"a", "b"};
  CHECK_THROWS_AS(classify_difficulty(inst, 0), DataError);
}

TEST_CASE("an out-of-range head index is a data error") {
  auto inst = speculative({"might", "go"}, "might");
  CHECK_THROWS_AS(classify_difficulty(inst, 2), DataError);
  CHECK_THROWS_AS(classify_difficulty(inst, -1), DataError);
}

TEST_CASE("mini corpus difficulty levels match the hand labels") {
  auto parses = read_parse_cache(kDataDir / "golden_parses.jsonl");
  auto instances = mini_corpus_instances();

  std::vector<Instance> speculative_instances;
  std::vector<DifficultyLevel> levels;
  for (const auto& inst : instances) {
    if (inst.gold_type == SpeculationType::None) continue;
    int head = relation_head(inst, parse_for(parses, inst));
    speculative_instances.push_back(inst);
    levels.push_back(classify_difficulty(inst, head));
  }
  REQUIRE(speculative_instances.size() == 9);

  auto level_of = [&](const std::string& id) {
    for (size_t i = 0; i < speculative_instances.size(); ++i)
      if (speculative_instances[i].id() == id) return levels[i];
    FAIL("missing instance " << id);
    return DifficultyLevel::Easy;
  };
  CHECK(level_of("wiki_train:w1#0") == DifficultyLevel::Easy);
  CHECK(level_of("wiki_train:w2#0") == DifficultyLevel::Hard);
  CHECK(level_of("wiki_train:w3#0") == DifficultyLevel::Hard);
  CHECK(level_of("wiki_train:w4#0") == DifficultyLevel::Easy);
  CHECK(level_of("wiki_test:wt1#0") == DifficultyLevel::Easy);
  CHECK(level_of("wiki_test:wt2#0") == DifficultyLevel::Medium);
  CHECK(level_of("wiki_test:wt3#0") == DifficultyLevel::Easy);
  CHECK(level_of("sci_train:s2#0") == DifficultyLevel::Easy);
  CHECK(level_of("sci_test:st2#0") == DifficultyLevel::Medium);

  auto stats = difficulty_stats(speculative_instances, levels);
  CHECK(stats.total.n[0] == 5);
  CHECK(stats.total.n[1] == 2);
  CHECK(stats.total.n[2] == 2);
  CHECK(stats.total.total() == 9);
  CHECK(stats.total.pct(DifficultyLevel::Easy) == doctest::Approx(500.0 / 9.0));

  const auto& wiki_train = stats.by_subset[static_cast<size_t>(Subset::WikiTrain)];
  CHECK(wiki_train.n[0] == 2);
  CHECK(wiki_train.n[1] == 0);
  CHECK(wiki_train.n[2] == 2);
  CHECK(wiki_train.pct(DifficultyLevel::Easy) == doctest::Approx(50.0));

  // WILL appears twice, once easy (w1) and once hard (w2).
  const auto& will = stats.by_type[static_cast<size_t>(SpeculationType::Will) - 1];
  CHECK(will.n[0] == 1);
  CHECK(will.n[2] == 1);
  CHECK(will.total() == 2);
}

TEST_CASE("difficulty percentages of an empty tally are zero") {
  LevelCounts empty;
  CHECK(empty.total() == 0);
  CHECK(empty.pct(DifficultyLevel::Hard) == 0.0);
}
