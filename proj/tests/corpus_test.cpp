#include <doctest.h>

#include <filesystem>

#include "tuplespec/corpus.hpp"
#include "tuplespec/errors.hpp"

using namespace tuplespec;

namespace {

SentenceRecord make_record(const std::string& id, Subset subset,
                           std::vector<std::string> tokens) {
  SentenceRecord rec;
  rec.sentence_id = id;
  rec.subset = subset;
  rec.tokens = std::move(tokens);
  return rec;
}

RawTuple make_tuple(std::vector<std::string> relation_tokens, Span span) {
  RawTuple t;
  t.relation_tokens = std::move(relation_tokens);
  t.relation_span = span;
  return t;
}

}  // namespace

TEST_CASE("extract_speculation_label strips a leading modal") {
  auto [type, clean] = extract_speculation_label({"will", "release"});
  CHECK(type == SpeculationType::Will);
  CHECK(clean == std::vector<std::string>{"release"});
}

TEST_CASE("extract_speculation_label folds case") {
  auto [type, clean] = extract_speculation_label({"Might", "cure"});
  CHECK(type == SpeculationType::Might);
  CHECK(clean == std::vector<std::string>{"cure"});
}

TEST_CASE("extract_speculation_label leaves non-modal relations alone") {
  auto [type, clean] = extract_speculation_label({"release"});
  CHECK(type == SpeculationType::None);
  CHECK(clean == std::vector<std::string>{"release"});

  // "may" is a hedge cue but not one of the six labels.
  auto [type2, clean2] = extract_speculation_label({"may", "be", "involved"});
  CHECK(type2 == SpeculationType::None);
  CHECK(clean2.size() == 3);

  // A modal not in first position does not define the label.
  auto [type3, clean3] = extract_speculation_label({"be", "can"});
  CHECK(type3 == SpeculationType::None);
  CHECK(clean3.size() == 2);
}

TEST_CASE("a relation that is only a modal is a data error") {
  CHECK_THROWS_AS(extract_speculation_label({"might"}), DataError);
  CHECK_THROWS_AS(extract_speculation_label({}), DataError);
}

TEST_CASE("deduplicate drops sci sentences whose tokens appear in wiki") {
  std::vector<SentenceRecord> wiki = {
      make_record("w1", Subset::WikiTrain, {"The", "UN", "will", "release", "."}),
  };
  std::vector<SentenceRecord> sci = {
      make_record("s1", Subset::SciTrain, {"The", "UN", "will", "release", "."}),
      make_record("s2", Subset::SciTest, {"Cells", "divide", "."}),
      // Case differs, so this is a distinct sentence.
      make_record("s3", Subset::SciTrain, {"the", "UN", "will", "release", "."}),
  };
  auto kept = deduplicate(wiki, sci);
  REQUIRE(kept.size() == 3);
  CHECK(kept[0].sentence_id == "w1");
  CHECK(kept[1].sentence_id == "s2");
  CHECK(kept[2].sentence_id == "s3");

  // Idempotent: running again over the surviving records changes nothing.
  std::vector<SentenceRecord> wiki2(kept.begin(), kept.begin() + 1);
  std::vector<SentenceRecord> sci2(kept.begin() + 1, kept.end());
  CHECK(deduplicate(wiki2, sci2).size() == 3);
}

TEST_CASE("build_instances labels tuples and numbers them per sentence") {
  auto rec = make_record("w1", Subset::WikiTrain, {"The", "UN", "will", "release", "a", "report"});
  rec.tuples.push_back(make_tuple({"will", "release"}, Span{2, 4}));
  rec.tuples.push_back(make_tuple({"release"}, Span{3, 4}));
  auto instances = build_instances({rec});
  REQUIRE(instances.size() == 2);
  CHECK(instances[0].gold_type == SpeculationType::Will);
  CHECK(instances[0].gold_binary);
  CHECK(instances[0].modal.has_value());
  CHECK(*instances[0].modal == "will");
  CHECK(instances[0].clean_relation_tokens == std::vector<std::string>{"release"});
  CHECK(instances[0].tuple_index == 0);
  CHECK(instances[0].id() == "w1#0");
  CHECK(instances[1].gold_type == SpeculationType::None);
  CHECK_FALSE(instances[1].gold_binary);
  CHECK_FALSE(instances[1].modal.has_value());
  CHECK(instances[1].tuple_index == 1);
}

TEST_CASE("corpus_stats aggregates per subset and total") {
  auto rec1 = make_record("w1", Subset::WikiTrain, {"a", "b"});
  rec1.tuples.push_back(make_tuple({"will", "b"}, Span{1, 2}));
  rec1.tuples.push_back(make_tuple({"b"}, Span{1, 2}));
  auto rec2 = make_record("s1", Subset::SciTest, {"c", "d"});
  rec2.tuples.push_back(make_tuple({"d"}, Span{1, 2}));
  auto stats = corpus_stats(build_instances({rec1, rec2}));
  CHECK(stats.counts(Subset::WikiTrain).sentences == 1);
  CHECK(stats.counts(Subset::WikiTrain).tuples == 2);
  CHECK(stats.counts(Subset::WikiTrain).speculative == 1);
  CHECK(stats.counts(Subset::SciTest).tuples == 1);
  CHECK(stats.total.sentences == 2);
  CHECK(stats.total.tuples == 3);
  CHECK(stats.total.speculative == 1);
  CHECK(stats.total.speculative_pct() == doctest::Approx(100.0 / 3.0));
}

TEST_CASE("instance file round trip preserves every field") {
  auto rec = make_record("w9", Subset::WikiTest, {"They", "had", "gone", "home", "."});
  auto tup = make_tuple({"had", "gone"}, Span{1, 3});
  tup.arguments.push_back(Argument{"A0", Span{0, 1}});
  tup.arguments.push_back(Argument{"A1", Span{3, 4}});
  rec.tuples.push_back(std::move(tup));
  auto instances = build_instances({rec});

  auto path = std::filesystem::temp_directory_path() / "tuplespec_instances_test.jsonl";
  write_instances(path, instances);
  auto loaded = read_instances(path);
  std::filesystem::remove(path);

  REQUIRE(loaded.size() == 1);
  const auto& a = instances[0];
  const auto& b = loaded[0];
  CHECK(a.sentence_id == b.sentence_id);
  CHECK(a.subset == b.subset);
  CHECK(a.tokens == b.tokens);
  CHECK(a.relation_span == b.relation_span);
  CHECK(a.clean_relation_tokens == b.clean_relation_tokens);
  CHECK(a.modal == b.modal);
  CHECK(a.arguments == b.arguments);
  CHECK(a.gold_type == b.gold_type);
  CHECK(a.gold_binary == b.gold_binary);
  CHECK(a.tuple_index == b.tuple_index);
}

TEST_CASE("instance_from_jsonl validates the record") {
  const char* good =
      R"({"sentence_id": "x", "subset": "wiki_train", "tokens": ["a", "can", "go"],)"
      R"( "relation_span": [2, 3], "clean_relation": ["go"], "modal": "can",)"
      R"( "arguments": [], "gold_type": "CAN", "gold_binary": true})";
  auto inst = instance_from_jsonl(good, "test");
  CHECK(inst.gold_type == SpeculationType::Can);
  CHECK(inst.tuple_index == 0);

  // gold_binary must agree with gold_type.
  const char* inconsistent =
      R"({"sentence_id": "x", "subset": "wiki_train", "tokens": ["a"],)"
      R"( "relation_span": [0, 1], "clean_relation": ["a"], "modal": null,)"
      R"( "arguments": [], "gold_type": "NONE", "gold_binary": true})";
  CHECK_THROWS_AS(instance_from_jsonl(inconsistent, "test"), DataError);

  CHECK_THROWS_AS(instance_from_jsonl("not json", "test"), DataError);
  CHECK_THROWS_AS(instance_from_jsonl(R"({"sentence_id": "x"})", "test"), DataError);
}

TEST_CASE("read_instances rejects a missing file") {
  CHECK_THROWS_AS(read_instances("/nonexistent/instances.jsonl"), DataError);
}
