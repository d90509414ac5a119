// Exercises the shared library strictly through the C boundary: return
// codes, error strings, JSON out-parameters and the model handle lifecycle.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tuplespec/capi.h"
#include "tuplespec/corpus.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

const fs::path kDataDir = TUPLESPEC_TEST_DATA_DIR;
const std::string kLsoieDir = (kDataDir / "lsoie_mini").string();
const std::string kParses = (kDataDir / "golden_parses.jsonl").string();
const char* kEncoder = "scratch:dh=16,layers=1,heads=2,dff=32,vocab=211,max_len=32";

fs::path fresh_dir(const std::string& tag) {
  auto dir = fs::temp_directory_path() / ("tuplespec_capi_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Takes ownership of the out-string and hands back parsed JSON.
ordered_json parse_free(char*& json) {
  REQUIRE(json != nullptr);
  auto j = ordered_json::parse(std::string(json));
  ts_string_free(json);
  json = nullptr;
  return j;
}

}  // namespace

TEST_CASE("version, log levels and the error string") {
  CHECK(std::string(ts_version()) == "0.1.0");
  CHECK(ts_set_log_level("verbose") == TS_OK);
  CHECK(std::string(ts_last_error()).empty());

  CHECK(ts_set_log_level("chatty") == TS_ERR_CONFIG);
  CHECK(std::string(ts_last_error()).find("unknown log level") != std::string::npos);
  CHECK(ts_set_log_level(nullptr) == TS_ERR_CONFIG);
  CHECK(ts_set_log_level("") == TS_ERR_CONFIG);

  CHECK(ts_set_log_level("quiet") == TS_OK);
  CHECK(std::string(ts_last_error()).empty());  // success clears the message

  ts_string_free(nullptr);  // must be a safe no-op
}

TEST_CASE("null or empty arguments come back as config errors") {
  ts_set_log_level("quiet");
  char* json = nullptr;
  CHECK(ts_ingest(nullptr, "x", &json) == TS_ERR_CONFIG);
  CHECK(json == nullptr);
  CHECK(ts_ingest("x", "", &json) == TS_ERR_CONFIG);
  CHECK(ts_corpus_stats("", &json) == TS_ERR_CONFIG);
  CHECK(ts_difficulty_stats(nullptr, nullptr, &json) == TS_ERR_CONFIG);
  CHECK(ts_baseline(nullptr, nullptr, nullptr, &json) == TS_ERR_CONFIG);
  CHECK(ts_train(nullptr, &json) == TS_ERR_CONFIG);
  CHECK(ts_predict(nullptr, "i", nullptr, "o", &json) == TS_ERR_CONFIG);
  CHECK(ts_evaluate("", "i", nullptr, &json) == TS_ERR_CONFIG);
  CHECK(ts_parse_run("i", "", "o", &json) == TS_ERR_CONFIG);
  CHECK(ts_reproduce(nullptr, &json) == TS_ERR_CONFIG);

  ts_model* m = nullptr;
  CHECK(ts_model_load("", &m) == TS_ERR_CONFIG);
  CHECK(m == nullptr);
  CHECK(ts_model_load("x", nullptr) == TS_ERR_CONFIG);
  CHECK(ts_model_describe(nullptr, &json) == TS_ERR_CONFIG);
  CHECK(ts_model_classify(nullptr, "{}", nullptr, &json) == TS_ERR_CONFIG);
  ts_model_free(nullptr);  // safe no-op
}

TEST_CASE("missing or malformed files come back as data errors") {
  ts_set_log_level("quiet");
  char* json = nullptr;
  CHECK(ts_corpus_stats("/nonexistent/instances.jsonl", &json) == TS_ERR_DATA);
  CHECK(std::string(ts_last_error()).find("/nonexistent/instances.jsonl") !=
        std::string::npos);
  CHECK(ts_difficulty_stats("/nonexistent/a.jsonl", "/nonexistent/b.jsonl", &json) ==
        TS_ERR_DATA);
  CHECK(ts_evaluate("/nonexistent/p.jsonl", "/nonexistent/i.jsonl", nullptr, &json) ==
        TS_ERR_DATA);
  CHECK(ts_ingest("/nonexistent/lsoie", "/tmp/tuplespec_capi_unused.jsonl", &json) ==
        TS_ERR_DATA);

  // a config that cannot be opened is a config error, not a data error
  CHECK(ts_train("/nonexistent/cfg.json", &json) == TS_ERR_CONFIG);

  ts_model* m = nullptr;
  CHECK(ts_model_load("/nonexistent/ckpt", &m) == TS_ERR_DATA);
  CHECK(m == nullptr);
}

TEST_CASE("reproduce requests are validated before any work starts") {
  ts_set_log_level("quiet");
  char* json = nullptr;
  CHECK(ts_reproduce("not json", &json) == TS_ERR_CONFIG);
  CHECK(ts_reproduce("{\"bogus\": 1}", &json) == TS_ERR_CONFIG);
  CHECK(std::string(ts_last_error()).find("bogus") != std::string::npos);
  CHECK(ts_reproduce("{\"table\": 9000, \"lsoie_dir\": \"x\", \"workdir\": \"y\"}", &json) ==
        TS_ERR_CONFIG);
  CHECK(ts_reproduce("{\"table\": \"two\"}", &json) == TS_ERR_CONFIG);
}

TEST_CASE("corpus pipeline round trips through the C boundary") {
  ts_set_log_level("quiet");
  auto dir = fresh_dir("pipeline");
  auto instances = (dir / "instances.jsonl").string();

  char* json = nullptr;
  REQUIRE(ts_ingest(kLsoieDir.c_str(), instances.c_str(), &json) == TS_OK);
  auto stats = parse_free(json);
  CHECK(stats["instances_written"] == 12);
  CHECK(stats["total"]["sentences"] == 11);
  CHECK(stats["by_subset"]["wiki_train"]["speculative"] == 4);

  REQUIRE(ts_corpus_stats(instances.c_str(), &json) == TS_OK);
  auto stats2 = parse_free(json);
  CHECK(stats2["total"]["tuples"] == 12);

  REQUIRE(ts_difficulty_stats(instances.c_str(), kParses.c_str(), &json) == TS_OK);
  auto diff = parse_free(json);
  CHECK(diff["total"]["n_speculative"] == 9);
  CHECK(diff["by_type"]["MIGHT"]["total"] == 2);

  REQUIRE(ts_baseline(instances.c_str(), kParses.c_str(), "modal", &json) == TS_OK);
  auto modal = parse_free(json);
  CHECK(modal["macro"]["f1"].get<double>() == doctest::Approx(69.7));
  CHECK(modal["n_instances"] == 12);

  CHECK(ts_baseline(instances.c_str(), kParses.c_str(), "top99", &json) == TS_ERR_CONFIG);
  fs::remove_all(dir);
}

TEST_CASE("external parser commands produce a usable cache") {
  ts_set_log_level("quiet");
  auto dir = fresh_dir("parse");
  auto instances = (dir / "instances.jsonl").string();
  char* json = nullptr;
  REQUIRE(ts_ingest(kLsoieDir.c_str(), instances.c_str(), &json) == TS_OK);
  ts_string_free(json);
  json = nullptr;

  // Stand-in parser: left-to-right chain with token 0 as root. Structurally
  // valid for any sentence, which is all the cache format requires.
  auto script = dir / "chain_parser.py";
  {
    std::ofstream out(script);
    out << "import sys, json\n"
           "for line in sys.stdin:\n"
           "    line = line.strip()\n"
           "    if not line:\n"
           "        continue\n"
           "    rec = json.loads(line)\n"
           "    n = len(rec['tokens'])\n"
           "    arcs = [[i - 1, i, 'dep'] for i in range(1, n)]\n"
           "    print(json.dumps({'sentence_id': rec['sentence_id'], 'arcs': arcs}))\n";
  }
  auto cache = (dir / "parses.jsonl").string();
  std::string command = "python3 " + script.string();
  REQUIRE(ts_parse_run(instances.c_str(), command.c_str(), cache.c_str(), &json) == TS_OK);
  auto summary = parse_free(json);
  CHECK(summary["sentences"] == 11);
  CHECK(summary["parsed"] == 11);

  // the produced cache feeds the difficulty report
  REQUIRE(ts_difficulty_stats(instances.c_str(), cache.c_str(), &json) == TS_OK);
  auto diff = parse_free(json);
  CHECK(diff["total"]["n_speculative"] == 9);

  // commands that fail outright surface as runtime failures
  CHECK(ts_parse_run(instances.c_str(), "false", cache.c_str(), &json) == TS_ERR_RUNTIME);

  CHECK(ts_parse_import("/nonexistent/arcs.jsonl", instances.c_str(), cache.c_str(), &json) ==
        TS_ERR_DATA);
  fs::remove_all(dir);
}

TEST_CASE("train, load, describe, classify, predict and evaluate") {
  ts_set_log_level("quiet");
  auto dir = fresh_dir("train");
  auto instances = (dir / "instances.jsonl").string();
  char* json = nullptr;
  REQUIRE(ts_ingest(kLsoieDir.c_str(), instances.c_str(), &json) == TS_OK);
  ts_string_free(json);
  json = nullptr;

  auto run_dir = dir / "run";
  auto cfg_path = dir / "run_config.json";
  {
    ordered_json cfg;
    cfg["seed"] = 3;
    cfg["variant"] = "sem_relation";
    cfg["mode"] = "binary";
    cfg["encoder_id"] = kEncoder;
    cfg["epochs"] = 1;
    cfg["batch_size"] = 4;
    cfg["learning_rate"] = 0.001;
    cfg["train_instances"] = instances;
    // sci_train:s3 carries a multi-token relation, so head lookup needs the
    // parse cache even for this pooling variant.
    cfg["parses"] = kParses;
    cfg["output_dir"] = run_dir.string();
    std::ofstream out(cfg_path);
    out << cfg.dump(2);
  }
  REQUIRE(ts_train(cfg_path.string().c_str(), &json) == TS_OK);
  auto manifest = parse_free(json);
  CHECK(manifest["kind"] == "train");
  CHECK(manifest["skipped"] == false);

  auto ckpt = (run_dir / "checkpoint").string();
  ts_model* model = nullptr;
  REQUIRE(ts_model_load(ckpt.c_str(), &model) == TS_OK);
  REQUIRE(model != nullptr);

  REQUIRE(ts_model_describe(model, &json) == TS_OK);
  auto desc = parse_free(json);
  CHECK(desc["variant"] == "sem_relation");
  CHECK(desc["mode"] == "binary");
  CHECK(desc["n_classes"] == 2);
  CHECK(desc["encoder"]["d_model"] == 16);
  CHECK(desc["max_length"] == 32);
  CHECK(desc["n_parameters"].get<int64_t>() > 0);

  // single-tuple classification with a canonical instance record
  auto all = tuplespec::read_instances(instances);
  const tuplespec::Instance* s2 = nullptr;
  for (const auto& inst : all)
    if (inst.id() == "sci_train:s2#0") s2 = &inst;
  REQUIRE(s2 != nullptr);
  auto line = tuplespec::instance_to_jsonl(*s2);
  REQUIRE(ts_model_classify(model, line.c_str(), nullptr, &json) == TS_OK);
  auto pred = parse_free(json);
  CHECK(pred["id"] == "sci_train:s2#0");
  CHECK(pred["mode"] == "binary");
  REQUIRE(pred["probs"].size() == 2);
  double sum = pred["probs"][0].get<double>() + pred["probs"][1].get<double>();
  CHECK(sum == doctest::Approx(1.0));
  int label = pred["label"].get<int>();
  CHECK((label == 0 || label == 1));

  // a parse for a different sentence is rejected before classification
  const char* wrong_parse =
      "{\"sentence_id\": \"sci_train:s3\", \"n_tokens\": 6, "
      "\"arcs\": [[1, 0, \"det\"], [3, 1, \"nsubj\"], [3, 2, \"aux\"], "
      "[3, 4, \"advmod\"], [3, 5, \"punct\"]]}";
  CHECK(ts_model_classify(model, line.c_str(), wrong_parse, &json) == TS_ERR_DATA);
  CHECK(ts_model_classify(model, "not json", nullptr, &json) == TS_ERR_DATA);
  ts_model_free(model);

  auto preds = (dir / "preds.jsonl").string();
  REQUIRE(ts_predict(ckpt.c_str(), instances.c_str(), kParses.c_str(), preds.c_str(), &json) == TS_OK);
  auto pm = parse_free(json);
  CHECK(pm["n_predictions"] == 12);
  CHECK(pm["variant"] == "sem_relation");

  REQUIRE(ts_evaluate(preds.c_str(), instances.c_str(), kParses.c_str(), &json) == TS_OK);
  auto report = parse_free(json);
  CHECK(report["mode"] == "binary");
  CHECK(report["n_instances"] == 12);
  CHECK(report["difficulty"]["easy"]["gold"] == 5);
  fs::remove_all(dir);
}
