// tuplespec command line: thin shell over the C API. All pipeline logic
// lives in the library; this file only maps flags to calls and prints JSON.

#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "tuplespec/capi.h"

namespace {

int finish(ts_rc rc, char* json) {
  if (rc != TS_OK) {
    std::fprintf(stderr, "error: %s\n", ts_last_error());
    ts_string_free(json);
    return static_cast<int>(rc);
  }
  if (json) {
    std::printf("%s\n", json);
    ts_string_free(json);
  }
  return 0;
}

const char* opt_cstr(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

std::string json_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::string json_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speculation detection for Open Information Extraction tuples"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ts_version()));

  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "Log progress details");
  app.add_flag("-q,--quiet", quiet, "Log errors only");

  std::string lsoie_dir, instances, parses, out_path, command, arcs_file;
  std::string dict_name, config_path, checkpoint, predictions;
  std::string instance_json, parse_json, row;
  int table = 0, n_seeds = 3, epochs = 3, batch_size = 32, max_length = 0;
  uint64_t base_seed = 42;
  double subsample = 1.0, learning_rate = 2e-5;
  std::string encoder_id, workdir;

  auto* ingest = app.add_subcommand("ingest", "Load the LSOIE subsets into one instance file");
  ingest->add_option("--lsoie", lsoie_dir, "Dataset directory")->required();
  ingest->add_option("--out", out_path, "Instance file to write")->required();

  auto* stats = app.add_subcommand("stats", "Corpus statistics, difficulty breakdown with --parses");
  stats->add_option("--instances", instances, "Instance file")->required();
  stats->add_option("--parses", parses, "Parse cache (adds the difficulty block)");

  auto* parse = app.add_subcommand("parse", "Produce a validated dependency parse cache");
  parse->add_option("--instances", instances, "Instance file")->required();
  parse->add_option("--command", command, "Parser command reading/writing JSONL on stdio");
  parse->add_option("--import", arcs_file, "Pre-parsed arcs file to validate instead");
  parse->add_option("--out", out_path, "Parse cache to write")->required();

  auto* baseline = app.add_subcommand("baseline", "Keyword-matching baseline");
  baseline->add_option("--instances", instances, "Instance file")->required();
  baseline->add_option("--parses", parses, "Parse cache")->required();
  baseline->add_option("--dict", dict_name, "modal, top10, top20 or top30")->required();

  auto* train = app.add_subcommand("train", "Train a model per a JSON run config");
  train->add_option("--config", config_path, "Run config file")->required();

  auto* predict = app.add_subcommand("predict", "Classify an instance file with a checkpoint");
  predict->add_option("--checkpoint", checkpoint, "Checkpoint directory")->required();
  predict->add_option("--instances", instances, "Instance file")->required();
  predict->add_option("--parses", parses, "Parse cache (required for syntactic variants)");
  predict->add_option("--out", out_path, "Prediction file to write")->required();

  auto* eval = app.add_subcommand("eval", "Score a prediction file against gold labels");
  eval->add_option("--predictions", predictions, "Prediction file")->required();
  eval->add_option("--instances", instances, "Instance file")->required();
  eval->add_option("--parses", parses, "Parse cache (adds recall by difficulty)");

  auto* classify = app.add_subcommand("classify", "Classify a single tuple given as JSON");
  classify->add_option("--checkpoint", checkpoint, "Checkpoint directory")->required();
  classify->add_option("--instance", instance_json, "Instance record (JSON)")->required();
  classify->add_option("--parse", parse_json, "Parse record for its sentence (JSON)");

  auto* reproduce = app.add_subcommand("reproduce", "Re-run a published table and report deltas");
  reproduce->add_option("--table", table, "2, 4, 5, 6 or 7")->required();
  reproduce->add_option("--row", row, "Table 6 row (keyword dict or variant name)");
  reproduce->add_option("--lsoie", lsoie_dir, "Dataset directory")->required();
  reproduce->add_option("--workdir", workdir, "Scratch directory for staged runs")->required();
  reproduce->add_option("--parses", parses, "Parse cache over the ingested instances");
  reproduce->add_option("--encoder", encoder_id, "Encoder id for model rows");
  reproduce->add_option("--seeds", n_seeds, "Seeds per model row");
  reproduce->add_option("--base-seed", base_seed, "First seed");
  reproduce->add_option("--subsample", subsample, "Training subsample fraction");
  reproduce->add_option("--epochs", epochs, "Training epochs");
  reproduce->add_option("--batch-size", batch_size, "Batch size");
  reproduce->add_option("--lr", learning_rate, "Learning rate");
  reproduce->add_option("--max-length", max_length, "Token budget override");

  CLI11_PARSE(app, argc, argv);

  if (ts_set_log_level(quiet ? "quiet" : verbose ? "verbose" : "normal") != TS_OK) {
    std::fprintf(stderr, "error: %s\n", ts_last_error());
    return 2;
  }

  char* json = nullptr;
  if (*ingest) return finish(ts_ingest(lsoie_dir.c_str(), out_path.c_str(), &json), json);

  if (*stats) {
    if (parses.empty()) return finish(ts_corpus_stats(instances.c_str(), &json), json);
    char* corpus_json = nullptr;
    ts_rc rc = ts_corpus_stats(instances.c_str(), &corpus_json);
    if (rc != TS_OK) return finish(rc, corpus_json);
    rc = ts_difficulty_stats(instances.c_str(), parses.c_str(), &json);
    if (rc != TS_OK) {
      ts_string_free(corpus_json);
      return finish(rc, json);
    }
    std::printf("{\n\"corpus\": %s,\n\"difficulty\": %s\n}\n", corpus_json, json);
    ts_string_free(corpus_json);
    ts_string_free(json);
    return 0;
  }

  if (*parse) {
    if (command.empty() == arcs_file.empty()) {
      std::fprintf(stderr, "error: parse needs exactly one of --command or --import\n");
      return 2;
    }
    if (!command.empty())
      return finish(ts_parse_run(instances.c_str(), command.c_str(), out_path.c_str(), &json),
                    json);
    return finish(ts_parse_import(arcs_file.c_str(), instances.c_str(), out_path.c_str(), &json),
                  json);
  }

  if (*baseline)
    return finish(ts_baseline(instances.c_str(), parses.c_str(), dict_name.c_str(), &json), json);

  if (*train) return finish(ts_train(config_path.c_str(), &json), json);

  if (*predict)
    return finish(ts_predict(checkpoint.c_str(), instances.c_str(), opt_cstr(parses),
                             out_path.c_str(), &json),
                  json);

  if (*eval)
    return finish(ts_evaluate(predictions.c_str(), instances.c_str(), opt_cstr(parses), &json),
                  json);

  if (*classify) {
    ts_model* model = nullptr;
    ts_rc rc = ts_model_load(checkpoint.c_str(), &model);
    if (rc != TS_OK) return finish(rc, nullptr);
    rc = ts_model_classify(model, instance_json.c_str(), opt_cstr(parse_json), &json);
    ts_model_free(model);
    return finish(rc, json);
  }

  if (*reproduce) {
    std::string req = "{";
    req += "\"table\": " + std::to_string(table);
    if (!row.empty()) req += ", \"row\": " + json_quote(row);
    req += ", \"n_seeds\": " + std::to_string(n_seeds);
    req += ", \"base_seed\": " + std::to_string(base_seed);
    req += ", \"lsoie_dir\": " + json_quote(lsoie_dir);
    req += ", \"workdir\": " + json_quote(workdir);
    if (!parses.empty()) req += ", \"parses\": " + json_quote(parses);
    if (!encoder_id.empty()) req += ", \"encoder_id\": " + json_quote(encoder_id);
    req += ", \"subsample\": " + json_number(subsample);
    req += ", \"epochs\": " + std::to_string(epochs);
    req += ", \"batch_size\": " + std::to_string(batch_size);
    req += ", \"learning_rate\": " + json_number(learning_rate);
    req += ", \"max_length\": " + std::to_string(max_length);
    req += "}";
    return finish(ts_reproduce(req.c_str(), &json), json);
  }

  return 2;
}
