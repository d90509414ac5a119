#pragma once

// Config-driven orchestration: ingest, stats, baselines, training runs with
// manifests and digest-based skipping, prediction/eval round trips, and the
// named reproduction presets for the published tables.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tuplespec/corpus.hpp"
#include "tuplespec/difficulty.hpp"
#include "tuplespec/metrics.hpp"
#include "tuplespec/model.hpp"

namespace tuplespec {

struct IngestResult {
  CorpusStats stats;
  int64_t instances_written = 0;
};

// Discover + load the four LSOIE subsets, dedup, build instances, write the
// canonical instance file and a manifest next to it.
IngestResult ingest_run(const std::filesystem::path& lsoie_dir,
                        const std::filesystem::path& out_instances);

nlohmann::ordered_json corpus_stats_report(const CorpusStats& stats);

// Difficulty levels need the relation head, so parses must cover every
// speculative instance.
std::vector<DifficultyLevel> difficulty_levels(const std::vector<Instance>& speculative,
                                               const ParseMap& parses);
nlohmann::ordered_json difficulty_report(const std::vector<Instance>& instances,
                                         const ParseMap& parses);

// Scores rounded to one decimal, stable field names.
nlohmann::ordered_json eval_report_json(const EvalReport& report,
                                        const nlohmann::ordered_json& config_snapshot);

nlohmann::ordered_json baseline_run(const std::filesystem::path& instances_path,
                                    const std::filesystem::path& parses_path,
                                    const std::string& dict_name);

// Documented run config keys; unknown keys are an error so typos cannot
// silently change a run.
struct RunConfig {
  uint64_t seed = 42;
  Variant variant = Variant::OieSpec;
  Mode mode = Mode::Binary;
  std::string encoder_id;
  int epochs = 3;
  int batch_size = 32;
  double learning_rate = 2e-5;
  int max_length = 0;
  std::optional<std::array<double, kNumSpeculationClasses>> class_weights;
  bool average_relation_span = false;
  double subsample = 1.0;  // fraction of training instances, seeded
  std::filesystem::path train_instances;
  std::filesystem::path parses;  // optional for pooling variants
  std::filesystem::path output_dir;
};

RunConfig parse_run_config(const std::filesystem::path& path);
nlohmann::ordered_json run_config_snapshot(const RunConfig& cfg);

// Trains per the config unless the output directory already holds a manifest
// whose config and input/output digests all match (then the run is skipped).
// Returns the manifest.
nlohmann::ordered_json train_run(const RunConfig& cfg);

void write_predictions(const std::filesystem::path& path, const std::vector<Prediction>& preds);
std::vector<Prediction> read_predictions(const std::filesystem::path& path, Mode* mode_out);

nlohmann::ordered_json predict_run(const std::filesystem::path& checkpoint,
                                   const std::filesystem::path& instances_path,
                                   const std::filesystem::path& parses_path,  // may be empty
                                   const std::filesystem::path& out_path);

// Joins predictions with gold labels; adds the difficulty block when a parse
// cache is supplied.
nlohmann::ordered_json eval_run(const std::filesystem::path& predictions_path,
                                const std::filesystem::path& instances_path,
                                const std::filesystem::path& parses_path);  // may be empty

struct ReproduceRequest {
  int table = 0;          // 2, 4, 5, 6 or 7
  std::string row;        // table 6 only; empty = all keyword rows
  int n_seeds = 3;
  uint64_t base_seed = 42;
  std::filesystem::path lsoie_dir;
  std::filesystem::path parses;
  std::filesystem::path workdir;
  std::string encoder_id;  // required for model rows
  // Training knobs so desk-scale smoke runs are possible (documented
  // deviations are recorded in the emitted report).
  double subsample = 1.0;
  int epochs = 3;
  int batch_size = 32;
  double learning_rate = 2e-5;
  int max_length = 0;
};

nlohmann::ordered_json reproduce_run(const ReproduceRequest& req);

// Instances whose subset is a test (train) split, file order preserved.
std::vector<Instance> filter_test(const std::vector<Instance>& instances);
std::vector<Instance> filter_train(const std::vector<Instance>& instances);

}  // namespace tuplespec
