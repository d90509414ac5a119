#include "tuplespec/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "tuplespec/cues.hpp"
#include "tuplespec/errors.hpp"
#include "tuplespec/log.hpp"
#include "tuplespec/lsoie.hpp"
#include "tuplespec/reference.hpp"
#include "tuplespec/util.hpp"

namespace tuplespec {

using util::iso8601_now;
using util::round1;
using util::sha256_file;
using util::sha256_hex;
using util::write_file;

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json score_json(const Score& s) {
  return {{"precision", round1(s.precision)}, {"recall", round1(s.recall)}, {"f1", round1(s.f1)}};
}

ordered_json file_entry(const std::filesystem::path& path) {
  return {{"path", path.string()}, {"sha256", sha256_file(path)}};
}

// kind-<seed|rowtag>-<config hash> keeps run ids stable across reruns.
std::string run_id(const std::string& kind, const ordered_json& config) {
  return kind + "-" + sha256_hex(config.dump()).substr(0, 12);
}

ordered_json make_manifest(const std::string& kind, const ordered_json& config,
                           const ordered_json& inputs, const ordered_json& outputs,
                           const std::vector<uint64_t>& seeds, double seconds) {
  ordered_json m;
  m["run_id"] = run_id(kind, config);
  m["kind"] = kind;
  m["created"] = iso8601_now();
  m["config"] = config;
  m["inputs"] = inputs;
  m["seeds"] = seeds;
  m["outputs"] = outputs;
  m["timing_seconds"] = seconds;
  m["skipped"] = false;
  return m;
}

// A stage is up to date when its manifest records the same config, the same
// input digests, and all outputs still exist with their recorded digests.
bool stage_up_to_date(const std::filesystem::path& manifest_path, const ordered_json& config,
                      const ordered_json& inputs, ordered_json* manifest_out) {
  std::ifstream in(manifest_path);
  if (!in) return false;
  ordered_json m;
  try {
    in >> m;
  } catch (const nlohmann::json::exception&) {
    return false;
  }
  if (m.value("config", ordered_json()) != config) return false;
  if (m.value("inputs", ordered_json()) != inputs) return false;
  // Bound to a named value: items() holds a reference to its json object, so
  // iterating a temporary would dangle.
  const ordered_json outputs = m.value("outputs", ordered_json::object());
  for (const auto& [name, entry] : outputs.items()) {
    std::filesystem::path p(entry.value("path", ""));
    if (!std::filesystem::exists(p)) return false;
    if (entry.contains("sha256") && sha256_file(p) != entry["sha256"].get<std::string>())
      return false;
  }
  if (manifest_out) *manifest_out = m;
  return true;
}

void write_manifest(const std::filesystem::path& path, const ordered_json& manifest) {
  write_file(path, manifest.dump(2) + "\n");
}

struct Cell {
  std::string name;
  double reference;
  double value;
  std::optional<double> tolerance;
};

ordered_json cells_json(const std::vector<Cell>& cells, bool* all_ok) {
  auto arr = ordered_json::array();
  bool ok = true;
  for (const auto& c : cells) {
    ordered_json j;
    j["name"] = c.name;
    j["reference"] = c.reference;
    j["value"] = round1(c.value);
    j["delta"] = round1(c.value - c.reference);
    if (c.tolerance) {
      j["tolerance"] = *c.tolerance;
      bool within = std::abs(c.value - c.reference) <= *c.tolerance;
      j["within"] = within;
      ok = ok && within;
    } else {
      j["tolerance"] = nullptr;
      j["within"] = nullptr;
    }
    arr.push_back(std::move(j));
  }
  if (all_ok) *all_ok = ok;
  return arr;
}

// 1% relative tolerance for count cells.
std::optional<double> rel1(double reference) { return 0.01 * reference; }

// Reference tables carry lowercase row names; report keys are uppercase.
std::string upper_ascii(std::string s) {
  for (char& c : s)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  return s;
}

}  // namespace

IngestResult ingest_run(const std::filesystem::path& lsoie_dir,
                        const std::filesystem::path& out_instances) {
  auto layout = discover_lsoie_dir(lsoie_dir);
  ordered_json config = {{"stage", "ingest"}, {"lsoie_dir", lsoie_dir.string()}};
  ordered_json inputs;
  inputs["wiki_train"] = file_entry(layout.wiki_train);
  inputs["wiki_test"] = file_entry(layout.wiki_test);
  inputs["sci_train"] = file_entry(layout.sci_train);
  inputs["sci_test"] = file_entry(layout.sci_test);

  auto manifest_path = out_instances.string() + ".manifest.json";
  if (stage_up_to_date(manifest_path, config, inputs, nullptr)) {
    log::info("ingest: " + out_instances.string() + " is up to date, skipping");
    IngestResult res;
    auto instances = read_instances(out_instances);
    res.stats = corpus_stats(instances);
    res.instances_written = static_cast<int64_t>(instances.size());
    return res;
  }

  auto t0 = std::chrono::steady_clock::now();
  auto records = load_lsoie_subset_files(layout);
  std::vector<SentenceRecord> wiki, sci;
  for (auto& rec : records) {
    if (rec.subset == Subset::WikiTrain || rec.subset == Subset::WikiTest)
      wiki.push_back(std::move(rec));
    else
      sci.push_back(std::move(rec));
  }
  auto kept = deduplicate(wiki, sci);
  auto instances = build_instances(kept);
  if (out_instances.has_parent_path())
    std::filesystem::create_directories(out_instances.parent_path());
  write_instances(out_instances, instances);
  auto t1 = std::chrono::steady_clock::now();

  IngestResult res;
  res.stats = corpus_stats(instances);
  res.instances_written = static_cast<int64_t>(instances.size());

  ordered_json outputs;
  outputs["instances"] = file_entry(out_instances);
  auto manifest = make_manifest("ingest", config, inputs, outputs, {},
                                std::chrono::duration<double>(t1 - t0).count());
  manifest["stats"] = corpus_stats_report(res.stats);
  write_manifest(manifest_path, manifest);
  return res;
}

ordered_json corpus_stats_report(const CorpusStats& stats) {
  ordered_json j;
  auto block = [](const SubsetCounts& c) {
    return ordered_json{{"sentences", c.sentences},
                        {"tuples", c.tuples},
                        {"speculative", c.speculative},
                        {"speculative_pct", round1(c.speculative_pct())}};
  };
  ordered_json by_subset;
  for (Subset s : {Subset::WikiTest, Subset::WikiTrain, Subset::SciTest, Subset::SciTrain})
    by_subset[subset_name(s)] = block(stats.counts(s));
  j["by_subset"] = std::move(by_subset);
  j["total"] = block(stats.total);
  return j;
}

std::vector<DifficultyLevel> difficulty_levels(const std::vector<Instance>& speculative,
                                               const ParseMap& parses) {
  std::vector<DifficultyLevel> levels;
  levels.reserve(speculative.size());
  for (const auto& inst : speculative) {
    const auto& parse = parse_for(parses, inst);
    levels.push_back(classify_difficulty(inst, relation_head(inst, parse)));
  }
  return levels;
}

ordered_json difficulty_report(const std::vector<Instance>& instances, const ParseMap& parses) {
  std::vector<Instance> spec;
  for (const auto& inst : instances)
    if (inst.gold_type != SpeculationType::None) spec.push_back(inst);
  auto levels = difficulty_levels(spec, parses);
  auto stats = difficulty_stats(spec, levels);

  auto pct_block = [](const LevelCounts& c) {
    return ordered_json{{"n_speculative", c.total()},
                        {"easy_pct", round1(c.pct(DifficultyLevel::Easy))},
                        {"medium_pct", round1(c.pct(DifficultyLevel::Medium))},
                        {"hard_pct", round1(c.pct(DifficultyLevel::Hard))}};
  };
  ordered_json j;
  ordered_json by_subset;
  for (Subset s : {Subset::WikiTest, Subset::WikiTrain, Subset::SciTest, Subset::SciTrain})
    by_subset[subset_name(s)] = pct_block(stats.by_subset[static_cast<size_t>(s)]);
  j["by_subset"] = std::move(by_subset);

  ordered_json by_type;
  for (int t = 1; t < kNumSpeculationClasses; ++t) {
    const auto& c = stats.by_type[static_cast<size_t>(t) - 1];
    ordered_json tj;
    tj["easy_n"] = c.n[0];
    tj["easy_pct"] = round1(c.pct(DifficultyLevel::Easy));
    tj["medium_n"] = c.n[1];
    tj["medium_pct"] = round1(c.pct(DifficultyLevel::Medium));
    tj["hard_n"] = c.n[2];
    tj["hard_pct"] = round1(c.pct(DifficultyLevel::Hard));
    tj["total"] = c.total();
    by_type[speculation_type_name(static_cast<SpeculationType>(t))] = std::move(tj);
  }
  j["by_type"] = std::move(by_type);
  j["total"] = pct_block(stats.total);
  return j;
}

ordered_json eval_report_json(const EvalReport& report, const ordered_json& config_snapshot) {
  ordered_json j;
  j["config"] = config_snapshot;
  j["mode"] = report.multiclass ? "multiclass" : "binary";
  j["n_instances"] = report.n_instances;
  j["macro"] = score_json(report.macro);
  j["positive"] = score_json(report.positive);
  j["negative"] = score_json(report.negative);
  if (report.multiclass) {
    ordered_json per_class;
    for (int c = 0; c < kNumSpeculationClasses; ++c) {
      auto block = score_json(report.per_class[static_cast<size_t>(c)]);
      block["gold"] = report.class_gold_counts[static_cast<size_t>(c)];
      per_class[speculation_type_name(static_cast<SpeculationType>(c))] = std::move(block);
    }
    j["per_class"] = std::move(per_class);
  }
  if (report.has_difficulty) {
    ordered_json diff;
    for (auto level : {DifficultyLevel::Easy, DifficultyLevel::Medium, DifficultyLevel::Hard}) {
      size_t d = static_cast<size_t>(level);
      diff[difficulty_name(level)] = ordered_json{
          {"recall", round1(report.recall_by_difficulty[d])},
          {"gold", report.difficulty_gold_counts[d]}};
    }
    j["difficulty"] = std::move(diff);
  }
  return j;
}

namespace {

// Without parses there is no difficulty information at all; an empty column
// keeps the difficulty block out of the report instead of tripping the
// scorer's missing-level validation.
std::vector<std::optional<DifficultyLevel>> difficulty_column(
    const std::vector<Instance>& instances, const ParseMap* parses) {
  if (!parses) return {};
  std::vector<std::optional<DifficultyLevel>> out(instances.size());
  for (size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    if (inst.gold_type == SpeculationType::None) continue;
    const auto& parse = parse_for(*parses, inst);
    out[i] = classify_difficulty(inst, relation_head(inst, parse));
  }
  return out;
}

EvalReport baseline_eval(const std::vector<Instance>& instances, const ParseMap& parses,
                         const CueDictionary& dict) {
  std::vector<int> preds, golds;
  preds.reserve(instances.size());
  golds.reserve(instances.size());
  for (const auto& inst : instances) {
    const auto& parse = parse_for(parses, inst);
    auto neigh = extract_subgraph(parse, relation_head(inst, parse));
    preds.push_back(keyword_match_classify(neigh, inst.tokens, dict) ? 1 : 0);
    golds.push_back(inst.gold_binary);
  }
  return score_binary(preds, golds, difficulty_column(instances, &parses));
}

EvalReport evaluate_predictions(const std::vector<Prediction>& preds, Mode mode,
                                const std::vector<Instance>& instances, const ParseMap* parses) {
  std::map<std::string, const Prediction*> by_id;
  for (const auto& p : preds) {
    if (!by_id.emplace(p.id, &p).second)
      throw DataError("duplicate prediction for instance " + p.id);
  }
  if (by_id.size() != instances.size())
    throw DataError("prediction file has " + std::to_string(by_id.size()) +
                    " instances, gold file has " + std::to_string(instances.size()));
  std::vector<int> pred_col, gold_col;
  pred_col.reserve(instances.size());
  gold_col.reserve(instances.size());
  for (const auto& inst : instances) {
    auto it = by_id.find(inst.id());
    if (it == by_id.end()) throw DataError("no prediction for instance " + inst.id());
    pred_col.push_back(it->second->label);
    gold_col.push_back(mode == Mode::Binary ? inst.gold_binary
                                            : static_cast<int>(inst.gold_type));
  }
  auto difficulties = difficulty_column(instances, parses);
  return mode == Mode::Binary ? score_binary(pred_col, gold_col, difficulties)
                              : score_multiclass(pred_col, gold_col, difficulties);
}

}  // namespace

ordered_json baseline_run(const std::filesystem::path& instances_path,
                          const std::filesystem::path& parses_path,
                          const std::string& dict_name) {
  auto instances = read_instances(instances_path);
  auto parses = read_parse_cache(parses_path);
  auto dict = cue_dictionary_by_name(dict_name);
  auto report = baseline_eval(instances, parses, dict);

  ordered_json config;
  config["baseline"] = dict_name;
  config["dictionary_size"] = dict.entries.size();
  auto cues = ordered_json::array();
  for (const auto& e : dict.entries) cues.push_back(e.cue);
  config["cues"] = std::move(cues);
  config["instances"] = instances_path.string();
  config["parses"] = parses_path.string();
  return eval_report_json(report, config);
}

RunConfig parse_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
  static const std::set<std::string> known = {
      "seed",          "variant",       "mode",          "encoder_id",
      "epochs",        "batch_size",    "learning_rate", "max_length",
      "class_weights", "average_relation_span",          "subsample",
      "train_instances", "parses",      "output_dir"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key))
      throw ConfigError(path.string() + ": unknown config key '" + key + "'");
  }
  RunConfig cfg;
  try {
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("variant")) cfg.variant = variant_from_name(j["variant"].get<std::string>());
    if (j.contains("mode")) cfg.mode = mode_from_name(j["mode"].get<std::string>());
    if (!j.contains("encoder_id"))
      throw ConfigError(path.string() + ": encoder_id is required");
    cfg.encoder_id = j["encoder_id"].get<std::string>();
    if (j.contains("epochs")) cfg.epochs = j["epochs"].get<int>();
    if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<int>();
    if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("max_length")) cfg.max_length = j["max_length"].get<int>();
    if (j.contains("class_weights") && !j["class_weights"].is_null()) {
      auto w = j["class_weights"].get<std::vector<double>>();
      if (w.size() != kNumSpeculationClasses)
        throw ConfigError(path.string() + ": class_weights needs exactly " +
                          std::to_string(kNumSpeculationClasses) + " entries");
      std::array<double, kNumSpeculationClasses> arr{};
      std::copy(w.begin(), w.end(), arr.begin());
      cfg.class_weights = arr;
    }
    if (j.contains("average_relation_span"))
      cfg.average_relation_span = j["average_relation_span"].get<bool>();
    if (j.contains("subsample")) cfg.subsample = j["subsample"].get<double>();
    if (!j.contains("train_instances"))
      throw ConfigError(path.string() + ": train_instances is required");
    cfg.train_instances = j["train_instances"].get<std::string>();
    if (j.contains("parses")) cfg.parses = j["parses"].get<std::string>();
    if (!j.contains("output_dir"))
      throw ConfigError(path.string() + ": output_dir is required");
    cfg.output_dir = j["output_dir"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (cfg.subsample <= 0.0 || cfg.subsample > 1.0)
    throw ConfigError(path.string() + ": subsample must be in (0, 1]");
  return cfg;
}

ordered_json run_config_snapshot(const RunConfig& cfg) {
  ordered_json j;
  j["seed"] = cfg.seed;
  j["variant"] = variant_name(cfg.variant);
  j["mode"] = mode_name(cfg.mode);
  j["encoder_id"] = cfg.encoder_id;
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["learning_rate"] = cfg.learning_rate;
  j["max_length"] = cfg.max_length;
  if (cfg.class_weights) {
    j["class_weights"] = std::vector<double>(cfg.class_weights->begin(),
                                             cfg.class_weights->end());
  } else {
    j["class_weights"] = nullptr;
  }
  j["average_relation_span"] = cfg.average_relation_span;
  j["subsample"] = cfg.subsample;
  j["train_instances"] = cfg.train_instances.string();
  j["parses"] = cfg.parses.string();
  j["output_dir"] = cfg.output_dir.string();
  return j;
}

namespace {

// Seeded subsample: shuffle a copy of the index space, keep the first
// ceil(fraction*n), restore corpus order.
std::vector<Instance> subsample_instances(const std::vector<Instance>& instances,
                                          double fraction, uint64_t seed) {
  if (fraction >= 1.0) return instances;
  std::vector<size_t> idx(instances.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  size_t keep = static_cast<size_t>(
      std::ceil(fraction * static_cast<double>(instances.size())));
  keep = std::max<size_t>(1, std::min(keep, instances.size()));
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  std::vector<Instance> out;
  out.reserve(keep);
  for (size_t i : idx) out.push_back(instances[i]);
  return out;
}

}  // namespace

ordered_json train_run(const RunConfig& cfg) {
  auto snapshot = run_config_snapshot(cfg);
  if (!std::filesystem::exists(cfg.train_instances))
    throw DataError("train_instances not found: " + cfg.train_instances.string());
  ordered_json inputs;
  inputs["train_instances"] = file_entry(cfg.train_instances);
  if (!cfg.parses.empty()) {
    if (!std::filesystem::exists(cfg.parses))
      throw DataError("parses not found: " + cfg.parses.string());
    inputs["parses"] = file_entry(cfg.parses);
  }

  auto manifest_path = cfg.output_dir / "manifest.json";
  ordered_json existing;
  if (stage_up_to_date(manifest_path, snapshot, inputs, &existing)) {
    log::info("train: " + cfg.output_dir.string() + " is up to date, skipping");
    existing["skipped"] = true;
    return existing;
  }

  auto t0 = std::chrono::steady_clock::now();
  auto instances = read_instances(cfg.train_instances);
  instances = subsample_instances(instances, cfg.subsample, cfg.seed);
  log::info("training on " + std::to_string(instances.size()) + " instances");

  std::optional<ParseMap> parses;
  if (!cfg.parses.empty()) parses = read_parse_cache(cfg.parses);

  ModelConfig mc;
  mc.variant = cfg.variant;
  mc.mode = cfg.mode;
  mc.encoder_id = cfg.encoder_id;
  mc.max_length = cfg.max_length;
  mc.average_relation_span = cfg.average_relation_span;
  SpecModel model(mc, cfg.seed);

  TrainConfig tc;
  tc.seed = cfg.seed;
  tc.epochs = cfg.epochs;
  tc.batch_size = cfg.batch_size;
  tc.learning_rate = cfg.learning_rate;
  tc.class_weights = cfg.class_weights;
  auto logs = model.train(instances, parses ? &*parses : nullptr, tc);

  std::filesystem::create_directories(cfg.output_dir);
  auto checkpoint_dir = cfg.output_dir / "checkpoint";
  model.save(checkpoint_dir);

  ordered_json log_json;
  auto epochs = ordered_json::array();
  for (const auto& el : logs) {
    epochs.push_back({{"epoch", el.epoch},
                      {"mean_loss", el.mean_loss},
                      {"train_accuracy", el.train_accuracy},
                      {"seconds", el.seconds}});
  }
  log_json["epochs"] = std::move(epochs);
  auto train_log_path = cfg.output_dir / "train_log.json";
  write_file(train_log_path, log_json.dump(2) + "\n");
  auto t1 = std::chrono::steady_clock::now();

  ordered_json outputs;
  outputs["model"] = file_entry(checkpoint_dir / "model.json");
  outputs["weights"] = file_entry(checkpoint_dir / "weights.bin");
  outputs["train_log"] = file_entry(train_log_path);
  auto manifest = make_manifest("train", snapshot, inputs, outputs, {cfg.seed},
                                std::chrono::duration<double>(t1 - t0).count());
  write_manifest(manifest_path, manifest);
  return manifest;
}

void write_predictions(const std::filesystem::path& path,
                       const std::vector<Prediction>& preds) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write predictions: " + path.string());
  for (const auto& p : preds) {
    ordered_json j;
    j["id"] = p.id;
    j["mode"] = mode_name(p.mode);
    j["label"] = p.label;
    j["probs"] = p.probs;
    out << j.dump() << "\n";
  }
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path, Mode* mode_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open predictions: " + path.string());
  std::vector<Prediction> preds;
  std::string line;
  int64_t lineno = 0;
  std::optional<Mode> mode;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string context = path.string() + ":" + std::to_string(lineno);
    try {
      auto j = nlohmann::json::parse(line);
      Prediction p;
      p.id = j.at("id").get<std::string>();
      p.mode = mode_from_name(j.at("mode").get<std::string>());
      p.label = j.at("label").get<int>();
      p.probs = j.at("probs").get<std::vector<double>>();
      if (!mode) mode = p.mode;
      if (*mode != p.mode) throw DataError(context + ": mixed prediction modes");
      preds.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(context + ": " + e.what());
    }
  }
  if (preds.empty()) throw DataError(path.string() + " holds no predictions");
  if (mode_out) *mode_out = *mode;
  return preds;
}

ordered_json predict_run(const std::filesystem::path& checkpoint,
                         const std::filesystem::path& instances_path,
                         const std::filesystem::path& parses_path,
                         const std::filesystem::path& out_path) {
  ordered_json config = {{"stage", "predict"}, {"checkpoint", checkpoint.string()}};
  ordered_json inputs;
  inputs["weights"] = file_entry(checkpoint / "weights.bin");
  inputs["instances"] = file_entry(instances_path);
  if (!parses_path.empty()) inputs["parses"] = file_entry(parses_path);

  auto manifest_path = out_path.string() + ".manifest.json";
  ordered_json existing;
  if (stage_up_to_date(manifest_path, config, inputs, &existing)) {
    log::info("predict: " + out_path.string() + " is up to date, skipping");
    existing["skipped"] = true;
    return existing;
  }

  auto t0 = std::chrono::steady_clock::now();
  auto model = SpecModel::load(checkpoint);
  auto instances = read_instances(instances_path);
  std::optional<ParseMap> parses;
  if (!parses_path.empty()) parses = read_parse_cache(parses_path);
  auto preds = model->predict_batch(instances, parses ? &*parses : nullptr);
  write_predictions(out_path, preds);
  auto t1 = std::chrono::steady_clock::now();

  ordered_json outputs;
  outputs["predictions"] = file_entry(out_path);
  auto manifest = make_manifest("predict", config, inputs, outputs, {},
                                std::chrono::duration<double>(t1 - t0).count());
  manifest["n_predictions"] = preds.size();
  manifest["variant"] = variant_name(model->config().variant);
  manifest["mode"] = mode_name(model->config().mode);
  write_manifest(manifest_path, manifest);
  return manifest;
}

ordered_json eval_run(const std::filesystem::path& predictions_path,
                      const std::filesystem::path& instances_path,
                      const std::filesystem::path& parses_path) {
  Mode mode = Mode::Binary;
  auto preds = read_predictions(predictions_path, &mode);
  auto instances = read_instances(instances_path);
  std::optional<ParseMap> parses;
  if (!parses_path.empty()) parses = read_parse_cache(parses_path);
  auto report = evaluate_predictions(preds, mode, instances, parses ? &*parses : nullptr);

  ordered_json config;
  config["predictions"] = predictions_path.string();
  config["instances"] = instances_path.string();
  config["parses"] = parses_path.string();
  return eval_report_json(report, config);
}

std::vector<Instance> filter_test(const std::vector<Instance>& instances) {
  std::vector<Instance> out;
  for (const auto& inst : instances)
    if (inst.subset == Subset::WikiTest || inst.subset == Subset::SciTest) out.push_back(inst);
  return out;
}

std::vector<Instance> filter_train(const std::vector<Instance>& instances) {
  std::vector<Instance> out;
  for (const auto& inst : instances)
    if (inst.subset == Subset::WikiTrain || inst.subset == Subset::SciTrain)
      out.push_back(inst);
  return out;
}

namespace {

// Shared setup for reproduction presets: ingest into the workdir and split.
struct ReproData {
  std::filesystem::path instances;
  std::filesystem::path train_instances;
  std::filesystem::path test_instances;
  CorpusStats stats;
};

ReproData prepare_repro_data(const ReproduceRequest& req, bool need_split) {
  if (req.lsoie_dir.empty())
    throw ConfigError("reproduce needs --lsoie pointing at the dataset directory");
  if (req.workdir.empty()) throw ConfigError("reproduce needs --workdir");
  std::filesystem::create_directories(req.workdir);
  ReproData data;
  data.instances = req.workdir / "instances.jsonl";
  auto res = ingest_run(req.lsoie_dir, data.instances);
  data.stats = res.stats;
  if (need_split) {
    auto all = read_instances(data.instances);
    data.train_instances = req.workdir / "train_instances.jsonl";
    data.test_instances = req.workdir / "test_instances.jsonl";
    write_instances(data.train_instances, filter_train(all));
    write_instances(data.test_instances, filter_test(all));
  }
  return data;
}

ordered_json repro_header(const ReproduceRequest& req, const std::string& preset) {
  ordered_json j;
  j["preset"] = preset;
  ordered_json settings;
  settings["lsoie_dir"] = req.lsoie_dir.string();
  settings["workdir"] = req.workdir.string();
  if (!req.parses.empty()) settings["parses"] = req.parses.string();
  if (!req.encoder_id.empty()) settings["encoder_id"] = req.encoder_id;
  if (req.subsample < 1.0) settings["subsample"] = req.subsample;
  j["settings"] = std::move(settings);
  return j;
}

ordered_json reproduce_corpus_table(const ReproduceRequest& req) {
  auto data = prepare_repro_data(req, false);
  auto j = repro_header(req, "table2");
  j["report"] = corpus_stats_report(data.stats);

  std::vector<Cell> cells;
  auto add_row = [&](const ref::CorpusRow& r, const SubsetCounts& c) {
    std::string p(r.subset);
    cells.push_back({p + ".sentences", r.sentences, static_cast<double>(c.sentences),
                     rel1(r.sentences)});
    cells.push_back({p + ".tuples", r.tuples, static_cast<double>(c.tuples), rel1(r.tuples)});
    cells.push_back({p + ".speculative", r.speculative, static_cast<double>(c.speculative),
                     rel1(r.speculative)});
    cells.push_back({p + ".speculative_pct", r.spec_pct, c.speculative_pct(), 1.0});
  };
  for (const auto& r : ref::kCorpusTable) {
    if (std::string(r.subset) == "total") {
      add_row(r, data.stats.total);
    } else {
      add_row(r, data.stats.counts(subset_from_name(r.subset)));
    }
  }
  bool ok = false;
  j["cells"] = cells_json(cells, &ok);
  j["all_within_tolerance"] = ok;
  return j;
}

ordered_json reproduce_difficulty_tables(const ReproduceRequest& req, int table) {
  if (req.parses.empty())
    throw ConfigError("reproduce --table " + std::to_string(table) +
                      " needs --parses (run `tuplespec parse` first)");
  auto data = prepare_repro_data(req, false);
  auto instances = read_instances(data.instances);
  auto parses = read_parse_cache(req.parses);
  auto report = difficulty_report(instances, parses);

  auto j = repro_header(req, "table" + std::to_string(table));
  j["report"] = report;
  std::vector<Cell> cells;
  if (table == 4) {
    for (const auto& r : ref::kDifficultyBySubset) {
      std::string name(r.subset);
      const auto& block = name == "total" ? report["total"] : report["by_subset"][name];
      cells.push_back({name + ".n_speculative", r.n_spec,
                       block["n_speculative"].get<double>(), rel1(r.n_spec)});
      cells.push_back({name + ".easy_pct", r.easy_pct, block["easy_pct"].get<double>(), 2.0});
      cells.push_back(
          {name + ".medium_pct", r.medium_pct, block["medium_pct"].get<double>(), 2.0});
      cells.push_back({name + ".hard_pct", r.hard_pct, block["hard_pct"].get<double>(), 2.0});
    }
  } else {
    for (const auto& r : ref::kDifficultyByType) {
      std::string name(r.type);
      const auto& block = report["by_type"][upper_ascii(name)];
      cells.push_back({name + ".total", r.total, block["total"].get<double>(), rel1(r.total)});
      // Per-class percentage cells: only the hard share is checked; the
      // printed easy/medium cells carry a known misprint for `can`.
      cells.push_back(
          {name + ".easy_pct", r.easy_pct, block["easy_pct"].get<double>(), std::nullopt});
      cells.push_back(
          {name + ".medium_pct", r.medium_pct, block["medium_pct"].get<double>(), std::nullopt});
      cells.push_back({name + ".hard_pct", r.hard_pct, block["hard_pct"].get<double>(), 3.0});
    }
  }
  bool ok = false;
  j["cells"] = cells_json(cells, &ok);
  j["all_within_tolerance"] = ok;
  return j;
}

std::vector<Cell> binary_row_cells(const ref::BinaryResultRow& ref_row, const EvalReport& rep,
                                   double macro_tol, double pos_tol,
                                   std::optional<double> recall_tol,
                                   const std::string& prefix) {
  std::vector<Cell> cells;
  auto opt = [](double t) { return std::optional<double>(t); };
  cells.push_back({prefix + "macro_p", ref_row.macro_p, rep.macro.precision, std::nullopt});
  cells.push_back({prefix + "macro_r", ref_row.macro_r, rep.macro.recall, std::nullopt});
  cells.push_back({prefix + "macro_f1", ref_row.macro_f1, rep.macro.f1, opt(macro_tol)});
  cells.push_back({prefix + "pos_p", ref_row.pos_p, rep.positive.precision, std::nullopt});
  cells.push_back({prefix + "pos_r", ref_row.pos_r, rep.positive.recall, std::nullopt});
  cells.push_back({prefix + "pos_f1", ref_row.pos_f1, rep.positive.f1, opt(pos_tol)});
  cells.push_back(
      {prefix + "recall_easy", ref_row.recall_easy, rep.recall_by_difficulty[0], recall_tol});
  cells.push_back({prefix + "recall_medium", ref_row.recall_medium, rep.recall_by_difficulty[1],
                   recall_tol});
  cells.push_back(
      {prefix + "recall_hard", ref_row.recall_hard, rep.recall_by_difficulty[2], recall_tol});
  return cells;
}

bool is_keyword_row(const std::string& row) {
  return row == "modal" || row == "top10" || row == "top20" || row == "top30";
}

// The published row names use a hyphen; config values use the variant names.
std::string normalize_row(std::string row) {
  std::replace(row.begin(), row.end(), '-', '_');
  return row;
}

struct SeedScores {
  EvalReport report;
};

EvalReport average_reports(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw RuntimeFailure("no seed reports to average");
  EvalReport avg = reports.front();
  auto acc_score = [](Score& dst, const Score& src) {
    dst.precision += src.precision;
    dst.recall += src.recall;
    dst.f1 += src.f1;
  };
  for (size_t i = 1; i < reports.size(); ++i) {
    const auto& r = reports[i];
    acc_score(avg.macro, r.macro);
    acc_score(avg.positive, r.positive);
    acc_score(avg.negative, r.negative);
    for (size_t c = 0; c < avg.per_class.size(); ++c)
      acc_score(avg.per_class[c], r.per_class[c]);
    for (size_t d = 0; d < 3; ++d) avg.recall_by_difficulty[d] += r.recall_by_difficulty[d];
  }
  double n = static_cast<double>(reports.size());
  auto div_score = [n](Score& s) {
    s.precision /= n;
    s.recall /= n;
    s.f1 /= n;
  };
  div_score(avg.macro);
  div_score(avg.positive);
  div_score(avg.negative);
  for (auto& s : avg.per_class) div_score(s);
  for (size_t d = 0; d < 3; ++d) avg.recall_by_difficulty[d] /= n;
  return avg;
}

EvalReport run_model_row(const ReproduceRequest& req, const ReproData& data, Variant variant,
                         Mode mode, uint64_t seed, const std::string& row_tag) {
  RunConfig cfg;
  cfg.seed = seed;
  cfg.variant = variant;
  cfg.mode = mode;
  cfg.encoder_id = req.encoder_id;
  cfg.epochs = req.epochs;
  cfg.batch_size = req.batch_size;
  cfg.learning_rate = req.learning_rate;
  cfg.max_length = req.max_length;
  cfg.subsample = req.subsample;
  cfg.train_instances = data.train_instances;
  cfg.parses = req.parses;
  cfg.output_dir = req.workdir / "runs" / row_tag / ("seed" + std::to_string(seed));
  train_run(cfg);

  auto preds_path = cfg.output_dir / "predictions.jsonl";
  predict_run(cfg.output_dir / "checkpoint", data.test_instances, req.parses, preds_path);

  Mode pred_mode = Mode::Binary;
  auto preds = read_predictions(preds_path, &pred_mode);
  auto test_instances = read_instances(data.test_instances);
  auto parses = read_parse_cache(req.parses);
  return evaluate_predictions(preds, pred_mode, test_instances, &parses);
}

ordered_json reproduce_binary_table(const ReproduceRequest& req) {
  auto row = normalize_row(req.row);
  auto j = repro_header(req, "table6");

  if (row.empty() || is_keyword_row(row)) {
    if (req.parses.empty()) throw ConfigError("reproduce --table 6 needs --parses");
    auto data = prepare_repro_data(req, true);
    auto test_instances = read_instances(data.test_instances);
    auto parses = read_parse_cache(req.parses);
    std::vector<std::string> rows =
        row.empty() ? std::vector<std::string>{"modal", "top10", "top20", "top30"}
                    : std::vector<std::string>{row};
    j["row"] = row.empty() ? "keyword_matching" : row;
    std::vector<Cell> cells;
    for (const auto& r : rows) {
      auto report = baseline_eval(test_instances, parses, cue_dictionary_by_name(r));
      const auto* ref_row = ref::find_binary_result(r);
      auto row_cells = binary_row_cells(*ref_row, report, 2.0, 2.0, std::optional<double>(2.0),
                                        r + ".");
      cells.insert(cells.end(), row_cells.begin(), row_cells.end());
    }
    bool ok = false;
    j["cells"] = cells_json(cells, &ok);
    j["all_within_tolerance"] = ok;
    return j;
  }

  const auto* ref_row = ref::find_binary_result(row);
  if (!ref_row)
    throw ConfigError("unknown table 6 row '" + req.row +
                      "' (expected modal, top10, top20, top30 or a variant name)");
  if (req.encoder_id.empty())
    throw ConfigError("reproduce --table 6 --row " + row + " needs --encoder");
  if (req.parses.empty()) throw ConfigError("reproduce --table 6 needs --parses");
  auto data = prepare_repro_data(req, true);
  Variant variant = variant_from_name(row);

  std::vector<EvalReport> reports;
  std::vector<uint64_t> seeds;
  for (int i = 0; i < req.n_seeds; ++i) {
    uint64_t seed = req.base_seed + static_cast<uint64_t>(i);
    seeds.push_back(seed);
    reports.push_back(run_model_row(req, data, variant, Mode::Binary, seed, row));
  }
  auto avg = average_reports(reports);

  j["row"] = row;
  j["seeds"] = seeds;
  auto cells = binary_row_cells(*ref_row, avg, 2.0, 3.0, std::nullopt, "");
  bool ok = false;
  j["cells"] = cells_json(cells, &ok);
  j["all_within_tolerance"] = ok;
  return j;
}

ordered_json reproduce_multiclass_table(const ReproduceRequest& req) {
  if (req.encoder_id.empty()) throw ConfigError("reproduce --table 7 needs --encoder");
  if (req.parses.empty()) throw ConfigError("reproduce --table 7 needs --parses");
  auto data = prepare_repro_data(req, true);

  std::vector<EvalReport> reports;
  std::vector<uint64_t> seeds;
  for (int i = 0; i < req.n_seeds; ++i) {
    uint64_t seed = req.base_seed + static_cast<uint64_t>(i);
    seeds.push_back(seed);
    reports.push_back(
        run_model_row(req, data, Variant::OieSpec, Mode::Multiclass, seed, "multiclass"));
  }
  auto avg = average_reports(reports);

  auto j = repro_header(req, "table7");
  j["seeds"] = seeds;
  std::vector<Cell> cells;
  for (const auto& r : ref::kMulticlassResults) {
    std::string name(r.name);
    Score s;
    double gold = 0;
    if (name == "non_spec") {
      s = avg.per_class[0];
      gold = static_cast<double>(reports.front().class_gold_counts[0]);
    } else if (name == "spec") {
      s = avg.positive;
      gold = static_cast<double>(reports.front().n_instances -
                                 reports.front().class_gold_counts[0]);
    } else {
      auto type = static_cast<size_t>(speculation_type_from_name(upper_ascii(name)));
      s = avg.per_class[type];
      gold = static_cast<double>(reports.front().class_gold_counts[type]);
    }
    std::optional<double> f1_tol;
    if (name == "non_spec") f1_tol = 2.0;
    if (name == "spec") f1_tol = 4.0;
    cells.push_back({name + ".n", r.n, gold, rel1(r.n)});
    cells.push_back({name + ".precision", r.precision, s.precision, std::nullopt});
    cells.push_back({name + ".recall", r.recall, s.recall, std::nullopt});
    cells.push_back({name + ".f1", r.f1, s.f1, f1_tol});
  }
  bool ok = false;
  j["cells"] = cells_json(cells, &ok);
  j["all_within_tolerance"] = ok;
  return j;
}

}  // namespace

ordered_json reproduce_run(const ReproduceRequest& req) {
  switch (req.table) {
    case 2: return reproduce_corpus_table(req);
    case 4:
    case 5: return reproduce_difficulty_tables(req, req.table);
    case 6: return reproduce_binary_table(req);
    case 7: return reproduce_multiclass_table(req);
    default:
      throw ConfigError("no reproduction preset for table " + std::to_string(req.table) +
                        " (available: 2, 4, 5, 6, 7)");
  }
}

}  // namespace tuplespec
