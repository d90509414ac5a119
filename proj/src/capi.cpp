#include "tuplespec/capi.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "tuplespec/corpus.hpp"
#include "tuplespec/depparse.hpp"
#include "tuplespec/errors.hpp"
#include "tuplespec/log.hpp"
#include "tuplespec/model.hpp"
#include "tuplespec/pipeline.hpp"

struct ts_model {
  std::unique_ptr<tuplespec::SpecModel> model;
};

namespace {

constexpr const char* kVersion = "0.1.0";

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ts_rc fail(int code, const std::string& msg) {
  g_last_error = msg;
  return static_cast<ts_rc>(code);
}

// Every entry point funnels through here so exceptions never cross the C
// boundary and the error-code mapping stays in one place.
template <typename Fn>
ts_rc guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    return fn();
  } catch (const tuplespec::Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    return fail(TS_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(TS_ERR_RUNTIME, "unknown error");
  }
}

ts_rc emit_json(const nlohmann::ordered_json& j, char** out_json) {
  if (!out_json) return TS_OK;
  *out_json = dup_string(j.dump(2));
  if (!*out_json) return fail(TS_ERR_RUNTIME, "out of memory");
  return TS_OK;
}

std::string require_arg(const char* s, const char* name) {
  if (!s || !*s)
    throw tuplespec::ConfigError(std::string(name) + " must not be empty");
  return s;
}

std::string optional_arg(const char* s) { return s ? s : ""; }

}  // namespace

extern "C" {

const char* ts_version(void) { return kVersion; }

const char* ts_last_error(void) { return g_last_error.c_str(); }

void ts_string_free(char* s) { std::free(s); }

ts_rc ts_set_log_level(const char* level) {
  return guarded([&]() -> ts_rc {
    std::string lv = require_arg(level, "level");
    if (lv == "quiet") {
      tuplespec::log::set_sink([](tuplespec::log::Level l, const std::string& msg) {
        if (l == tuplespec::log::Level::Error) std::fprintf(stderr, "error: %s\n", msg.c_str());
      });
    } else if (lv == "normal") {
      tuplespec::log::set_sink(nullptr);
      tuplespec::log::set_verbose(false);
    } else if (lv == "verbose") {
      tuplespec::log::set_sink(nullptr);
      tuplespec::log::set_verbose(true);
    } else {
      throw tuplespec::ConfigError("unknown log level '" + lv +
                                   "' (expected quiet, normal or verbose)");
    }
    return TS_OK;
  });
}

ts_rc ts_ingest(const char* lsoie_dir, const char* out_instances, char** out_json) {
  return guarded([&]() -> ts_rc {
    auto res = tuplespec::ingest_run(require_arg(lsoie_dir, "lsoie_dir"),
                                     require_arg(out_instances, "out_instances"));
    auto j = tuplespec::corpus_stats_report(res.stats);
    j["instances_written"] = res.instances_written;
    return emit_json(j, out_json);
  });
}

ts_rc ts_corpus_stats(const char* instances, char** out_json) {
  return guarded([&]() -> ts_rc {
    auto insts = tuplespec::read_instances(require_arg(instances, "instances"));
    return emit_json(tuplespec::corpus_stats_report(tuplespec::corpus_stats(insts)), out_json);
  });
}

ts_rc ts_difficulty_stats(const char* instances, const char* parses, char** out_json) {
  return guarded([&]() -> ts_rc {
    auto insts = tuplespec::read_instances(require_arg(instances, "instances"));
    auto pm = tuplespec::read_parse_cache(require_arg(parses, "parses"));
    return emit_json(tuplespec::difficulty_report(insts, pm), out_json);
  });
}

ts_rc ts_parse_run(const char* instances, const char* command, const char* out_parses,
                   char** out_json) {
  return guarded([&]() -> ts_rc {
    auto summary = tuplespec::run_external_parser(require_arg(instances, "instances"),
                                                  require_arg(command, "command"),
                                                  require_arg(out_parses, "out_parses"));
    return emit_json({{"sentences", summary.sentences}, {"parsed", summary.parsed}}, out_json);
  });
}

ts_rc ts_parse_import(const char* arcs_file, const char* instances, const char* out_parses,
                      char** out_json) {
  return guarded([&]() -> ts_rc {
    auto summary = tuplespec::import_parse_file(require_arg(arcs_file, "arcs_file"),
                                                require_arg(instances, "instances"),
                                                require_arg(out_parses, "out_parses"));
    return emit_json({{"sentences", summary.sentences}, {"parsed", summary.parsed}}, out_json);
  });
}

ts_rc ts_baseline(const char* instances, const char* parses, const char* dict_name,
                  char** out_json) {
  return guarded([&]() -> ts_rc {
    auto j = tuplespec::baseline_run(require_arg(instances, "instances"),
                                     require_arg(parses, "parses"),
                                     require_arg(dict_name, "dict_name"));
    return emit_json(j, out_json);
  });
}

ts_rc ts_train(const char* config_path, char** out_json) {
  return guarded([&]() -> ts_rc {
    auto cfg = tuplespec::parse_run_config(require_arg(config_path, "config_path"));
    return emit_json(tuplespec::train_run(cfg), out_json);
  });
}

ts_rc ts_predict(const char* checkpoint_dir, const char* instances, const char* parses,
                 const char* out_predictions, char** out_json) {
  return guarded([&]() -> ts_rc {
    auto j = tuplespec::predict_run(require_arg(checkpoint_dir, "checkpoint_dir"),
                                    require_arg(instances, "instances"), optional_arg(parses),
                                    require_arg(out_predictions, "out_predictions"));
    return emit_json(j, out_json);
  });
}

ts_rc ts_evaluate(const char* predictions, const char* instances, const char* parses,
                  char** out_json) {
  return guarded([&]() -> ts_rc {
    auto j = tuplespec::eval_run(require_arg(predictions, "predictions"),
                                 require_arg(instances, "instances"), optional_arg(parses));
    return emit_json(j, out_json);
  });
}

ts_rc ts_reproduce(const char* request_json, char** out_json) {
  return guarded([&]() -> ts_rc {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(require_arg(request_json, "request_json"));
    } catch (const nlohmann::json::exception& e) {
      throw tuplespec::ConfigError(std::string("request_json: ") + e.what());
    }
    tuplespec::ReproduceRequest req;
    try {
      for (const auto& [key, value] : j.items()) {
        if (key == "table") req.table = value.get<int>();
        else if (key == "row") req.row = value.get<std::string>();
        else if (key == "n_seeds") req.n_seeds = value.get<int>();
        else if (key == "base_seed") req.base_seed = value.get<uint64_t>();
        else if (key == "lsoie_dir") req.lsoie_dir = value.get<std::string>();
        else if (key == "parses") req.parses = value.get<std::string>();
        else if (key == "workdir") req.workdir = value.get<std::string>();
        else if (key == "encoder_id") req.encoder_id = value.get<std::string>();
        else if (key == "subsample") req.subsample = value.get<double>();
        else if (key == "epochs") req.epochs = value.get<int>();
        else if (key == "batch_size") req.batch_size = value.get<int>();
        else if (key == "learning_rate") req.learning_rate = value.get<double>();
        else if (key == "max_length") req.max_length = value.get<int>();
        else throw tuplespec::ConfigError("request_json: unknown key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw tuplespec::ConfigError(std::string("request_json: ") + e.what());
    }
    return emit_json(tuplespec::reproduce_run(req), out_json);
  });
}

ts_rc ts_model_load(const char* checkpoint_dir, ts_model** out) {
  return guarded([&]() -> ts_rc {
    if (!out) throw tuplespec::ConfigError("out must not be null");
    *out = nullptr;
    auto model = tuplespec::SpecModel::load(require_arg(checkpoint_dir, "checkpoint_dir"));
    *out = new ts_model{std::move(model)};
    return TS_OK;
  });
}

void ts_model_free(ts_model* m) { delete m; }

ts_rc ts_model_describe(const ts_model* m, char** out_json) {
  return guarded([&]() -> ts_rc {
    if (!m) throw tuplespec::ConfigError("model handle must not be null");
    const auto& cfg = m->model->config();
    const auto& enc = m->model->encoder_config();
    nlohmann::ordered_json j;
    j["variant"] = tuplespec::variant_name(cfg.variant);
    j["mode"] = tuplespec::mode_name(cfg.mode);
    j["encoder"] = {{"d_model", enc.d_model},   {"layers", enc.layers},
                    {"heads", enc.heads},       {"d_ff", enc.d_ff},
                    {"vocab_size", enc.vocab_size}, {"max_len", enc.max_len},
                    {"tokenizer", enc.tokenizer}};
    j["n_classes"] = m->model->n_classes();
    j["max_length"] = m->model->effective_max_length();
    j["n_parameters"] = m->model->params().count_scalars();
    return emit_json(j, out_json);
  });
}

ts_rc ts_model_classify(ts_model* m, const char* instance_json, const char* parse_json,
                        char** out_json) {
  return guarded([&]() -> ts_rc {
    if (!m) throw tuplespec::ConfigError("model handle must not be null");
    auto inst = tuplespec::instance_from_jsonl(require_arg(instance_json, "instance_json"),
                                               "instance_json");
    std::optional<tuplespec::DependencyParse> parse;
    if (parse_json && *parse_json) {
      auto [id, p] = tuplespec::parse_record_from_jsonl(parse_json, "parse_json");
      if (!id.empty() && id != inst.sentence_id)
        throw tuplespec::DataError("parse is for sentence " + id + ", instance is " +
                                   inst.sentence_id);
      if (p.n_tokens != static_cast<int>(inst.tokens.size()))
        throw tuplespec::DataError("parse covers " + std::to_string(p.n_tokens) +
                                   " tokens, instance has " +
                                   std::to_string(inst.tokens.size()));
      parse = std::move(p);
    }
    auto pred = m->model->classify(inst, parse ? &*parse : nullptr);
    nlohmann::ordered_json j;
    j["id"] = pred.id;
    j["mode"] = tuplespec::mode_name(pred.mode);
    j["label"] = pred.label;
    j["probs"] = pred.probs;
    return emit_json(j, out_json);
  });
}

}  // extern "C"
