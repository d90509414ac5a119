#ifndef TUPLESPEC_CAPI_H
#define TUPLESPEC_CAPI_H

/* C interface to the tuplespec shared library. Every entry point returns a
 * ts_rc; on failure ts_last_error() describes what went wrong. Strings
 * returned through out-parameters are heap copies the caller releases with
 * ts_string_free. The functions are thread-compatible: distinct handles may
 * be used from distinct threads, one handle must not be shared without
 * external locking. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ts_rc {
  TS_OK = 0,
  TS_ERR_CONFIG = 2,  /* bad flags, config keys, unknown names */
  TS_ERR_DATA = 3,    /* malformed or inconsistent input files */
  TS_ERR_RUNTIME = 4  /* internal failures: I/O, numerics, subprocesses */
} ts_rc;

/* Library version, static storage. */
const char* ts_version(void);

/* Message of the last failing call on this thread, empty string if none.
 * Valid until the next ts_* call on the same thread. */
const char* ts_last_error(void);

void ts_string_free(char* s);

/* Mirror warnings/errors (and, with verbose, info) to stderr. Levels:
 * "quiet", "normal", "verbose". */
ts_rc ts_set_log_level(const char* level);

/* ---- corpus pipeline ------------------------------------------------- */

/* Load the four LSOIE subset files under lsoie_dir, dedup, extract labels,
 * write the canonical instance file. *out_json receives the corpus
 * statistics report. */
ts_rc ts_ingest(const char* lsoie_dir, const char* out_instances, char** out_json);

/* Statistics report for an existing instance file. */
ts_rc ts_corpus_stats(const char* instances, char** out_json);

/* Difficulty breakdown (per subset and per class) over the speculative
 * instances; needs a parse cache covering their sentences. */
ts_rc ts_difficulty_stats(const char* instances, const char* parses, char** out_json);

/* Run an external dependency parser command over the distinct sentences of
 * an instance file and write a validated parse cache. The command reads
 * JSONL {"sentence_id", "tokens"} on stdin and writes JSONL
 * {"sentence_id", "arcs": [[head, dep, label], ...]} on stdout. */
ts_rc ts_parse_run(const char* instances, const char* command, const char* out_parses,
                   char** out_json);

/* Validate an externally produced arcs file against an instance file and
 * rewrite it as a canonical parse cache. */
ts_rc ts_parse_import(const char* arcs_file, const char* instances, const char* out_parses,
                      char** out_json);

/* ---- baselines, training, evaluation ---------------------------------- */

/* Keyword-matching baseline over an instance file. dict_name is one of
 * "modal", "top10", "top20", "top30". *out_json receives the eval report. */
ts_rc ts_baseline(const char* instances, const char* parses, const char* dict_name,
                  char** out_json);

/* Train per a JSON run config file; see the documented config keys. Skipped
 * when the output manifest already matches the config and input digests.
 * *out_json receives the run manifest. */
ts_rc ts_train(const char* config_path, char** out_json);

/* Classify an instance file with a saved checkpoint; writes a JSONL
 * prediction file. parses may be NULL or empty for pooling-only variants.
 * *out_json receives the run manifest. */
ts_rc ts_predict(const char* checkpoint_dir, const char* instances, const char* parses,
                 const char* out_predictions, char** out_json);

/* Score a prediction file against gold labels. parses may be NULL or empty;
 * when given, the report includes recall by difficulty. */
ts_rc ts_evaluate(const char* predictions, const char* instances, const char* parses,
                  char** out_json);

/* Reproduction preset. request_json keys: table (2, 4, 5, 6 or 7), and the
 * optional row, n_seeds, base_seed, lsoie_dir, parses, workdir, encoder_id,
 * subsample, epochs, batch_size, learning_rate, max_length. *out_json
 * receives the per-cell comparison report. */
ts_rc ts_reproduce(const char* request_json, char** out_json);

/* ---- single-tuple classification -------------------------------------- */

/* A loaded model checkpoint. */
typedef struct ts_model ts_model;

ts_rc ts_model_load(const char* checkpoint_dir, ts_model** out);
void ts_model_free(ts_model* m);

/* Variant and mode names plus dimensions, as JSON. */
ts_rc ts_model_describe(const ts_model* m, char** out_json);

/* Classify one tuple. instance_json is a canonical instance record;
 * parse_json is a parse-cache record for its sentence, NULL only for
 * variants that do not consume the dependency graph. *out_json receives
 * {"id", "mode", "label", "probs"}. */
ts_rc ts_model_classify(ts_model* m, const char* instance_json, const char* parse_json,
                        char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* TUPLESPEC_CAPI_H */
