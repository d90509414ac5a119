#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "tuplespec/types.hpp"

namespace tuplespec {

// If the first token, case-folded, is one of the six modal surface forms,
// returns (that type, remaining tokens); otherwise (NONE, unchanged input).
// A relation consisting solely of a modal has no content word and is a data
// error.
std::pair<SpeculationType, std::vector<std::string>> extract_speculation_label(
    const std::vector<std::string>& relation_tokens);

// Drops sci records whose exact token sequence appears in wiki; wiki records
// are untouched. Output is wiki followed by the filtered sci records.
std::vector<SentenceRecord> deduplicate(const std::vector<SentenceRecord>& wiki,
                                        const std::vector<SentenceRecord>& sci);

// One Instance per tuple, gold labels populated via extract_speculation_label.
// Extraction failures are rethrown with the offending sentence and tuple named.
std::vector<Instance> build_instances(const std::vector<SentenceRecord>& records);

CorpusStats corpus_stats(const std::vector<Instance>& instances);

// Canonical instance file: one JSON record per line, UTF-8, field order fixed:
// sentence_id, subset, tokens, relation_span, clean_relation, modal, arguments,
// gold_type, gold_binary.
void write_instances(const std::filesystem::path& path, const std::vector<Instance>& instances);
std::vector<Instance> read_instances(const std::filesystem::path& path);

std::string instance_to_jsonl(const Instance& inst);

// One canonical-format record from JSON text. Reads the optional
// "tuple_index" field (default 0); read_instances assigns file order instead.
Instance instance_from_jsonl(const std::string& line, const std::string& context);

}  // namespace tuplespec
