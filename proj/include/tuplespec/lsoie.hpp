#pragma once

#include <filesystem>
#include <vector>

#include "tuplespec/types.hpp"

namespace tuplespec {

// Adapter over the LSOIE distribution. All assumptions about the on-disk
// layout live in this header and lsoie.cpp so a format drift needs a one-file
// fix.
//
// Two layouts are accepted, auto-detected per file:
//
// 1. CoNLL layout (*.conll). Blank-line separated blocks, one block per
//    (sentence, tuple) pair. Tab-separated columns per token row:
//
//        word_id  word  pred  pred_id  head_pred_id  sent_id  run_id  label
//
//      - word_id       0-based token index within the sentence
//      - word          surface token
//      - pred          predicate phrase, space-joined; the conversion injects
//                      the question's auxiliary modal as its first word when
//                      the crowd question carried one
//      - pred_id,      head indices of the predicate in the sentence; not
//        head_pred_id  consumed (spans are recomputed from the labels)
//      - sent_id       groups consecutive blocks into one sentence
//      - run_id        annotation run; not consumed
//      - label         BIO tag: P-B/P-I for in-sentence relation words,
//                      <ROLE>-B/<ROLE>-I for arguments (A0, A1, ...), O else
//
//    Tokens must agree across blocks of the same sent_id. The P span must be
//    contiguous and non-empty. Extra columns are ignored with a warning.
//
// 2. JSONL layout (anything whose first non-space byte is '{'). One sentence
//    per line:
//
//        {"sentence_id": str, "tokens": [str, ...],
//         "tuples": [{"relation_tokens": [str, ...], "relation_span": [b, e),
//                     "arguments": [{"role": str, "span": [b, e)}, ...]}, ...]}
//
//    Unknown fields are ignored with a warning.
std::vector<SentenceRecord> load_lsoie(const std::filesystem::path& path, Subset subset);

// Locates the four subset files under a directory. A subset's file is the one
// whose name contains both the domain ("wiki"/"sci") and the split
// ("train"/"test"), e.g. lsoie_wiki_train.conll. Missing subsets are an error.
struct LsoieDirLayout {
  std::filesystem::path wiki_train;
  std::filesystem::path wiki_test;
  std::filesystem::path sci_train;
  std::filesystem::path sci_test;
};
LsoieDirLayout discover_lsoie_dir(const std::filesystem::path& dir);

// Loads all four subsets. Sentence ids are prefixed with the subset name so
// they stay unique across files.
std::vector<SentenceRecord> load_lsoie_subset_files(const LsoieDirLayout& layout);

}  // namespace tuplespec
