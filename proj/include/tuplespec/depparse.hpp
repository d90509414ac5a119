#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "tuplespec/types.hpp"

namespace tuplespec {

struct DependencyArc {
  int head = -1;
  int dep = -1;
  std::string label;
  bool operator==(const DependencyArc&) const = default;
};

// A dependency tree over token indices: one arc per non-root token.
struct DependencyParse {
  int n_tokens = 0;
  std::vector<DependencyArc> arcs;

  // Head index of a token, -1 for the root.
  int head_of(int token) const;
  // Throws DataError unless the arcs form a tree over [0, n_tokens).
  void validate(const std::string& context) const;
};

enum class ArcDirection { HeadOfCenter, DependentOfCenter };

struct NeighborEdge {
  int token = -1;
  std::string label;
  ArcDirection direction = ArcDirection::DependentOfCenter;
};

// One-hop sub-graph around the tuple relation head.
struct Neighborhood {
  int center = -1;
  std::vector<NeighborEdge> neighbors;
};

// The single syntactic head token of the relation span: for a one-token span
// that token, otherwise the span token whose parse head lies outside the span.
// Multiple candidates pick the leftmost (logged); zero candidates mean the
// parse is cyclic inside the span and is an error.
int relation_head(const Instance& instance, const DependencyParse& parse);

// All arcs incident to center, both directions, each with its label.
Neighborhood extract_subgraph(const DependencyParse& parse, int center);

// Fixed default dependency label inventory (45 labels). Checked and reported
// at startup, not silently enforced on parses.
const std::vector<std::string>& default_dep_labels();

// Parse cache: one JSON record per line,
//   {"sentence_id": str, "n_tokens": int, "arcs": [[head, dep, label], ...]}
// Records are validated on read; a token-count mismatch against the instance
// file is reported as an error, never silently realigned.
using ParseMap = std::unordered_map<std::string, DependencyParse>;

void write_parse_cache(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, DependencyParse>>& parses);
ParseMap read_parse_cache(const std::filesystem::path& path);

// One cache-format record from JSON text; n_tokens is inferred from the arc
// indices when absent.
std::pair<std::string, DependencyParse> parse_record_from_jsonl(const std::string& line,
                                                                const std::string& context);

// Looks up the parse for an instance and checks token-count alignment.
const DependencyParse& parse_for(const ParseMap& parses, const Instance& instance);

// Runs an external parser command over every distinct sentence in the
// instance file and writes the parse cache. The command reads JSONL records
// {"sentence_id": str, "tokens": [...]} on stdin and must write JSONL records
// {"sentence_id": str, "arcs": [[head, dep, label], ...]} on stdout, aligned
// to the given tokenization.
struct ParseRunSummary {
  int64_t sentences = 0;
  int64_t parsed = 0;
};
ParseRunSummary run_external_parser(const std::filesystem::path& instances_path,
                                    const std::string& command,
                                    const std::filesystem::path& out_path);

// Validates an externally produced arcs file against the instance file and
// rewrites it as a canonical cache.
ParseRunSummary import_parse_file(const std::filesystem::path& arcs_path,
                                  const std::filesystem::path& instances_path,
                                  const std::filesystem::path& out_path);

}  // namespace tuplespec
