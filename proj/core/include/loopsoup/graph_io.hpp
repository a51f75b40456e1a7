#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loopsoup/erasure_wilson.hpp"
#include "loopsoup/loop_measure.hpp"
#include "loopsoup/loop_soup.hpp"

namespace loopsoup {

// Parses the graph JSON schema
//   {"format_version": 1, "nodes": [...], "edges": [{"u","v","c"}], "killing": {...}}
// ("format_version" optional). Unknown keys, duplicate edges, a missing
// killing map and the reserved name DELTA are rejected. Errors carry the
// source name and, for syntax errors, the line and column.
GraphSpec parse_graph_json(const std::string& text, const std::string& source = "<string>");
GraphModel load_graph(const std::string& path);

std::string graph_to_json(const GraphModel& g);

// Built-in fixtures: G2, P3, T3, and PN(N) (path 1..N, unit conductances,
// killing 1 at node 1).
GraphSpec fixture_g2();
GraphSpec fixture_p3();
GraphSpec fixture_t3();
GraphSpec fixture_pn(std::size_t n);

// Matrix with node-name headers, 17 significant digits.
std::string matrix_to_csv(const std::vector<std::string>& names, const Matrix& m);

// One JSON object per line: {"cycle": [...], "weight": w}.
std::string loop_classes_to_jsonl(const GraphModel& g, const std::vector<WeightedLoopClass>& classes);

// Header line with alpha, seed, mode, eps and trivial occupation, then one
// line per nontrivial loop {"cycle": [...], "holding": [...]} and one per
// resolved one-point loop.
std::string soup_to_jsonl(const GraphModel& g, const LoopSoup& soup, std::uint64_t seed);

// {"format_version": 1, "parent": {"a": "b", "b": "DELTA"}}.
std::string tree_to_json(const GraphModel& g, const SpanningTree& t);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace loopsoup
