#include "loopsoup/graph_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "loopsoup/errors.hpp"

namespace loopsoup {

using nlohmann::json;

namespace {

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

double weight(const json& v, const std::string& what) {
  if (!v.is_number()) throw ValidationError(what + " must be a number");
  return v.get<double>();
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

GraphSpec parse_graph_json(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(source + ": " + line_column(text, e.byte) + ": malformed JSON");
  }
  try {
    if (!j.is_object()) throw ValidationError("top level must be an object");
    for (const auto& [key, value] : j.items()) {
      if (key != "nodes" && key != "edges" && key != "killing" && key != "format_version") {
        throw ValidationError("unknown key '" + key + "'");
      }
    }
    if (j.contains("format_version") && j["format_version"] != 1) {
      throw ValidationError("unsupported format_version");
    }
    if (!j.contains("nodes") || !j["nodes"].is_array()) throw ValidationError("'nodes' must be an array");
    if (!j.contains("edges") || !j["edges"].is_array()) throw ValidationError("'edges' must be an array");
    if (!j.contains("killing")) throw ValidationError("missing 'killing' map (kappa = 0 is not allowed)");
    if (!j["killing"].is_object()) throw ValidationError("'killing' must be an object");

    GraphSpec spec;
    for (const auto& v : j["nodes"]) {
      if (!v.is_string()) throw ValidationError("node names must be strings");
      spec.nodes.push_back(v.get<std::string>());
    }
    std::set<std::pair<std::string, std::string>> seen;
    std::size_t idx = 0;
    for (const auto& e : j["edges"]) {
      const std::string where = "edge #" + std::to_string(idx++);
      if (!e.is_object()) throw ValidationError(where + " must be an object");
      for (const auto& [key, value] : e.items()) {
        if (key != "u" && key != "v" && key != "c") throw ValidationError(where + ": unknown key '" + key + "'");
      }
      if (!e.contains("u") || !e.contains("v") || !e.contains("c") || !e["u"].is_string() ||
          !e["v"].is_string()) {
        throw ValidationError(where + " needs string 'u', 'v' and numeric 'c'");
      }
      EdgeSpec es{e["u"].get<std::string>(), e["v"].get<std::string>(), weight(e["c"], where + ".c")};
      auto key = std::minmax(es.u, es.v);
      if (!seen.insert({key.first, key.second}).second) {
        throw ValidationError(where + ": duplicate edge '" + es.u + "'-'" + es.v + "'");
      }
      spec.edges.push_back(std::move(es));
    }
    for (const auto& [name, value] : j["killing"].items()) {
      spec.killing[name] = weight(value, "killing['" + name + "']");
    }
    return spec;
  } catch (const json::exception& e) {
    throw ValidationError(source + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

GraphModel load_graph(const std::string& path) {
  const auto spec = parse_graph_json(read_file(path), path);
  try {
    return GraphModel::build(spec);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string graph_to_json(const GraphModel& g) {
  const auto spec = g.to_spec();
  json j;
  j["format_version"] = 1;
  j["nodes"] = spec.nodes;
  auto edges = json::array();
  for (const auto& e : spec.edges) edges.push_back({{"u", e.u}, {"v", e.v}, {"c", e.c}});
  j["edges"] = std::move(edges);
  json k = json::object();
  for (const auto& [name, w] : spec.killing) k[name] = w;
  j["killing"] = std::move(k);
  return j.dump(2) + "\n";
}

GraphSpec fixture_g2() { return {{"a", "b"}, {{"a", "b", 1.0}}, {{"a", 1.0}, {"b", 1.0}}}; }

GraphSpec fixture_p3() { return {{"1", "2", "3"}, {{"1", "2", 1.0}, {"2", "3", 1.0}}, {{"1", 1.0}}}; }

GraphSpec fixture_t3() {
  return {{"1", "2", "3"},
          {{"1", "2", 1.0}, {"2", "3", 1.0}, {"1", "3", 1.0}},
          {{"1", 1.0}, {"2", 1.0}, {"3", 1.0}}};
}

GraphSpec fixture_pn(std::size_t n) {
  if (n < 2) throw ValidationError("PN(N) needs N >= 2");
  GraphSpec s;
  for (std::size_t i = 1; i <= n; ++i) s.nodes.push_back(std::to_string(i));
  for (std::size_t i = 1; i < n; ++i) s.edges.push_back({std::to_string(i), std::to_string(i + 1), 1.0});
  s.killing["1"] = 1.0;
  return s;
}

std::string matrix_to_csv(const std::vector<std::string>& names, const Matrix& m) {
  if (static_cast<Eigen::Index>(names.size()) != m.rows() || m.rows() != m.cols()) {
    throw DimensionMismatch("matrix_to_csv: header size");
  }
  std::ostringstream os;
  os << "node";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << names[i];
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << ',' << format_number(m(i, j));
    os << '\n';
  }
  return os.str();
}

std::string loop_classes_to_jsonl(const GraphModel& g, const std::vector<WeightedLoopClass>& classes) {
  std::string out;
  for (const auto& c : classes) {
    json j;
    auto cyc = json::array();
    for (auto x : c.loop.cycle()) cyc.push_back(g.name(x));
    j["cycle"] = std::move(cyc);
    j["weight"] = c.weight;
    out += j.dump() + "\n";
  }
  return out;
}

std::string soup_to_jsonl(const GraphModel& g, const LoopSoup& soup, std::uint64_t seed) {
  json header;
  header["format_version"] = 1;
  header["alpha"] = soup.alpha;
  header["seed"] = seed;
  header["mode"] = soup.mode == TrivialMode::Aggregate ? "aggregate" : "resolved";
  if (soup.mode == TrivialMode::Resolved) header["eps"] = soup.eps;
  json occ = json::object();
  for (std::size_t x = 0; x < g.size(); ++x) occ[g.name(x)] = soup.trivial_occupation(x);
  header["trivialOcc"] = std::move(occ);
  std::string out = header.dump() + "\n";
  for (const auto& l : soup.loops) {
    json j;
    auto cyc = json::array();
    for (auto x : l.visits) cyc.push_back(g.name(x));
    j["cycle"] = std::move(cyc);
    j["holding"] = l.holding;
    out += j.dump() + "\n";
  }
  for (const auto& t : soup.trivial_loops) {
    json j;
    j["cycle"] = json::array({g.name(t.node)});
    j["holding"] = json::array({t.holding});
    out += j.dump() + "\n";
  }
  return out;
}

std::string tree_to_json(const GraphModel& g, const SpanningTree& t) {
  json j;
  j["format_version"] = 1;
  json p = json::object();
  for (std::size_t x = 0; x < t.parent.size(); ++x) {
    p[g.name(x)] = t.parent[x] == kCemetery ? std::string(kCemeteryName) : g.name(t.parent[x]);
  }
  j["parent"] = std::move(p);
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path + ": cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot write file");
  out << content;
  if (!out) throw Error(path + ": write failed");
}

}  // namespace loopsoup
