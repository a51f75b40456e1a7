#include "loopsoup/graph_model.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "loopsoup/errors.hpp"

namespace loopsoup {

namespace {

bool is_connected(const Matrix& c) {
  const auto n = static_cast<std::size_t>(c.rows());
  if (n == 0) return false;
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> todo;
  todo.push(0);
  seen[0] = true;
  std::size_t count = 1;
  while (!todo.empty()) {
    const auto x = todo.front();
    todo.pop();
    for (std::size_t y = 0; y < n; ++y) {
      if (!seen[y] && c(x, y) > 0.0) {
        seen[y] = true;
        ++count;
        todo.push(y);
      }
    }
  }
  return count == n;
}

void check_finite_nonneg(double w, const std::string& what) {
  if (!std::isfinite(w)) throw ValidationError(what + " must be finite");
  if (w < 0.0) throw ValidationError(what + " must be nonnegative");
}

}  // namespace

GraphModel::GraphModel(std::vector<std::string> nodes, Matrix conductance, Vector killing)
    : names_(std::move(nodes)),
      conductance_(std::move(conductance)),
      killing_(std::move(killing)) {
  const auto n = names_.size();
  if (n == 0) throw ValidationError("graph must have at least one node");
  if (static_cast<std::size_t>(conductance_.rows()) != n ||
      static_cast<std::size_t>(conductance_.cols()) != n ||
      static_cast<std::size_t>(killing_.size()) != n) {
    throw DimensionMismatch("conductance/killing dimensions do not match node count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (names_[i].empty()) throw ValidationError("empty node name");
    if (names_[i] == kCemeteryName) {
      throw ValidationError("node name '" + std::string(kCemeteryName) + "' is reserved");
    }
    if (!index_.emplace(names_[i], i).second) {
      throw ValidationError("duplicate node name '" + names_[i] + "'");
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    check_finite_nonneg(killing_(x), "killing at '" + names_[x] + "'");
    if (conductance_(x, x) != 0.0) {
      throw ValidationError("self-loop conductance at '" + names_[x] + "'");
    }
    for (std::size_t y = 0; y < n; ++y) {
      check_finite_nonneg(conductance_(x, y), "conductance");
      if (conductance_(x, y) != conductance_(y, x)) {
        throw ValidationError("conductances must be symmetric ('" + names_[x] + "','" +
                              names_[y] + "')");
      }
    }
  }
  if (!(killing_.array() > 0.0).any()) {
    throw ValidationError("killing measure vanishes identically (recurrent case is not supported)");
  }
  if (!is_connected(conductance_)) throw ValidationError("conductance graph is disconnected");

  lambda_ = killing_ + conductance_.rowwise().sum();
  transition_ = lambda_.cwiseInverse().asDiagonal() * conductance_;
  neighbors_.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (conductance_(x, y) > 0.0) neighbors_[x].push_back(y);
    }
  }
}

GraphModel GraphModel::build(const GraphSpec& spec) {
  const auto n = spec.nodes.size();
  if (n == 0) throw ValidationError("graph must have at least one node");
  std::unordered_map<std::string, NodeIndex> index;
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.nodes[i] == kCemeteryName) {
      throw ValidationError("node name '" + std::string(kCemeteryName) + "' is reserved");
    }
    if (!index.emplace(spec.nodes[i], i).second) {
      throw ValidationError("duplicate node name '" + spec.nodes[i] + "'");
    }
  }
  auto lookup = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw ValidationError("unknown node '" + name + "'");
    return it->second;
  };

  Matrix c = Matrix::Zero(n, n);
  std::set<std::pair<NodeIndex, NodeIndex>> seen;
  for (const auto& e : spec.edges) {
    const auto u = lookup(e.u);
    const auto v = lookup(e.v);
    check_finite_nonneg(e.c, "edge weight ('" + e.u + "','" + e.v + "')");
    if (u == v) throw ValidationError("self-loop edge at '" + e.u + "'");
    if (!seen.emplace(std::min(u, v), std::max(u, v)).second) {
      throw ValidationError("duplicate edge ('" + e.u + "','" + e.v + "')");
    }
    if (e.c == 0.0) continue;
    c(u, v) = e.c;
    c(v, u) = e.c;
  }

  Vector kappa = Vector::Zero(n);
  for (const auto& [name, w] : spec.killing) {
    check_finite_nonneg(w, "killing at '" + name + "'");
    kappa(lookup(name)) = w;
  }
  return GraphModel(spec.nodes, std::move(c), std::move(kappa));
}

GraphModel GraphModel::from_matrices(std::vector<std::string> nodes, Matrix conductance,
                                     Vector killing) {
  return GraphModel(std::move(nodes), std::move(conductance), std::move(killing));
}

NodeIndex GraphModel::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw ValidationError("unknown node '" + std::string(name) + "'");
  return it->second;
}

NodeSet GraphModel::indices_of(std::span<const std::string> names) const {
  NodeSet out;
  out.reserve(names.size());
  for (const auto& s : names) out.push_back(index_of(s));
  return out;
}

Matrix GraphModel::energy_matrix() const {
  Matrix m = -conductance_;
  m.diagonal() += lambda_;
  return m;
}

GraphSpec GraphModel::to_spec() const {
  GraphSpec spec;
  spec.nodes = names_;
  const auto n = size();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      if (conductance_(x, y) > 0.0) spec.edges.push_back({names_[x], names_[y], conductance_(x, y)});
    }
    if (killing_(x) > 0.0) spec.killing[names_[x]] = killing_(x);
  }
  return spec;
}

Current::Current(const GraphModel& g)
    : support_(g.conductance()), omega_(Matrix::Zero(g.size(), g.size())) {}

Current::Current(const GraphModel& g, Matrix omega) : support_(g.conductance()) {
  const auto n = static_cast<Eigen::Index>(g.size());
  if (omega.rows() != n || omega.cols() != n) throw DimensionMismatch("current has wrong shape");
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) {
      if (!std::isfinite(omega(x, y))) throw ValidationError("current must be finite");
      if (omega(x, y) != -omega(y, x)) throw ValidationError("current must be antisymmetric");
      if (omega(x, y) != 0.0 && support_(x, y) <= 0.0) {
        throw ValidationError("current supported outside the edge set");
      }
    }
  }
  omega_ = std::move(omega);
}

void Current::set(NodeIndex x, NodeIndex y, double theta) {
  if (x >= size() || y >= size()) throw ValidationError("current index out of range");
  if (!std::isfinite(theta)) throw ValidationError("current must be finite");
  if (theta != 0.0 && support_(x, y) <= 0.0) {
    throw ValidationError("current supported outside the edge set");
  }
  omega_(x, y) = theta;
  omega_(y, x) = -theta;
}

double energy_form(const GraphModel& g, const Vector& f, const Vector& h) {
  const auto n = static_cast<Eigen::Index>(g.size());
  if (f.size() != n || h.size() != n) throw DimensionMismatch("energy_form: vector size");
  // 1/2 sum C (f^x - f^y)(h^x - h^y) + sum kappa f h == f^T (M_lambda - C) h
  double grad = 0.0;
  const auto& c = g.conductance();
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = x + 1; y < n; ++y) {
      if (c(x, y) > 0.0) grad += c(x, y) * (f(x) - f(y)) * (h(x) - h(y));
    }
  }
  return grad + (g.killing().array() * f.array() * h.array()).sum();
}

NodeSet normalize_set(const NodeSet& set, std::size_t n) {
  NodeSet out(set);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (!out.empty() && out.back() >= n) throw ValidationError("node index out of range");
  return out;
}

NodeSet complement(const NodeSet& set, std::size_t n) {
  const auto s = normalize_set(set, n);
  NodeSet out;
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (j < s.size() && s[j] == i) {
      ++j;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

GraphModel restrict_killed(const GraphModel& g, const NodeSet& subset) {
  const auto d = normalize_set(subset, g.size());
  if (d.empty()) throw ValidationError("restrict_killed: empty subset");
  const auto m = d.size();
  Matrix c(m, m);
  Vector kappa(m);
  std::vector<std::string> names;
  names.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    names.push_back(g.name(d[i]));
    for (std::size_t j = 0; j < m; ++j) c(i, j) = g.conductance(d[i], d[j]);
  }
  for (std::size_t i = 0; i < m; ++i) kappa(i) = g.lambda()(d[i]) - c.row(i).sum();
  // lambda - sum of kept conductances is kappa plus the lost edges; round-off
  // can leave -0 or a few ulps below kappa when nothing was lost.
  for (std::size_t i = 0; i < m; ++i) {
    kappa(i) = std::max(kappa(i), g.killing()(d[i]));
  }
  try {
    return GraphModel::from_matrices(std::move(names), std::move(c), std::move(kappa));
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("restrict_killed: ") + e.what());
  }
}

GraphModel add_killing(const GraphModel& g, const Vector& chi) {
  if (chi.size() != static_cast<Eigen::Index>(g.size())) {
    throw DimensionMismatch("add_killing: chi size");
  }
  for (Eigen::Index i = 0; i < chi.size(); ++i) check_finite_nonneg(chi(i), "chi");
  return GraphModel::from_matrices(g.names(), g.conductance(), g.killing() + chi);
}

GraphModel h_transform(const GraphModel& g, const Vector& h) {
  const auto n = static_cast<Eigen::Index>(g.size());
  if (h.size() != n) throw DimensionMismatch("h_transform: h size");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(h(i) > 0.0) || !std::isfinite(h(i))) {
      throw ValidationError("h_transform: h must be positive and finite");
    }
  }
  const Matrix& c = g.conductance();
  // c (h_x h_y) keeps C' exactly symmetric
  Matrix c2(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) c2(x, y) = c(x, y) * (h(x) * h(y));
  }
  // kappa' = -h (Lh) lambda with L = P - I, i.e. h^x (lambda_x h^x - (C h)^x).
  const Vector ch = c * h;
  Vector kappa2(n);
  for (Eigen::Index x = 0; x < n; ++x) {
    const double lam_h = g.lambda()(x) * h(x);
    double k = h(x) * (lam_h - ch(x));
    const double scale = h(x) * std::max(lam_h, ch(x));
    if (k < 0.0) {
      if (k < -1e-12 * scale) {
        throw ValidationError("h_transform: (P-I)h has a positive entry at '" + g.name(x) + "'");
      }
      k = 0.0;
    }
    kappa2(x) = k;
  }
  return GraphModel::from_matrices(g.names(), std::move(c2), std::move(kappa2));
}

}  // namespace loopsoup
