#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace loopsoup {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense node index; node names are mapped to indices in input order.
using NodeIndex = std::size_t;
using NodeSet = std::vector<NodeIndex>;

// Reserved name of the cemetery point. Rejected as a node name.
inline constexpr std::string_view kCemeteryName = "DELTA";

struct EdgeSpec {
  std::string u;
  std::string v;
  double c = 0.0;
};

// Declarative description of a graph, as read from the graph JSON schema.
struct GraphSpec {
  std::vector<std::string> nodes;
  std::vector<EdgeSpec> edges;
  std::map<std::string, double> killing;
};

/// Energy form e(f,f) = 1/2 sum C_{x,y}(f^x-f^y)^2 + sum kappa_x (f^x)^2 on a
/// finite connected graph, together with the derived holding rates
/// lambda_x = kappa_x + sum_y C_{x,y} and the lambda-symmetric sub-stochastic
/// transition matrix P^x_y = C_{x,y} / lambda_x.
///
/// Instances are immutable and always valid: symmetric nonnegative
/// conductances with zero diagonal, nonnegative killing that does not vanish
/// identically, and a connected conductance graph.
class GraphModel {
 public:
  // Builds a validated model from node names, undirected weighted edges and a
  // killing map. Zero-weight edges are dropped.
  static GraphModel build(const GraphSpec& spec);

  // Builds a validated model from dense matrices. `conductance` must be
  // symmetric with zero diagonal.
  static GraphModel from_matrices(std::vector<std::string> nodes, Matrix conductance,
                                  Vector killing);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(NodeIndex i) const { return names_.at(i); }
  NodeIndex index_of(std::string_view name) const;
  NodeSet indices_of(std::span<const std::string> names) const;

  const Matrix& conductance() const { return conductance_; }
  const Vector& killing() const { return killing_; }
  const Vector& lambda() const { return lambda_; }
  const Matrix& transition() const { return transition_; }
  double conductance(NodeIndex x, NodeIndex y) const { return conductance_(x, y); }

  bool has_edge(NodeIndex x, NodeIndex y) const { return conductance_(x, y) > 0.0; }
  const std::vector<NodeIndex>& neighbors(NodeIndex x) const { return neighbors_.at(x); }

  // M_lambda - C, the matrix of the energy form.
  Matrix energy_matrix() const;

  // Conductance specification that rebuilds this model.
  GraphSpec to_spec() const;

 private:
  GraphModel(std::vector<std::string> nodes, Matrix conductance, Vector killing);

  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeIndex> index_;
  Matrix conductance_;
  Vector killing_;
  Vector lambda_;
  Matrix transition_;
  std::vector<std::vector<NodeIndex>> neighbors_;
};

// Antisymmetric function on oriented edges (omega^{x,y} = -omega^{y,x}),
// supported on the edges of a model.
class Current {
 public:
  // Zero current on `g`.
  explicit Current(const GraphModel& g);

  // Validates antisymmetry and support.
  Current(const GraphModel& g, Matrix omega);

  // Sets omega^{x,y} = theta and omega^{y,x} = -theta.
  void set(NodeIndex x, NodeIndex y, double theta);

  const Matrix& values() const { return omega_; }
  double operator()(NodeIndex x, NodeIndex y) const { return omega_(x, y); }
  std::size_t size() const { return static_cast<std::size_t>(omega_.rows()); }

 private:
  Matrix support_;
  Matrix omega_;
};

/// e(f,h) = 1/2 sum_{x,y} C_{x,y}(f^x-f^y)(h^x-h^y) + sum_x kappa_x f^x h^x.
double energy_form(const GraphModel& g, const Vector& f, const Vector& h);

// Chain killed at the exit of `subset`: conductances restricted to the subset
// and lambda preserved, the lost edges being absorbed into the killing.
GraphModel restrict_killed(const GraphModel& g, const NodeSet& subset);

// Adds the nonnegative measure `chi` to the killing measure.
GraphModel add_killing(const GraphModel& g, const Vector& chi);

// h-transform: C'_{x,y} = h^x h^y C_{x,y}, kappa'_x = h^x (lambda_x h^x -
// sum_y C_{x,y} h^y). Requires h > 0 with (P-I)h <= 0.
GraphModel h_transform(const GraphModel& g, const Vector& h);

// Sorted, duplicate-free, in-range copy of `set`; throws on bad indices.
NodeSet normalize_set(const NodeSet& set, std::size_t n);

// Indices in [0, n) not in `set`.
NodeSet complement(const NodeSet& set, std::size_t n);

}  // namespace loopsoup
