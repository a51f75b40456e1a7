#pragma once

#include <string>

#include "loopsoup/graph_io.hpp"
#include "loopsoup/graph_model.hpp"
#include "loopsoup/green_kernel.hpp"
#include "oracles.hpp"

namespace testing_support {

inline loopsoup::GraphModel g2() { return loopsoup::GraphModel::build(loopsoup::fixture_g2()); }
inline loopsoup::GraphModel t3() { return loopsoup::GraphModel::build(loopsoup::fixture_t3()); }
inline loopsoup::GraphModel p3() { return loopsoup::GraphModel::build(loopsoup::fixture_p3()); }
inline loopsoup::GraphModel pn(std::size_t n) { return loopsoup::GraphModel::build(loopsoup::fixture_pn(n)); }

inline oracle::Dense to_dense(const loopsoup::Matrix& m) {
  oracle::Dense d = oracle::zeros(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
  }
  return d;
}

inline std::vector<double> to_std(const loopsoup::Vector& v) { return {v.data(), v.data() + v.size()}; }

inline std::string fixture_path(const std::string& name) { return std::string(LOOPSOUP_FIXTURE_DIR) + "/" + name; }

}  // namespace testing_support
