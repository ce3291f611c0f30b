#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <stdexcept>

namespace gcorr {

/// Simple undirected graph held as a dense 0/1 adjacency matrix with a zero
/// diagonal. Dense storage keeps the spectral code a single code path; the
/// target scale (n up to a few thousand) fits comfortably.
struct Graph {
  Eigen::MatrixXd adjacency;

  std::size_t n() const { return static_cast<std::size_t>(adjacency.rows()); }

  std::size_t edge_count() const {
    return static_cast<std::size_t>(adjacency.sum() / 2.0);
  }
};

/// Validates the Graph invariants; used by parsers and debug checks.
inline void check_graph(const Graph& g) {
  const Eigen::Index n = g.adjacency.rows();
  if (g.adjacency.cols() != n) {
    throw std::invalid_argument("graph: adjacency matrix must be square");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (g.adjacency(i, i) != 0.0) {
      throw std::invalid_argument("graph: self-loops are not allowed");
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = g.adjacency(i, j);
      if (v != 0.0 && v != 1.0) {
        throw std::invalid_argument("graph: entries must be 0 or 1");
      }
      if (v != g.adjacency(j, i)) {
        throw std::invalid_argument("graph: adjacency matrix must be symmetric");
      }
    }
  }
}

}  // namespace gcorr
