#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcorr/graph.hpp"
#include "gcorr/kernel.hpp"
#include "gcorr/spectral.hpp"

namespace gcorr {

/// U-centered similarity matrix. Every row and column sums to ~0 and the
/// diagonal is exactly zero; see u_center for the defining transform.
struct CenteredMatrix {
  Eigen::MatrixXd values;

  std::size_t n() const { return static_cast<std::size_t>(values.rows()); }
};

namespace detail {

// Neumaier-compensated accumulator; keeps the double sums reproducible to
// well below the 1e-12 contract regardless of future chunking.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

/// U-centering of a symmetric zero-diagonal similarity matrix:
///   out_ij = m_ij - rowsum_i/(n-2) - colsum_j/(n-2) + total/((n-1)(n-2))
/// for i != j, and out_ii = 0. This is the centering that makes the inner
/// product below an unbiased estimator.
inline CenteredMatrix u_center(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw std::invalid_argument("u_center: matrix not square");
  if (n < 4) throw std::invalid_argument("u_center: need n >= 4");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (m(i, i) != 0.0) {
      throw std::invalid_argument("u_center: diagonal must be zero");
    }
  }
  const double nd = static_cast<double>(n);
  const Eigen::VectorXd row_sums = m.rowwise().sum();
  const Eigen::RowVectorXd col_sums = m.colwise().sum();
  const double total = row_sums.sum();

  Eigen::MatrixXd out =
      (m.array() - (row_sums / (nd - 2.0)).replicate(1, n).array() -
       (col_sums / (nd - 2.0)).replicate(n, 1).array() +
       total / ((nd - 1.0) * (nd - 2.0)))
          .matrix();
  out.diagonal().setZero();
  return CenteredMatrix{std::move(out)};
}

/// (A . B) = 1/(n(n-3)) * sum_{i != j} a_ij b_ij.
inline double inner(const CenteredMatrix& a, const CenteredMatrix& b) {
  const Eigen::Index n = a.values.rows();
  if (b.values.rows() != n) {
    throw std::invalid_argument("inner: order mismatch");
  }
  if (n < 4) throw std::invalid_argument("inner: need n >= 4");
  detail::CompensatedSum acc;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      acc.add(a.values(i, j) * b.values(i, j));
    }
  }
  const double nd = static_cast<double>(n);
  return acc.value() / (nd * (nd - 3.0));
}

/// inner(a, b) with b's index set relabeled by perm; used by the permutation
/// test so the centered matrices are built once. Equivalent to permuting the
/// rows of the second sample and recomputing, because U-centering commutes
/// with a joint row/column relabeling.
inline double inner_permuted(const CenteredMatrix& a, const CenteredMatrix& b,
                             const std::vector<std::size_t>& perm) {
  const Eigen::Index n = a.values.rows();
  if (b.values.rows() != n ||
      perm.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("inner_permuted: order mismatch");
  }
  if (n < 4) throw std::invalid_argument("inner_permuted: need n >= 4");
  detail::CompensatedSum acc;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index pi = static_cast<Eigen::Index>(perm[i]);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      acc.add(a.values(i, j) *
              b.values(pi, static_cast<Eigen::Index>(perm[j])));
    }
  }
  const double nd = static_cast<double>(n);
  return acc.value() / (nd * (nd - 3.0));
}

/// Sample statistics of one graph pair at a fixed embedding dimension.
/// degenerate marks a zero variance (e.g. an empty graph), where the
/// correlation is reported as 0 instead of NaN.
struct GraphStat {
  double gcov = 0.0;
  double gvar1 = 0.0;
  double gvar2 = 0.0;
  double gcorr = 0.0;
  std::size_t d = 0;
  bool degenerate = false;
};

/// U-centered Gram matrix of embedding rows. The Gram diagonal is zeroed
/// first; entries are used as-is otherwise (no clipping, which would break
/// the U-statistic identity).
inline CenteredMatrix centered_gram(const Eigen::MatrixXd& rows) {
  Eigen::MatrixXd gram = rows * rows.transpose();
  gram.diagonal().setZero();
  return u_center(gram);
}

inline GraphStat gcov_from_centered(const CenteredMatrix& a,
                                    const CenteredMatrix& b, std::size_t d) {
  GraphStat stat;
  stat.d = d;
  stat.gcov = inner(a, b);
  stat.gvar1 = inner(a, a);
  stat.gvar2 = inner(b, b);
  stat.degenerate = !(stat.gvar1 > 0.0 && stat.gvar2 > 0.0);
  stat.gcorr =
      stat.degenerate ? 0.0 : stat.gcov / std::sqrt(stat.gvar1 * stat.gvar2);
  return stat;
}

inline GraphStat gcov_embeddings(const Embedding& e1, const Embedding& e2) {
  if (e1.n() != e2.n()) {
    throw std::invalid_argument("gcov_embeddings: node-count mismatch");
  }
  return gcov_from_centered(centered_gram(e1.rows), centered_gram(e2.rows),
                            std::max(e1.d(), e2.d()));
}

/// Graph covariance/correlation: ASE both graphs at dimension d, form the
/// estimated kernel matrices (Gram of the embeddings), U-center, and take
/// the inner product.
inline GraphStat gcov_graphs(const Graph& g1, const Graph& g2, std::size_t d) {
  if (g1.n() != g2.n()) {
    throw std::invalid_argument("gcov_graphs: node-count mismatch");
  }
  if (g1.n() < 4) throw std::invalid_argument("gcov_graphs: need n >= 4");
  return gcov_embeddings(ase(g1, d), ase(g2, d));
}

/// Unbiased HSIC on raw latent positions; the population target the graph
/// statistic estimates, used as the reference in the convergence study.
inline double hsic_latent(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                          const KernelSpec& kx, const KernelSpec& ky) {
  if (x.rows() != y.rows()) {
    throw std::invalid_argument("hsic_latent: row-count mismatch");
  }
  if (x.rows() < 4) throw std::invalid_argument("hsic_latent: need n >= 4");
  return inner(u_center(kernel_matrix(kx, x).values),
               u_center(kernel_matrix(ky, y).values));
}

/// Normalized version of hsic_latent in [-1, 1]; 0 when either marginal
/// kernel matrix is degenerate.
inline double hsic_corr_latent(const Eigen::MatrixXd& x,
                               const Eigen::MatrixXd& y, const KernelSpec& kx,
                               const KernelSpec& ky) {
  if (x.rows() != y.rows()) {
    throw std::invalid_argument("hsic_corr_latent: row-count mismatch");
  }
  if (x.rows() < 4) {
    throw std::invalid_argument("hsic_corr_latent: need n >= 4");
  }
  const CenteredMatrix a = u_center(kernel_matrix(kx, x).values);
  const CenteredMatrix b = u_center(kernel_matrix(ky, y).values);
  const double cov = inner(a, b);
  const double va = inner(a, a);
  const double vb = inner(b, b);
  return va > 0.0 && vb > 0.0 ? cov / std::sqrt(va * vb) : 0.0;
}

/// Pairwise Euclidean distance matrix over rows (zero diagonal).
inline Eigen::MatrixXd distance_matrix(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = (points.row(i) - points.row(j)).norm();
      dist(i, j) = v;
      dist(j, i) = v;
    }
  }
  return dist;
}

/// Unbiased sample distance covariance (U-centered Euclidean distances).
inline double dcov_latent(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.rows() != y.rows()) {
    throw std::invalid_argument("dcov_latent: row-count mismatch");
  }
  if (x.rows() < 4) throw std::invalid_argument("dcov_latent: need n >= 4");
  return inner(u_center(distance_matrix(x)), u_center(distance_matrix(y)));
}

namespace detail {

// Symmetrized fourth-order kernel: mean over all 24 orderings (s,t,u,v) of
// the given 4 indices of  k_st l_st + k_st l_uv - 2 k_st l_su.
inline double ustat_kernel_h(const Eigen::MatrixXd& k, const Eigen::MatrixXd& l,
                             std::size_t i, std::size_t j, std::size_t q,
                             std::size_t r) {
  std::array<Eigen::Index, 4> idx = {
      static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j),
      static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(r)};
  std::sort(idx.begin(), idx.end());
  double total = 0.0;
  do {
    const Eigen::Index s = idx[0];
    const Eigen::Index t = idx[1];
    const Eigen::Index u = idx[2];
    const Eigen::Index v = idx[3];
    total += k(s, t) * l(s, t) + k(s, t) * l(u, v) - 2.0 * k(s, t) * l(s, u);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return total / 24.0;
}

inline void check_oracle_input(const Eigen::MatrixXd& k,
                               const Eigen::MatrixXd& l, const char* who) {
  if (k.rows() != k.cols() || l.rows() != l.cols() || k.rows() != l.rows()) {
    throw std::invalid_argument(std::string(who) + ": order mismatch");
  }
  if (k.rows() < 4 || k.rows() > 14) {
    throw std::invalid_argument(std::string(who) +
                                ": n must be in [4, 14] (O(n^4) enumeration)");
  }
}

}  // namespace detail

/// Brute-force U-statistic over all 4-subsets. O(n^4); the independent
/// reference the fast inner/u_center pathway is tested against.
inline double gcov_ustat_oracle(const Eigen::MatrixXd& k,
                                const Eigen::MatrixXd& l) {
  detail::check_oracle_input(k, l, "gcov_ustat_oracle");
  const std::size_t n = static_cast<std::size_t>(k.rows());
  detail::CompensatedSum acc;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t q = j + 1; q < n; ++q) {
        for (std::size_t r = q + 1; r < n; ++r) {
          acc.add(detail::ustat_kernel_h(k, l, i, j, q, r));
        }
      }
    }
  }
  const double nd = static_cast<double>(n);
  const double tuples = nd * (nd - 1.0) * (nd - 2.0) * (nd - 3.0) / 24.0;
  return acc.value() / tuples;
}

/// Asymptotic variance 16 (R - gcov^2) of the U-statistic, with R the mean
/// over i of the squared conditional kernel average over 3-tuples avoiding i.
inline double asymptotic_variance(const Eigen::MatrixXd& k,
                                  const Eigen::MatrixXd& l) {
  detail::check_oracle_input(k, l, "asymptotic_variance");
  const std::size_t n = static_cast<std::size_t>(k.rows());
  const double gcov = inner(u_center(k), u_center(l));

  const double nd = static_cast<double>(n);
  const double triples = (nd - 1.0) * (nd - 2.0) * (nd - 3.0) / 6.0;
  detail::CompensatedSum r_acc;
  for (std::size_t i = 0; i < n; ++i) {
    detail::CompensatedSum cond;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      for (std::size_t q = j + 1; q < n; ++q) {
        if (q == i) continue;
        for (std::size_t r = q + 1; r < n; ++r) {
          if (r == i) continue;
          cond.add(detail::ustat_kernel_h(k, l, i, j, q, r));
        }
      }
    }
    const double mean_i = cond.value() / triples;
    r_acc.add(mean_i * mean_i);
  }
  const double big_r = r_acc.value() / nd;
  return 16.0 * (big_r - gcov * gcov);
}

/// Two-step statistic of the sparse regime: Laplacian spectral embedding of
/// both graphs, then sample distance covariance on the embedding rows.
inline double lse_dcov(const Graph& g1, const Graph& g2, std::size_t d) {
  if (g1.n() != g2.n()) {
    throw std::invalid_argument("lse_dcov: node-count mismatch");
  }
  if (g1.n() < 4) throw std::invalid_argument("lse_dcov: need n >= 4");
  return dcov_latent(lse(g1, d).rows, lse(g2, d).rows);
}

}  // namespace gcorr
