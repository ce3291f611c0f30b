#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcorr/graph.hpp"
#include "gcorr/rng.hpp"

namespace gcorr {

/// Above this order the full symmetric solver is replaced by an iterative
/// top-k solver (restarted Krylov, tolerance 1e-10, at most 10n iterations).
inline constexpr std::size_t kDenseSolverLimit = 3000;

/// Eigenvalues sorted descending by absolute value.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  std::size_t n = 0;
};

enum class EmbeddingKind { kAse, kLse };

/// Spectral embedding: row i is the position of node i. Rows are determined
/// only up to orthogonal transforms, so consumers must use rows * rows^T.
struct Embedding {
  Eigen::MatrixXd rows;
  Eigen::VectorXd retained_eigenvalues;
  EmbeddingKind kind = EmbeddingKind::kAse;

  std::size_t n() const { return static_cast<std::size_t>(rows.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(rows.cols()); }

  Eigen::MatrixXd gram() const { return rows * rows.transpose(); }

  /// Keeps the leading d dimensions (the d largest-magnitude eigenpairs).
  Embedding truncated(std::size_t new_d) const {
    if (new_d < 1 || new_d > d()) {
      throw std::invalid_argument("Embedding::truncated: bad dimension");
    }
    const Eigen::Index dd = static_cast<Eigen::Index>(new_d);
    return Embedding{rows.leftCols(dd), retained_eigenvalues.head(dd), kind};
  }
};

/// Eigenpairs of a symmetric matrix sorted descending by |eigenvalue|.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  std::size_t count() const {
    return static_cast<std::size_t>(eigenvalues.size());
  }
};

namespace detail {

inline SpectralDecomposition sort_by_magnitude(const Eigen::VectorXd& values,
                                               const Eigen::MatrixXd& vectors) {
  std::vector<Eigen::Index> order(values.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     return std::abs(values[a]) > std::abs(values[b]);
                   });
  Eigen::VectorXd sorted_values(values.size());
  Eigen::MatrixXd sorted_vectors(vectors.rows(), vectors.cols());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    sorted_values[i] = values[order[i]];
    sorted_vectors.col(i) = vectors.col(order[i]);
  }
  return SpectralDecomposition{std::move(sorted_values),
                               std::move(sorted_vectors)};
}

inline SpectralDecomposition sym_eig_dense(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("sym_eig_dense: eigen-solver did not converge");
  }
  return sort_by_magnitude(solver.eigenvalues(), solver.eigenvectors());
}

// Lanczos with full reorthogonalization for the k largest-magnitude
// eigenpairs. Both spectrum ends are extremal for the Krylov projection, so
// plain Lanczos covers the largest |eigenvalue| pairs. Breakdown (invariant
// subspace found) is handled by injecting a fresh orthogonal start vector;
// the projected matrix then becomes block-tridiagonal with a zero coupling,
// which the dense solve on it handles as-is.
inline SpectralDecomposition sym_eig_lanczos(const Eigen::MatrixXd& m,
                                             std::size_t k) {
  const Eigen::Index n = m.rows();
  const std::size_t want = std::min<std::size_t>(k, static_cast<std::size_t>(n));
  const double tol = 1e-10;
  const std::size_t max_iter = 10 * static_cast<std::size_t>(n);

  std::vector<Eigen::VectorXd> basis;
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[j] couples basis columns j and j+1

  auto reorthogonalize = [&basis](Eigen::VectorXd& w) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const Eigen::VectorXd& v : basis) w -= v.dot(w) * v;
    }
  };

  RandomStream stream(0x9bd7a5c3u);
  auto fresh_direction = [&]() {
    Eigen::VectorXd v(n);
    for (int attempt = 0; attempt < 64; ++attempt) {
      for (Eigen::Index i = 0; i < n; ++i) v[i] = stream.normal();
      reorthogonalize(v);
      const double norm = v.norm();
      if (norm > 1e-8) return Eigen::VectorXd(v / norm);
    }
    throw std::runtime_error("sym_eig_lanczos: cannot extend basis");
  };

  auto ritz_pairs = [&]() {
    const Eigen::Index size = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(size, size);
    for (Eigen::Index i = 0; i < size; ++i) {
      t(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < size) {
        t(i, i + 1) = beta[static_cast<std::size_t>(i)];
        t(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("sym_eig_lanczos: projected solve failed");
    }
    return sort_by_magnitude(solver.eigenvalues(), solver.eigenvectors());
  };

  auto assemble = [&](const SpectralDecomposition& r) {
    const Eigen::Index size = static_cast<Eigen::Index>(basis.size());
    const Eigen::Index avail =
        std::min<Eigen::Index>(static_cast<Eigen::Index>(want), size);
    Eigen::MatrixXd b(n, size);
    for (Eigen::Index i = 0; i < size; ++i) {
      b.col(i) = basis[static_cast<std::size_t>(i)];
    }
    Eigen::MatrixXd vectors = b * r.eigenvectors.leftCols(avail);
    return SpectralDecomposition{r.eigenvalues.head(avail),
                                 std::move(vectors)};
  };

  basis.push_back(fresh_direction());
  std::size_t iterations = 0;
  while (true) {
    Eigen::VectorXd w = m * basis.back();
    ++iterations;
    alpha.push_back(basis.back().dot(w));
    // full reorthogonalization subsumes the classical two-term recurrence
    reorthogonalize(w);
    const double b_norm = w.norm();
    const std::size_t size = basis.size();

    if (size >= want) {
      const SpectralDecomposition r = ritz_pairs();
      const double scale = std::max(1.0, std::abs(r.eigenvalues[0]));
      bool converged = true;
      for (std::size_t i = 0; i < want; ++i) {
        const double resid = std::abs(
            b_norm * r.eigenvectors(static_cast<Eigen::Index>(size - 1),
                                    static_cast<Eigen::Index>(i)));
        if (resid > tol * scale) {
          converged = false;
          break;
        }
      }
      // a full basis spans the whole space, so its projection is exact
      if (converged || size == static_cast<std::size_t>(n)) {
        return assemble(r);
      }
    }
    if (iterations >= max_iter) {
      throw std::runtime_error("sym_eig_lanczos: no convergence within 10n");
    }
    if (b_norm < 1e-12) {
      basis.push_back(fresh_direction());
      beta.push_back(0.0);
    } else {
      basis.push_back(w / b_norm);
      beta.push_back(b_norm);
    }
  }
}

}  // namespace detail

/// Eigendecomposition of a symmetric matrix, sorted descending by |eigenvalue|.
/// top = 0 requests the full spectrum where the dense solver applies; above
/// kDenseSolverLimit a leading chunk is computed instead (64 pairs or n-1,
/// whichever is smaller).
inline SpectralDecomposition spectral_decomposition(const Eigen::MatrixXd& m,
                                                    std::size_t top = 0) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("spectral_decomposition: matrix not square");
  }
  const std::size_t n = static_cast<std::size_t>(m.rows());
  if (n == 0) throw std::invalid_argument("spectral_decomposition: empty");
  if (top > n) throw std::invalid_argument("spectral_decomposition: top > n");
  if (n <= kDenseSolverLimit) {
    return detail::sym_eig_dense(m);
  }
  std::size_t k = top == 0 ? std::min<std::size_t>(n - 1, 64) : top;
  return detail::sym_eig_lanczos(m, k);
}

inline Spectrum spectrum_from(const SpectralDecomposition& dec,
                              std::size_t n) {
  return Spectrum{dec.eigenvalues, n};
}

/// rows = U_d diag(|lambda|)^{1/2} over the decomposition's leading d pairs.
/// |lambda| keeps rows real when retained eigenvalues are negative.
inline Embedding embedding_from(const SpectralDecomposition& dec,
                                std::size_t d, EmbeddingKind kind) {
  if (d < 1 || d > dec.count()) {
    throw std::invalid_argument("embedding_from: bad dimension");
  }
  const Eigen::Index dd = static_cast<Eigen::Index>(d);
  const Eigen::VectorXd scale =
      dec.eigenvalues.head(dd).cwiseAbs().cwiseSqrt();
  Eigen::MatrixXd rows = dec.eigenvectors.leftCols(dd) * scale.asDiagonal();
  return Embedding{std::move(rows), dec.eigenvalues.head(dd), kind};
}

/// Adjacency spectral embedding of g onto the d largest-magnitude eigenpairs.
inline Embedding ase(const Graph& g, std::size_t d) {
  const std::size_t n = g.n();
  if (d < 1 || d > n) {
    throw std::invalid_argument("ase: need 1 <= d <= n");
  }
  return embedding_from(spectral_decomposition(g.adjacency, d), d,
                        EmbeddingKind::kAse);
}

/// L(M) = D^{-1/2} M D^{-1/2} with D = diag(M 1). Zero-degree rows/columns
/// map to zero (0^{-1/2} * 0 := 0), so isolated nodes embed at the origin.
inline Eigen::MatrixXd normalized_laplacian(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("normalized_laplacian: matrix not square");
  }
  if (m.size() > 0 && m.minCoeff() < 0.0) {
    throw std::invalid_argument("normalized_laplacian: negative entries");
  }
  const Eigen::VectorXd degrees = m.rowwise().sum();
  Eigen::VectorXd inv_sqrt(degrees.size());
  for (Eigen::Index i = 0; i < degrees.size(); ++i) {
    inv_sqrt[i] = degrees[i] > 0.0 ? 1.0 / std::sqrt(degrees[i]) : 0.0;
  }
  Eigen::MatrixXd lap =
      inv_sqrt.asDiagonal() * m * inv_sqrt.asDiagonal();
  // kill round-off asymmetry so downstream solvers see an exactly
  // symmetric matrix
  lap = ((lap + lap.transpose()) * 0.5).eval();
  return lap;
}

/// Laplacian spectral embedding: ASE construction on normalized_laplacian(A).
inline Embedding lse(const Graph& g, std::size_t d) {
  const std::size_t n = g.n();
  if (d < 1 || d > n) {
    throw std::invalid_argument("lse: need 1 <= d <= n");
  }
  return embedding_from(
      spectral_decomposition(normalized_laplacian(g.adjacency), d), d,
      EmbeddingKind::kLse);
}

inline Embedding embed(const Graph& g, std::size_t d, EmbeddingKind kind) {
  return kind == EmbeddingKind::kAse ? ase(g, d) : lse(g, d);
}

enum class DimensionMethod { kProfileLikelihood, kThreshold };

inline DimensionMethod dimension_method_from_string(const std::string& name) {
  if (name == "profile-likelihood") return DimensionMethod::kProfileLikelihood;
  if (name == "threshold") return DimensionMethod::kThreshold;
  throw std::invalid_argument("unknown dimension method: " + name);
}

/// Consistency of the embedding needs d small relative to n / log n, so every
/// selection is capped at min(n - 1, floor(n / log n)).
inline std::size_t dimension_cap(std::size_t n) {
  if (n < 2) return 1;
  const double nd = static_cast<double>(n);
  const std::size_t rate_cap =
      static_cast<std::size_t>(std::floor(nd / std::log(nd)));
  return std::max<std::size_t>(1, std::min(n - 1, rate_cap));
}

/// Picks the embedding dimension from the spectrum's magnitude profile.
///
/// ProfileLikelihood: two-group Gaussian profile likelihood over the split
/// point (Zhu-Ghodsi elbow), ties broken toward the smaller dimension.
/// Threshold: counts magnitudes above 2 sqrt(n log n), floored at 1.
inline std::size_t select_dimension(const Spectrum& spectrum,
                                    DimensionMethod method, std::size_t n) {
  const Eigen::Index len = spectrum.eigenvalues.size();
  if (len == 0) {
    throw std::invalid_argument("select_dimension: empty spectrum");
  }
  const Eigen::VectorXd mags = spectrum.eigenvalues.cwiseAbs();
  const std::size_t cap = dimension_cap(n);

  if (method == DimensionMethod::kThreshold) {
    const double cutoff =
        2.0 * std::sqrt(static_cast<double>(n) *
                        std::log(static_cast<double>(n)));
    std::size_t d = 0;
    for (Eigen::Index i = 0; i < len; ++i) {
      if (mags[i] > cutoff) ++d;
    }
    return std::clamp<std::size_t>(d, 1, cap);
  }

  if (len == 1) return 1;
  const Eigen::Index q_max =
      std::min<Eigen::Index>(len - 1, static_cast<Eigen::Index>(cap));
  std::size_t best_q = 1;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (Eigen::Index q = 1; q <= q_max; ++q) {
    const auto head = mags.head(q);
    const auto tail = mags.tail(len - q);
    const double mu1 = head.mean();
    const double mu2 = tail.mean();
    const double ss = (head.array() - mu1).square().sum() +
                      (tail.array() - mu2).square().sum();
    const double sigma2 = ss / static_cast<double>(len);
    const double ll = sigma2 > 0.0
                          ? -0.5 * static_cast<double>(len) * std::log(sigma2)
                          : std::numeric_limits<double>::infinity();
    if (ll > best_ll) {
      best_ll = ll;
      best_q = static_cast<std::size_t>(q);
    }
  }
  return std::clamp<std::size_t>(best_q, 1, cap);
}

}  // namespace gcorr
