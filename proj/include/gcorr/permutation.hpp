#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "gcorr/correlation.hpp"
#include "gcorr/rng.hpp"
#include "gcorr/spectral.hpp"

namespace gcorr {

/// Result of a permutation test. p_value always follows the add-one rule
/// (1 + exceed_count) / (1 + permutations), so it is never 0.
struct TestReport {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t permutations = 0;
  std::size_t exceed_count = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  bool degenerate = false;
};

namespace detail {

// Shared permutation engine: counts permutations whose relabeled inner
// product reaches the observed one. Ties count (>=), keeping the test
// conservative. Each permutation draws its own stream from (seed, index),
// so any worker partition yields the same count.
struct PermutationCore {
  double observed_inner = 0.0;
  double var1 = 0.0;
  double var2 = 0.0;
  std::size_t exceed = 0;
  bool degenerate = false;
};

inline PermutationCore permutation_core(const CenteredMatrix& a,
                                        const CenteredMatrix& b,
                                        std::size_t permutations,
                                        std::uint64_t seed,
                                        unsigned n_workers) {
  PermutationCore core;
  core.var1 = inner(a, a);
  core.var2 = inner(b, b);
  core.degenerate = !(core.var1 > 0.0 && core.var2 > 0.0);
  if (core.degenerate) {
    // every permuted statistic ties with the observed 0
    core.exceed = permutations;
    return core;
  }
  core.observed_inner = inner(a, b);

  const std::size_t n = a.n();
  const std::uint64_t perm_base = derive_seed(seed, kPermutationStream);
  auto count_range = [&](std::size_t lo, std::size_t hi) {
    std::size_t local = 0;
    for (std::size_t idx = lo; idx < hi; ++idx) {
      RandomStream stream(derive_seed(perm_base, idx + 1));
      const std::vector<std::size_t> perm = stream.permutation(n);
      if (inner_permuted(a, b, perm) >= core.observed_inner) ++local;
    }
    return local;
  };

  if (n_workers <= 1 || permutations < 2) {
    core.exceed = count_range(0, permutations);
    return core;
  }
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(n_workers, permutations));
  std::vector<std::size_t> counts(workers, 0);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (permutations + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = static_cast<std::size_t>(w) * chunk;
    const std::size_t hi = std::min(permutations, lo + chunk);
    pool.emplace_back([&, lo, hi, w]() { counts[w] = count_range(lo, hi); });
  }
  for (std::thread& t : pool) t.join();
  for (std::size_t c : counts) core.exceed += c;
  return core;
}

}  // namespace detail

/// Permutation test of independence between two embedded graphs. The
/// observed statistic is the sample graph correlation; each permutation
/// relabels the second graph's nodes by conjugating its U-centered Gram
/// matrix (equivalent to shuffling embedding rows, since U-centering
/// commutes with a joint row/column permutation, and far cheaper).
inline TestReport permutation_test(const Embedding& e1, const Embedding& e2,
                                   std::size_t permutations,
                                   std::uint64_t seed,
                                   unsigned n_workers = 1) {
  if (e1.n() != e2.n()) {
    throw std::invalid_argument("permutation_test: node-count mismatch");
  }
  if (e1.n() < 4) {
    throw std::invalid_argument("permutation_test: need n >= 4");
  }
  if (permutations < 1) {
    throw std::invalid_argument("permutation_test: need B >= 1");
  }
  const CenteredMatrix a = centered_gram(e1.rows);
  const CenteredMatrix b = centered_gram(e2.rows);
  const detail::PermutationCore core =
      detail::permutation_core(a, b, permutations, seed, n_workers);

  TestReport report;
  report.permutations = permutations;
  report.exceed_count = core.exceed;
  report.p_value = static_cast<double>(1 + core.exceed) /
                   static_cast<double>(1 + permutations);
  report.d = std::max(e1.d(), e2.d());
  report.seed = seed;
  report.degenerate = core.degenerate;
  report.statistic = core.degenerate
                         ? 0.0
                         : core.observed_inner /
                               std::sqrt(core.var1 * core.var2);
  return report;
}

/// Permutation test on sample distance covariance of two row sets (the
/// two-step LSE pathway). The statistic reported is the raw dcov; p-values
/// are identical to the normalized version because the variance terms are
/// permutation-invariant.
inline TestReport dcov_permutation_test(const Eigen::MatrixXd& rows1,
                                        const Eigen::MatrixXd& rows2,
                                        std::size_t permutations,
                                        std::uint64_t seed,
                                        unsigned n_workers = 1) {
  if (rows1.rows() != rows2.rows()) {
    throw std::invalid_argument("dcov_permutation_test: row-count mismatch");
  }
  if (rows1.rows() < 4) {
    throw std::invalid_argument("dcov_permutation_test: need n >= 4");
  }
  if (permutations < 1) {
    throw std::invalid_argument("dcov_permutation_test: need B >= 1");
  }
  const CenteredMatrix a = u_center(distance_matrix(rows1));
  const CenteredMatrix b = u_center(distance_matrix(rows2));
  const detail::PermutationCore core =
      detail::permutation_core(a, b, permutations, seed, n_workers);

  TestReport report;
  report.permutations = permutations;
  report.exceed_count = core.exceed;
  report.p_value = static_cast<double>(1 + core.exceed) /
                   static_cast<double>(1 + permutations);
  report.d = static_cast<std::size_t>(rows1.cols());
  report.seed = seed;
  report.degenerate = core.degenerate;
  report.statistic = core.degenerate ? 0.0 : core.observed_inner;
  return report;
}

}  // namespace gcorr
