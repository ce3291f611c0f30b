#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcorr/correlation.hpp"
#include "gcorr/graphgen.hpp"
#include "gcorr/permutation.hpp"
#include "gcorr/rng.hpp"
#include "gcorr/spectral.hpp"

namespace gcorr {

namespace detail {

inline constexpr std::uint64_t kConvergenceTag = 0xC0;
inline constexpr std::uint64_t kPowerTag = 0xC1;
inline constexpr std::uint64_t kNullTag = 0xC2;
inline constexpr std::uint64_t kPermSeedTag = 0xC3;

inline std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t study,
                                    std::uint64_t point,
                                    std::uint64_t replicate) {
  return derive_seed(derive_seed(derive_seed(seed, study), point), replicate);
}

// Profile-likelihood dimension on each graph, then the larger of the two;
// the default dimension rule of the whole test pathway.
inline std::size_t joint_dimension(const SpectralDecomposition& dec1,
                                   const SpectralDecomposition& dec2,
                                   std::size_t n) {
  const std::size_t d1 = select_dimension(
      spectrum_from(dec1, n), DimensionMethod::kProfileLikelihood, n);
  const std::size_t d2 = select_dimension(
      spectrum_from(dec2, n), DimensionMethod::kProfileLikelihood, n);
  return std::max(d1, d2);
}

}  // namespace detail

/// One grid point of the convergence study: the graph statistic averaged
/// over the d sweep and replicates, next to the reference correlation
/// computed directly from the same latent draws.
struct ConvergenceRow {
  std::size_t n = 0;
  double gcorr_mean = 0.0;
  double hsic_mean = 0.0;
};

struct ConvergencePoint {
  double gcorr_mean_over_d = 0.0;
  double hsic_corr = 0.0;
};

/// Single replicate of the convergence study at one n: sample a latent
/// draw and graph pair, average gCorr over d in [d_min, d_max], and compute
/// the latent-position reference on the same draw.
inline ConvergencePoint convergence_replicate(Setting setting, std::size_t n,
                                              double noise_level,
                                              const KernelSpec& kernel_x,
                                              const KernelSpec& kernel_y,
                                              std::size_t d_min,
                                              std::size_t d_max,
                                              std::uint64_t replicate_seed) {
  if (d_min < 1 || d_min > d_max) {
    throw std::invalid_argument("convergence_replicate: bad d range");
  }
  if (n < 4) throw std::invalid_argument("convergence_replicate: need n >= 4");
  const std::size_t d_hi = std::min(d_max, n);

  const LatentSample latent =
      sample_latent(setting, n, noise_level, replicate_seed);
  const GraphPair pair =
      sample_graph_pair(latent, kernel_x, kernel_y, 1.0, replicate_seed);
  const SpectralDecomposition dec1 =
      spectral_decomposition(pair.first.adjacency, d_hi);
  const SpectralDecomposition dec2 =
      spectral_decomposition(pair.second.adjacency, d_hi);

  double acc = 0.0;
  for (std::size_t d = d_min; d <= d_hi; ++d) {
    const Embedding e1 = embedding_from(dec1, d, EmbeddingKind::kAse);
    const Embedding e2 = embedding_from(dec2, d, EmbeddingKind::kAse);
    acc += gcov_embeddings(e1, e2).gcorr;
  }
  ConvergencePoint point;
  point.gcorr_mean_over_d = acc / static_cast<double>(d_hi - d_min + 1);
  point.hsic_corr = hsic_corr_latent(latent.x, latent.y, kernel_x, kernel_y);
  return point;
}

/// Convergence of the graph statistic toward the latent-position reference
/// as n grows. Emits one row per grid point with both statistics averaged
/// over replicates.
inline std::vector<ConvergenceRow> convergence_study(
    Setting setting, const std::vector<std::size_t>& n_grid,
    double noise_level, const KernelSpec& kernel_x, const KernelSpec& kernel_y,
    std::size_t d_min, std::size_t d_max, std::size_t replicates,
    std::uint64_t seed) {
  if (n_grid.empty()) {
    throw std::invalid_argument("convergence_study: empty n grid");
  }
  if (!std::is_sorted(n_grid.begin(), n_grid.end())) {
    throw std::invalid_argument("convergence_study: n grid must be ascending");
  }
  if (replicates < 1) {
    throw std::invalid_argument("convergence_study: need replicates >= 1");
  }
  std::vector<ConvergenceRow> rows;
  rows.reserve(n_grid.size());
  for (std::size_t n : n_grid) {
    ConvergenceRow row;
    row.n = n;
    for (std::size_t r = 0; r < replicates; ++r) {
      const std::uint64_t rs =
          detail::replicate_seed(seed, detail::kConvergenceTag, n, r);
      const ConvergencePoint point = convergence_replicate(
          setting, n, noise_level, kernel_x, kernel_y, d_min, d_max, rs);
      row.gcorr_mean += point.gcorr_mean_over_d;
      row.hsic_mean += point.hsic_corr;
    }
    row.gcorr_mean /= static_cast<double>(replicates);
    row.hsic_mean /= static_cast<double>(replicates);
    rows.push_back(row);
  }
  return rows;
}

enum class PowerStatistic { kGcorr, kLseDcov };

inline const char* to_string(PowerStatistic s) {
  return s == PowerStatistic::kGcorr ? "gcorr" : "lse-dcov";
}

/// Empirical rejection rate of one statistic at one grid point.
struct PowerEstimate {
  Setting setting = Setting::kLinear;
  std::size_t n = 0;
  double alpha = 0.0;
  std::size_t replicates = 0;
  std::size_t rejections = 0;
  double power = 0.0;
  PowerStatistic statistic = PowerStatistic::kGcorr;
};

/// Monte Carlo power of the permutation test under a dependence setting,
/// for both the one-step graph-correlation statistic and the two-step
/// LSE + distance-covariance statistic. Embedding dimensions follow the
/// default rule (profile likelihood per graph, then the max).
inline std::vector<PowerEstimate> power_study(
    Setting setting, const std::vector<std::size_t>& n_grid,
    double noise_level, std::size_t permutations, double alpha,
    std::size_t replicates, std::uint64_t seed,
    const KernelSpec& kernel_x = gaussian_kernel(1.0),
    const KernelSpec& kernel_y = laplace_kernel(1.0), double rho = 1.0,
    unsigned n_workers = 1) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("power_study: alpha must be in (0, 1)");
  }
  if (n_grid.empty()) {
    throw std::invalid_argument("power_study: empty n grid");
  }
  if (replicates < 1) {
    throw std::invalid_argument("power_study: need replicates >= 1");
  }
  std::vector<PowerEstimate> estimates;
  estimates.reserve(2 * n_grid.size());
  for (std::size_t n : n_grid) {
    PowerEstimate one_step;
    one_step.setting = setting;
    one_step.n = n;
    one_step.alpha = alpha;
    one_step.replicates = replicates;
    one_step.statistic = PowerStatistic::kGcorr;
    PowerEstimate two_step = one_step;
    two_step.statistic = PowerStatistic::kLseDcov;

    for (std::size_t r = 0; r < replicates; ++r) {
      const std::uint64_t rs =
          detail::replicate_seed(seed, detail::kPowerTag, n, r);
      const LatentSample latent = sample_latent(setting, n, noise_level, rs);
      const GraphPair pair =
          sample_graph_pair(latent, kernel_x, kernel_y, rho, rs);
      const std::uint64_t test_seed = derive_seed(rs, detail::kPermSeedTag);

      {
        const SpectralDecomposition dec1 =
            spectral_decomposition(pair.first.adjacency);
        const SpectralDecomposition dec2 =
            spectral_decomposition(pair.second.adjacency);
        const std::size_t d = detail::joint_dimension(dec1, dec2, n);
        const TestReport report = permutation_test(
            embedding_from(dec1, d, EmbeddingKind::kAse),
            embedding_from(dec2, d, EmbeddingKind::kAse), permutations,
            test_seed, n_workers);
        if (report.p_value <= alpha) ++one_step.rejections;
      }
      {
        const SpectralDecomposition dec1 = spectral_decomposition(
            normalized_laplacian(pair.first.adjacency));
        const SpectralDecomposition dec2 = spectral_decomposition(
            normalized_laplacian(pair.second.adjacency));
        const std::size_t d = detail::joint_dimension(dec1, dec2, n);
        const TestReport report = dcov_permutation_test(
            embedding_from(dec1, d, EmbeddingKind::kLse).rows,
            embedding_from(dec2, d, EmbeddingKind::kLse).rows, permutations,
            test_seed, n_workers);
        if (report.p_value <= alpha) ++two_step.rejections;
      }
    }
    one_step.power = static_cast<double>(one_step.rejections) /
                     static_cast<double>(replicates);
    two_step.power = static_cast<double>(two_step.rejections) /
                     static_cast<double>(replicates);
    estimates.push_back(one_step);
    estimates.push_back(two_step);
  }
  return estimates;
}

/// Configurations of the null-density study: independent marginals, or the
/// noiseless linear dependence as the alternative.
enum class NullStudyHypothesis { kIndependent, kLinearAlternative };

inline const char* to_string(NullStudyHypothesis h) {
  return h == NullStudyHypothesis::kIndependent ? "h0" : "h1";
}

/// Samples the graph-covariance statistic under the density-study configs:
/// X ~ Beta(1,2) throughout; under the null Y is an independent standard
/// normal, under the alternative Y = X. Gaussian(1) / Laplace(1) kernels,
/// default dimension rule.
inline std::vector<double> null_density_study(
    std::size_t n, std::size_t replicates, std::uint64_t seed,
    NullStudyHypothesis hypothesis = NullStudyHypothesis::kIndependent) {
  if (replicates < 2) {
    throw std::invalid_argument("null_density_study: need replicates >= 2");
  }
  if (n < 4) throw std::invalid_argument("null_density_study: need n >= 4");
  const KernelSpec kernel_x = gaussian_kernel(1.0);
  const KernelSpec kernel_y = laplace_kernel(1.0);

  std::vector<double> stats;
  stats.reserve(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    const std::uint64_t rs =
        detail::replicate_seed(seed, detail::kNullTag, n, r);
    LatentSample latent;
    if (hypothesis == NullStudyHypothesis::kLinearAlternative) {
      latent = sample_latent(Setting::kLinear, n, 0.0, rs);
    } else {
      RandomStream stream = substream(rs, kLatentStream);
      latent.x.resize(n, 1);
      latent.y.resize(n, 1);
      for (std::size_t i = 0; i < n; ++i) {
        latent.x(i, 0) = detail::beta_1_2(stream);
        latent.y(i, 0) = stream.normal();
      }
    }
    const GraphPair pair =
        sample_graph_pair(latent, kernel_x, kernel_y, 1.0, rs);
    const SpectralDecomposition dec1 =
        spectral_decomposition(pair.first.adjacency);
    const SpectralDecomposition dec2 =
        spectral_decomposition(pair.second.adjacency);
    const std::size_t d = detail::joint_dimension(dec1, dec2, n);
    const GraphStat stat =
        gcov_embeddings(embedding_from(dec1, d, EmbeddingKind::kAse),
                        embedding_from(dec2, d, EmbeddingKind::kAse));
    stats.push_back(stat.gcov);
  }
  return stats;
}

}  // namespace gcorr
