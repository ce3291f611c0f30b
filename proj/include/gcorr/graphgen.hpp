#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include "gcorr/graph.hpp"
#include "gcorr/kernel.hpp"
#include "gcorr/rng.hpp"

namespace gcorr {

/// Dependence structures linking the two latent coordinates of each node.
enum class Setting {
  kLinear,
  kExponential,
  kCubic,
  kJointNormal,
  kWShape,
  kCircle,
  kDiamond,
  kMultiplicativeNoise,
  kMultimodalIndependence,
};

inline const char* to_string(Setting s) {
  switch (s) {
    case Setting::kLinear: return "linear";
    case Setting::kExponential: return "exponential";
    case Setting::kCubic: return "cubic";
    case Setting::kJointNormal: return "joint-normal";
    case Setting::kWShape: return "w-shape";
    case Setting::kCircle: return "circle";
    case Setting::kDiamond: return "diamond";
    case Setting::kMultiplicativeNoise: return "multiplicative-noise";
    case Setting::kMultimodalIndependence: return "multimodal-independence";
  }
  throw std::invalid_argument("to_string: unknown setting");
}

inline Setting setting_from_string(const std::string& name) {
  for (Setting s : {Setting::kLinear, Setting::kExponential, Setting::kCubic,
                    Setting::kJointNormal, Setting::kWShape, Setting::kCircle,
                    Setting::kDiamond, Setting::kMultiplicativeNoise,
                    Setting::kMultimodalIndependence}) {
    if (name == to_string(s)) return s;
  }
  throw std::invalid_argument("unknown setting: " + name);
}

/// Paired latent positions, one row per node. Both columns are univariate
/// here; the matrix shape keeps the kernel code dimension-agnostic.
struct LatentSample {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
};

namespace detail {

// Inverse-CDF draw from Beta(1,2), density 2(1-x) on [0,1].
inline double beta_1_2(RandomStream& stream) {
  return 1.0 - std::sqrt(1.0 - stream.uniform());
}

}  // namespace detail

/// Draws n nodes from the given dependence setting. noise_level is the
/// variance c of the additive normal noise; 0 switches the noise term off
/// entirely. Draw order within each row is fixed (x-side first), so results
/// are reproducible for a given seed across platforms.
inline LatentSample sample_latent(Setting setting, std::size_t n,
                                  double noise_level, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_latent: n must be positive");
  if (noise_level < 0.0) {
    throw std::invalid_argument("sample_latent: noise level must be >= 0");
  }
  RandomStream stream = substream(seed, kLatentStream);
  const bool noisy = noise_level > 0.0;
  const double noise_sd = std::sqrt(noise_level);
  auto noise = [&]() { return noisy ? stream.normal(0.0, noise_sd) : 0.0; };

  Eigen::MatrixXd x(n, 1);
  Eigen::MatrixXd y(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    double xi = 0.0;
    double yi = 0.0;
    switch (setting) {
      case Setting::kLinear: {
        xi = detail::beta_1_2(stream);
        yi = xi + noise();
        break;
      }
      case Setting::kExponential: {
        xi = detail::beta_1_2(stream);
        yi = std::exp(xi) + noise();
        break;
      }
      case Setting::kCubic: {
        xi = detail::beta_1_2(stream);
        const double t = xi - 1.0 / 3.0;
        yi = 128.0 * t * t * t + 48.0 * t * t - 12.0 * t + noise();
        break;
      }
      case Setting::kJointNormal: {
        // Cholesky factor of [[1, 0.5], [0.5, 2]].
        const double z1 = stream.normal();
        const double z2 = stream.normal();
        xi = z1;
        yi = 0.5 * z1 + std::sqrt(1.75) * z2;
        break;
      }
      case Setting::kWShape: {
        xi = detail::beta_1_2(stream);
        const double u = stream.uniform(-1.0, 1.0);
        const double s = xi * xi - 0.5;
        yi = 4.0 * (s * s - u / 500.0) + 0.5 * noise();
        break;
      }
      case Setting::kCircle: {
        const double theta = stream.uniform(0.0, 2.0 * std::numbers::pi);
        xi = std::cos(theta);
        yi = std::sin(theta) + 0.5 * noise();
        break;
      }
      case Setting::kDiamond: {
        const double u = stream.uniform(-1.0, 1.0);
        const double v = stream.uniform(-1.0, 1.0);
        const double theta = -std::numbers::pi / 4.0;
        xi = u * std::cos(theta) + v * std::sin(theta);
        yi = -u * std::sin(theta) + v * std::cos(theta) + 0.5 * noise();
        break;
      }
      case Setting::kMultiplicativeNoise: {
        xi = stream.normal();
        const double u = stream.normal();
        yi = xi * u + 0.5 * noise();
        break;
      }
      case Setting::kMultimodalIndependence: {
        const double u = stream.normal();
        const double u1 = stream.bernoulli(0.5) ? 1.0 : 0.0;
        const double v = stream.normal();
        const double v1 = stream.bernoulli(0.5) ? 1.0 : 0.0;
        xi = u / 3.0 + 2.0 * u1 - 1.0;
        yi = v / 3.0 + 2.0 * v1 - 1.0;
        break;
      }
    }
    x(i, 0) = xi;
    y(i, 0) = yi;
  }
  return LatentSample{std::move(x), std::move(y)};
}

/// Samples an undirected graph whose edge (i, j) is Bernoulli(rho * k_ij),
/// independently over pairs. rho is a global sparsity factor in (0, 1].
/// The stream is seeded directly from `seed`; callers drawing several graphs
/// derive distinct seeds (see sample_graph_pair).
inline Graph sample_graph(const KernelMatrix& kernel, double rho,
                          std::uint64_t seed) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("sample_graph: rho must be in (0, 1]");
  }
  const Eigen::Index n = kernel.values.rows();
  if (kernel.values.minCoeff() < 0.0 || kernel.values.maxCoeff() > 1.0) {
    throw std::invalid_argument(
        "sample_graph: kernel values must lie in [0, 1]");
  }
  RandomStream stream(seed);
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (stream.bernoulli(rho * kernel.values(i, j))) {
        adj(i, j) = 1.0;
        adj(j, i) = 1.0;
      }
    }
  }
  return Graph{std::move(adj)};
}

/// Erdos-Renyi G(n, p); the independence baseline used in the experiments.
inline Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("erdos_renyi: n must be positive");
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("erdos_renyi: p must be in [0, 1]");
  }
  const Eigen::Index ni = static_cast<Eigen::Index>(n);
  RandomStream stream(seed);
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (Eigen::Index j = i + 1; j < ni; ++j) {
      if (stream.bernoulli(p)) {
        adj(i, j) = 1.0;
        adj(j, i) = 1.0;
      }
    }
  }
  return Graph{std::move(adj)};
}

struct GraphPair {
  Graph first;
  Graph second;
};

/// Samples the two graphs of a correlated pair over shared latent positions.
/// Edge streams for the two graphs are derived independently from the master
/// seed, so regenerating one graph never perturbs the other.
inline GraphPair sample_graph_pair(const LatentSample& latent,
                                   const KernelSpec& kernel_x,
                                   const KernelSpec& kernel_y, double rho,
                                   std::uint64_t seed) {
  const KernelMatrix kx = kernel_matrix(kernel_x, latent.x);
  const KernelMatrix ky = kernel_matrix(kernel_y, latent.y);
  return GraphPair{sample_graph(kx, rho, derive_seed(seed, kGraphOneStream)),
                   sample_graph(ky, rho, derive_seed(seed, kGraphTwoStream))};
}

}  // namespace gcorr
