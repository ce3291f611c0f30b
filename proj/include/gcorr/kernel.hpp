#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gcorr {

enum class KernelFamily { kGaussian, kLaplace };

/// Positive-definite kernel on latent positions. bandwidth is sigma for the
/// Gaussian family and the rate c for the Laplace family.
struct KernelSpec {
  KernelFamily family = KernelFamily::kGaussian;
  double bandwidth = 1.0;
};

inline KernelSpec gaussian_kernel(double sigma) {
  return KernelSpec{KernelFamily::kGaussian, sigma};
}

inline KernelSpec laplace_kernel(double c) {
  return KernelSpec{KernelFamily::kLaplace, c};
}

/// k(x, y). Gaussian: exp(-|x-y|^2 / sigma^2). Laplace: exp(-c * |x-y|_1).
inline double eval_kernel(const KernelSpec& spec, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("eval_kernel: dimension mismatch (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
  }
  if (!(spec.bandwidth > 0.0)) {
    throw std::invalid_argument("eval_kernel: bandwidth must be positive");
  }
  switch (spec.family) {
    case KernelFamily::kGaussian: {
      const double d2 = (x - y).squaredNorm();
      return std::exp(-d2 / (spec.bandwidth * spec.bandwidth));
    }
    case KernelFamily::kLaplace: {
      const double d1 = (x - y).lpNorm<1>();
      return std::exp(-spec.bandwidth * d1);
    }
  }
  throw std::invalid_argument("eval_kernel: unknown kernel family");
}

/// Pairwise kernel matrix over the rows of `points`, with a zero diagonal.
/// The zero diagonal is a structural convention shared by every Gram-like
/// matrix in this library; downstream centering assumes it.
struct KernelMatrix {
  Eigen::MatrixXd values;

  std::size_t n() const { return static_cast<std::size_t>(values.rows()); }
};

inline KernelMatrix kernel_matrix(const KernelSpec& spec,
                                  const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  if (n < 2) {
    throw std::invalid_argument("kernel_matrix: need at least 2 points");
  }
  if (!(spec.bandwidth > 0.0)) {
    throw std::invalid_argument("kernel_matrix: bandwidth must be positive");
  }
  const bool gaussian = spec.family == KernelFamily::kGaussian;
  const double scale = gaussian ? 1.0 / (spec.bandwidth * spec.bandwidth)
                                : spec.bandwidth;
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dist = gaussian
                              ? (points.row(i) - points.row(j)).squaredNorm()
                              : (points.row(i) - points.row(j)).lpNorm<1>();
      const double v = std::exp(-scale * dist);
      values(i, j) = v;
      values(j, i) = v;
    }
  }
  return KernelMatrix{std::move(values)};
}

}  // namespace gcorr
