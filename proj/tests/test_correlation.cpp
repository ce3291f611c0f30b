#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstddef>

#include "gcorr/correlation.hpp"
#include "gcorr/graphgen.hpp"
#include "gcorr/kernel.hpp"
#include "gcorr/rng.hpp"
#include "gcorr/spectral.hpp"

using namespace gcorr;

namespace {

Eigen::MatrixXd random_zero_diag(std::size_t n, std::uint64_t seed) {
  RandomStream s(seed);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = s.uniform();
      m(j, i) = m(i, j);
    }
  return m;
}

// Fourth-order kernel written as raw loops over ordered distinct 4-tuples,
// deliberately sharing no code with the library enumeration.
double h_by_loops(const Eigen::MatrixXd& k, const Eigen::MatrixXd& l,
                  std::size_t a, std::size_t b, std::size_t c,
                  std::size_t d) {
  const std::array<std::size_t, 4> set = {a, b, c, d};
  double total = 0.0;
  int count = 0;
  for (std::size_t s : set)
    for (std::size_t t : set) {
      if (t == s) continue;
      for (std::size_t u : set) {
        if (u == s || u == t) continue;
        for (std::size_t v : set) {
          if (v == s || v == t || v == u) continue;
          total += k(s, t) * l(s, t) + k(s, t) * l(u, v) -
                   2.0 * k(s, t) * l(s, u);
          ++count;
        }
      }
    }
  REQUIRE(count == 24);
  return total / 24.0;
}

// O(n^2) expansion of the unbiased squared distance covariance in terms of
// raw sums, used as an independent reference for the centered inner product.
double dcov_by_sums(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double n = static_cast<double>(a.rows());
  const double ab = (a.array() * b.array()).sum();
  const double rows = (a.rowwise().sum().array() *
                       b.rowwise().sum().array()).sum();
  const double totals = a.sum() * b.sum();
  return (ab - 2.0 / (n - 2.0) * rows +
          totals / ((n - 1.0) * (n - 2.0))) /
         (n * (n - 3.0));
}

}  // namespace

TEST_CASE("u-centered rows and columns sum to zero off the diagonal") {
  const Eigen::MatrixXd m = random_zero_diag(15, 2);
  const CenteredMatrix c = u_center(m);
  for (Eigen::Index i = 0; i < 15; ++i) {
    REQUIRE(c.values(i, i) == 0.0);
    double row = 0.0, col = 0.0;
    for (Eigen::Index j = 0; j < 15; ++j) {
      row += c.values(i, j);
      col += c.values(j, i);
    }
    REQUIRE(std::abs(row) < 1e-10);
    REQUIRE(std::abs(col) < 1e-10);
  }
}

TEST_CASE("u-centering rejects bad input") {
  Eigen::MatrixXd small = Eigen::MatrixXd::Zero(3, 3);
  REQUIRE_THROWS_AS(u_center(small), std::invalid_argument);

  Eigen::MatrixXd dirty = random_zero_diag(6, 3);
  dirty(2, 2) = 0.5;
  REQUIRE_THROWS_AS(u_center(dirty), std::invalid_argument);
}

TEST_CASE("constant off-diagonal matrices center to zero") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(8, 8, 0.7);
  m.diagonal().setZero();
  const CenteredMatrix c = u_center(m);
  REQUIRE(c.values.cwiseAbs().maxCoeff() < 1e-12);

  const GraphStat stat = gcov_from_centered(c, c, 1);
  REQUIRE(stat.degenerate);
  REQUIRE(stat.gcorr == 0.0);
}

TEST_CASE("inner product matches a naive double loop") {
  const CenteredMatrix a = u_center(random_zero_diag(10, 4));
  const CenteredMatrix b = u_center(random_zero_diag(10, 5));
  double naive = 0.0;
  for (Eigen::Index i = 0; i < 10; ++i)
    for (Eigen::Index j = 0; j < 10; ++j)
      if (i != j) naive += a.values(i, j) * b.values(i, j);
  naive /= 10.0 * 7.0;
  REQUIRE(inner(a, b) == Catch::Approx(naive).margin(1e-14));
}

TEST_CASE("centered inner product equals the u-statistic enumeration") {
  RandomStream seeds(1001);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 4 + rep % 7;
    const Eigen::MatrixXd k = random_zero_diag(n, seeds.next_u64());
    const Eigen::MatrixXd l = random_zero_diag(n, seeds.next_u64());
    const double fast = inner(u_center(k), u_center(l));
    const double slow = gcov_ustat_oracle(k, l);
    REQUIRE(fast == Catch::Approx(slow).margin(1e-10));
  }
}

TEST_CASE("u-statistic enumeration matches an independent kernel expansion") {
  const std::size_t n = 7;
  const Eigen::MatrixXd k = random_zero_diag(n, 11);
  const Eigen::MatrixXd l = random_zero_diag(n, 12);
  double total = 0.0;
  std::size_t tuples = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t q = j + 1; q < n; ++q)
        for (std::size_t r = q + 1; r < n; ++r) {
          total += h_by_loops(k, l, i, j, q, r);
          ++tuples;
        }
  REQUIRE(gcov_ustat_oracle(k, l) ==
          Catch::Approx(total / tuples).margin(1e-12));
}

TEST_CASE("asymptotic variance matches an independent triple enumeration") {
  const std::size_t n = 8;
  const Eigen::MatrixXd k = random_zero_diag(n, 21);
  const Eigen::MatrixXd l = random_zero_diag(n, 22);

  const double gcov = inner(u_center(k), u_center(l));
  const double triples = (n - 1.0) * (n - 2.0) * (n - 3.0) / 6.0;
  double big_r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double cond = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      for (std::size_t q = j + 1; q < n; ++q) {
        if (q == i) continue;
        for (std::size_t r = q + 1; r < n; ++r) {
          if (r == i) continue;
          cond += h_by_loops(k, l, i, j, q, r);
        }
      }
    }
    const double mean_i = cond / triples;
    big_r += mean_i * mean_i;
  }
  big_r /= static_cast<double>(n);
  const double want = 16.0 * (big_r - gcov * gcov);
  REQUIRE(asymptotic_variance(k, l) == Catch::Approx(want).margin(1e-10));
}

TEST_CASE("oracle helpers reject out-of-range orders") {
  REQUIRE_THROWS_AS(
      gcov_ustat_oracle(random_zero_diag(3, 1), random_zero_diag(3, 2)),
      std::invalid_argument);
  REQUIRE_THROWS_AS(
      gcov_ustat_oracle(random_zero_diag(15, 1), random_zero_diag(15, 2)),
      std::invalid_argument);
  REQUIRE_THROWS_AS(
      asymptotic_variance(random_zero_diag(6, 1), random_zero_diag(8, 2)),
      std::invalid_argument);
}

TEST_CASE("graph correlation of an embedding with itself is one") {
  const Graph g = erdos_renyi(30, 0.4, 61);
  const Embedding e = ase(g, 3);
  const GraphStat stat = gcov_embeddings(e, e);
  REQUIRE_FALSE(stat.degenerate);
  REQUIRE(stat.gcorr == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(stat.gvar1 == Catch::Approx(stat.gvar2));
  REQUIRE(stat.d == 3);
}

TEST_CASE("graph covariance is symmetric in its arguments") {
  const Graph g1 = erdos_renyi(25, 0.4, 62);
  const Graph g2 = erdos_renyi(25, 0.3, 63);
  const GraphStat ab = gcov_graphs(g1, g2, 2);
  const GraphStat ba = gcov_graphs(g2, g1, 2);
  REQUIRE(ab.gcov == Catch::Approx(ba.gcov).margin(1e-14));
  REQUIRE(ab.gvar1 == Catch::Approx(ba.gvar2).margin(1e-14));
  REQUIRE(ab.gcorr == Catch::Approx(ba.gcorr).margin(1e-12));
  REQUIRE_THROWS_AS(gcov_graphs(g1, erdos_renyi(10, 0.4, 1), 2),
                    std::invalid_argument);
}

TEST_CASE("centered gram commutes with node relabeling") {
  RandomStream s(71);
  Eigen::MatrixXd rows(12, 3);
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index j = 0; j < rows.cols(); ++j) rows(i, j) = s.normal();

  const std::vector<std::size_t> perm = s.permutation(12);
  Eigen::MatrixXd shuffled(12, 3);
  for (std::size_t i = 0; i < 12; ++i) shuffled.row(i) = rows.row(perm[i]);

  const CenteredMatrix base = centered_gram(rows);
  const CenteredMatrix moved = centered_gram(shuffled);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j)
      REQUIRE(moved.values(i, j) ==
              Catch::Approx(base.values(perm[i], perm[j])).margin(1e-8));
}

TEST_CASE("distance matrix holds pairwise euclidean distances") {
  RandomStream s(81);
  Eigen::MatrixXd pts(9, 2);
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index j = 0; j < pts.cols(); ++j) pts(i, j) = s.normal();
  const Eigen::MatrixXd d = distance_matrix(pts);
  REQUIRE(d.diagonal().cwiseAbs().maxCoeff() == 0.0);
  for (Eigen::Index i = 0; i < 9; ++i)
    for (Eigen::Index j = 0; j < 9; ++j)
      REQUIRE(d(i, j) ==
              Catch::Approx((pts.row(i) - pts.row(j)).norm()).margin(1e-14));
}

TEST_CASE("distance covariance matches the raw-sum expansion") {
  RandomStream s(91);
  for (int rep = 0; rep < 5; ++rep) {
    const std::size_t n = 8 + 3 * rep;
    Eigen::MatrixXd x(n, 2), y(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      x(i, 0) = s.normal();
      x(i, 1) = s.uniform();
      y(i, 0) = x(i, 0) + 0.3 * s.normal();
    }
    const double fast = dcov_latent(x, y);
    const double slow =
        dcov_by_sums(distance_matrix(x), distance_matrix(y));
    REQUIRE(fast == Catch::Approx(slow).margin(1e-12));
  }
}

TEST_CASE("latent hsic separates dependence from independence") {
  RandomStream s(101);
  const std::size_t n = 120;
  Eigen::MatrixXd x(n, 1), y_dep(n, 1), y_ind(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = s.uniform();
    y_dep(i, 0) = x(i, 0);
    y_ind(i, 0) = s.uniform();
  }
  const KernelSpec kx = gaussian_kernel(1.0);
  const KernelSpec ky = laplace_kernel(1.0);
  REQUIRE(hsic_corr_latent(x, x, kx, kx) == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(hsic_latent(x, y_dep, kx, ky) > 0.0);
  REQUIRE(hsic_corr_latent(x, y_dep, kx, ky) > 0.5);
  REQUIRE(std::abs(hsic_corr_latent(x, y_ind, kx, ky)) < 0.2);
}

TEST_CASE("two-step lse statistic is deterministic and finite") {
  const LatentSample latent = sample_latent(Setting::kLinear, 40, 0.0, 14);
  const GraphPair pair = sample_graph_pair(latent, gaussian_kernel(1.0),
                                           laplace_kernel(1.0), 1.0, 15);
  const double a = lse_dcov(pair.first, pair.second, 2);
  const double b = lse_dcov(pair.first, pair.second, 2);
  REQUIRE(a == b);
  REQUIRE(std::isfinite(a));
}
