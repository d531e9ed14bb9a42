#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "helpers.hpp"
#include "sdmm/bounds.hpp"
#include "sdmm/error.hpp"
#include "sdmm/random.hpp"

using namespace sdmm;
using testing::rel_err;

namespace {

BigInt factorial(unsigned k) {
  BigInt f = 1;
  for (unsigned i = 2; i <= k; ++i) f *= i;
  return f;
}

// Point-rows Vandermonde W(i, j) = alpha_i^j, built directly from std::polar.
Dense point_rows(std::int64_t n, const std::vector<std::int64_t>& subset) {
  const auto m = static_cast<Eigen::Index>(subset.size());
  Dense w(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      w(i, j) = std::polar(1.0, 2.0 * M_PI * static_cast<double>(subset[i] * j) / static_cast<double>(n));
    }
  }
  return w;
}

}  // namespace

TEST_CASE("Pi sequence") {
  CHECK(pi(0) == 1);
  CHECK(pi(3) == 2);
  CHECK(pi(4) == 4);
  CHECK(pi(5) == 12);
  CHECK(pi(6) == 36);
  PiSequence memo;
  for (unsigned k = 0; k <= 20; ++k) {
    CHECK(pi(2 * k) == factorial(k) * factorial(k));
    CHECK(pi(2 * k + 1) == pi(2 * k) * (k + 1));
    CHECK(memo(2 * k + 1) == pi(2 * k + 1));
  }
  for (unsigned m = 1; m <= 40; ++m) CHECK(pi(m) / pi(m - 1) == (m + 1) / 2);
}

TEST_CASE("closed-form bounds") {
  CHECK(bound_w_norm(1) == 1.0);
  CHECK(bound_w_norm(4) == 2.0);
  CHECK(bound_w_norm(16) == 4.0);
  CHECK(bound_cond_large(8, 0) == doctest::Approx(64.0));
  CHECK(bound_cond_large(8, 1) == doctest::Approx(512.0));
  CHECK(bound_cond_large(12, 2) == doctest::Approx(10368.0));
  CHECK(bound_inv_large(8, 1) == doctest::Approx(std::pow(8.0, 2.5)));
  CHECK(bound_inv_small_F(8, 1) == doctest::Approx(1.0));
  CHECK(bound_inv_small_F(8, 2) == doctest::Approx(8.0));
  CHECK(bound_inv_small_F(9, 3) == doctest::Approx(60.75));
  CHECK(bound_inv_small_2(9, 3) == doctest::Approx(std::sqrt(3.0) * 81.0 / 4.0));
  CHECK_THROWS_AS(bound_cond_large(4, 4), Error);
  CHECK_THROWS_AS(bound_inv_large(4, 5), Error);
  CHECK_THROWS_AS(bound_inv_small_F(3, 4), Error);
  // 20! overflows 64-bit signed arithmetic but not the big-integer path.
  CHECK(std::isfinite(bound_cond_large(21, 20)));
}

TEST_CASE("measured norms against an independent SVD") {
  const std::vector<std::int64_t> subset{0, 3, 4, 9};
  const auto r = measure_subset(12, subset);
  const Dense w = point_rows(12, subset);
  Eigen::JacobiSVD<Dense> svd(w);
  const auto s = svd.singularValues();
  CHECK(r.w_norm2 == doctest::Approx(s(0)).epsilon(1e-12));
  CHECK(r.inv_norm2 == doctest::Approx(1.0 / s(3)).epsilon(1e-12));
  CHECK(r.inv_normF == doctest::Approx(w.inverse().norm()).epsilon(1e-10));
  CHECK(r.cond2 == doctest::Approx(s(0) / s(3)).epsilon(1e-12));
  CHECK(r.d == 8);
}

TEST_CASE("the full DFT matrix has unit condition number") {
  std::vector<std::int64_t> all(8);
  std::iota(all.begin(), all.end(), 0);
  CHECK(std::abs(measure_subset(8, all).cond2 - 1.0) <= 1e-10);
}

TEST_CASE("exhaustive verification") {
  const auto two = verify_bounds_exhaustive(2);
  CHECK(two.size() == 1 + 3);
  for (const auto& r : two) CHECK(r.violations.empty());

  const auto reports = verify_bounds_exhaustive(12);
  std::size_t n12 = 0;
  std::map<std::int64_t, double> worst_half;
  for (const auto& r : reports) {
    CHECK_MESSAGE(r.violations.empty(), "n=", r.n, " m=", r.m);
    if (r.n == 12 && r.m == 10) {
      ++n12;
      CHECK(r.cond2 <= 10368.0);
    }
    if (2 * r.m == r.n) worst_half[r.n] = std::max(worst_half[r.n], r.cond2);
  }
  CHECK(n12 == 66);
  // Worst half-size subsets degrade geometrically with n.
  for (std::int64_t n = 6; n <= 12; n += 2) CHECK(worst_half[n] > 2.0 * worst_half[n - 2]);

  double worst_93 = 0.0;
  for (const auto& r : reports) {
    if (r.n == 9 && r.m == 3) worst_93 = std::max(worst_93, r.inv_normF);
  }
  CHECK(worst_93 <= 60.75);

  CHECK_THROWS_AS(verify_bounds_exhaustive(15), Error);
  VerifyOptions opts;
  opts.cap = 3;
  CHECK_THROWS_AS(verify_bounds_exhaustive(4, opts), Error);
}

TEST_CASE("bounds CSV") {
  const auto csv = bounds_csv(verify_bounds_exhaustive(2));
  CHECK(csv.rfind("n,m,d,subset,measured_", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.find("0;1") != std::string::npos);
}

TEST_CASE("inverse decomposition") {
  SUBCASE("m = 1") {
    const auto w = GeneralizedVandermonde::standard(4, {2});
    const auto d = decompose_inverse(w, large_regime_betas(4, 1));
    CHECK(d.a(0, 0) == cplx(1, 0));
    CHECK(d.c(0, 0) == cplx(1, 0));
    CHECK(d.b(0, 0) == cplx(1, 0));
    CHECK(d.reconstruct()(0, 0) == cplx(1, 0));
  }
  SUBCASE("m = 2 at {1, i}") {
    const auto w = GeneralizedVandermonde::standard(4, {0, 1});
    const auto d = decompose_inverse(w, large_regime_betas(4, 2));
    const Dense direct = w.points_by_exponents().values().inverse();
    // Closed-form 2x2 inverse of [[1, 1], [1, i]].
    const cplx det = cplx(0, 1) - 1.0;
    Dense hand(2, 2);
    hand << cplx(0, 1) / det, -1.0 / det, -1.0 / det, 1.0 / det;
    CHECK((direct - hand).norm() <= 1e-14);
    CHECK(rel_err(d.reconstruct(), ComplexMatrix(hand)) <= 1e-10);
  }
  SUBCASE("200 random instances") {
    RandomSource rng(99);
    for (int trial = 0; trial < 200; ++trial) {
      const std::int64_t n = 1 + static_cast<std::int64_t>(rng.engine()() % 16);
      const std::size_t m = 1 + rng.engine()() % static_cast<std::uint64_t>(n);
      std::vector<std::int64_t> all(static_cast<std::size_t>(n));
      std::iota(all.begin(), all.end(), 0);
      std::vector<std::int64_t> subset;
      std::sample(all.begin(), all.end(), std::back_inserter(subset), m, rng.engine());
      const auto w = GeneralizedVandermonde::standard(n, subset);
      const auto d = decompose_inverse(w, large_regime_betas(n, static_cast<std::int64_t>(m)));
      const ComplexMatrix direct(Dense(point_rows(n, subset).inverse()));
      CHECK(rel_err(d.reconstruct(), direct) <= 1e-8);
    }
  }
  SUBCASE("small-regime betas and collisions") {
    const auto w = GeneralizedVandermonde::standard(16, {1, 3, 6, 11});
    const auto d = decompose_inverse(w, small_regime_betas(4));
    const ComplexMatrix direct(Dense(point_rows(16, {1, 3, 6, 11}).inverse()));
    CHECK(rel_err(d.reconstruct(), direct) <= 1e-8);
    const auto hit = GeneralizedVandermonde::standard(16, {0, 4, 6, 11});
    CHECK_THROWS_AS(decompose_inverse(hit, small_regime_betas(4)), Error);
  }
}
