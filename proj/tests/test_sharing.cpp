#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sdmm/bounds.hpp"
#include "sdmm/error.hpp"
#include "sdmm/random.hpp"
#include "sdmm/sharing.hpp"

using namespace sdmm;

TEST_CASE("calibrated variance") {
  CHECK(calibrate_sigma2(1.0, 1, 1, 4).sigma2 == doctest::Approx(1.0));
  CHECK(calibrate_sigma2(1.0, 1, 7, 4).sigma2 == doctest::Approx(7.0));
  CHECK(calibrate_sigma2(1e-2, 3, 8, 21).sigma2 == doctest::Approx(100.0 * 13.5 * 194481.0).epsilon(1e-12));
  CHECK(calibrate_sigma2(1e-2, 3, 8, 21, 2).sigma2 == doctest::Approx(2 * 100.0 * 13.5 * 194481.0).epsilon(1e-12));
  // X = 4 brings Pi(3) = 2 into the denominator.
  CHECK(calibrate_sigma2(1.0, 4, 1, 10).sigma2 == doctest::Approx(64.0 / (64.0 * 4.0) * 1e6).epsilon(1e-12));
  CHECK_THROWS_AS(calibrate_sigma2(0.0, 1, 1, 4), Error);
  CHECK_THROWS_AS(calibrate_sigma2(-1.0, 1, 1, 4), Error);

  const NestedCosetScheme gapped(GeneralizedVandermonde(6, {1, 2, 3, 4, 5, 0}, {0}),
                                 GeneralizedVandermonde(6, {1, 2, 3, 4, 5, 0}, {1, 3}));
  CHECK_FALSE(gapped.consecutive_sec_exponents());
  CHECK_THROWS_AS(calibrate_sigma2(gapped, 1.0, 1), Error);
  CHECK(calibrate_sigma2(NestedCosetScheme::shamir(6, 2, 2), 1.0, 2).sigma2 > 0);
}

TEST_CASE("nested coset construction checks the row spaces") {
  const std::vector<std::int64_t> idx{1, 2, 3, 0};
  CHECK_THROWS_AS(NestedCosetScheme(GeneralizedVandermonde(4, idx, {0, 1}), GeneralizedVandermonde(4, idx, {4, 5})),
                  Error);
  CHECK_THROWS_AS(NestedCosetScheme(GeneralizedVandermonde(4, idx, {0, 1, 2}), GeneralizedVandermonde(4, idx, {3, 4})),
                  Error);
  const auto s = NestedCosetScheme::shamir(4, 2, 2);
  CHECK(s.m() == 2);
  CHECK(s.k() == 2);
  CHECK(s.n() == 4);
}

TEST_CASE("sharing") {
  const auto scheme = NestedCosetScheme::shamir(6, 2, 2);
  const std::vector<cplx> secret{{0.5, -0.25}, {-1, 0.75}};
  NoiseSpec zero;
  const auto plain = share(secret, scheme, zero, 1);
  for (std::size_t i = 0; i < 6; ++i) {
    const cplx want = secret[0] * scheme.g_enc().matrix()(0, i) + secret[1] * scheme.g_enc().matrix()(1, i);
    CHECK(std::abs(plain[i] - want) < 1e-15);
  }

  NoiseSpec noise;
  noise.sigma2 = 3.0;
  CHECK(share(secret, scheme, noise, 5) == share(secret, scheme, noise, 5));
  CHECK(share(secret, scheme, noise, 5) != share(secret, scheme, noise, 6));
  CHECK_THROWS_AS(share(std::vector<cplx>{1}, scheme, noise, 1), Error);

  // Any m + k shares determine (s, r); solve and compare.
  const auto noisy = share(secret, scheme, noise, 9);
  const std::vector<std::size_t> pick{0, 2, 3, 5};
  Dense g(4, 4);
  Eigen::VectorXcd y(4);
  const Dense stacked = vstack(scheme.g_enc().matrix(), scheme.g_sec().matrix()).values();
  for (int c = 0; c < 4; ++c) {
    g.col(c) = stacked.col(static_cast<Eigen::Index>(pick[c]));
    y(c) = noisy[pick[c]];
  }
  const Eigen::VectorXcd sr = g.transpose().partialPivLu().solve(y);
  CHECK(std::abs(sr(0) - secret[0]) < 1e-9);
  CHECK(std::abs(sr(1) - secret[1]) < 1e-9);
}

TEST_CASE("one-hot noise shares the security row") {
  const auto scheme = NestedCosetScheme::shamir(5, 1, 2);
  // With zero secret, shares equal r * G_sec for the drawn r; recover r from two shares.
  NoiseSpec noise;
  noise.sigma2 = 1.0;
  const auto sh = share(std::vector<cplx>{0}, scheme, noise, 4);
  RandomSource rng(4);
  const cplx r0 = rng.complex_normal(1.0);
  const cplx r1 = rng.complex_normal(1.0);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(std::abs(sh[i] - (r0 * scheme.g_sec().matrix()(0, i) + r1 * scheme.g_sec().matrix()(1, i))) < 1e-14);
  }
}

TEST_CASE("empirical noise variance") {
  RandomSource rng(123);
  const double sigma2 = 2.5;
  double acc = 0.0, re = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const cplx z = rng.complex_normal(sigma2);
    acc += std::norm(z);
    re += z.real() * z.real();
  }
  CHECK(std::abs(acc / n - sigma2) / sigma2 < 0.02);
  CHECK(std::abs(re / n - sigma2 / 2) / (sigma2 / 2) < 0.02);
}

TEST_CASE("Frobenius leakage bound") {
  // t = 1: H has unit-modulus entries, so the bound is exactly m / sigma2.
  for (std::size_t m = 1; m <= 5; ++m) {
    const auto scheme = NestedCosetScheme::shamir(8, m, 1);
    const double sigma2 = calibrate_sigma2(1.0, 1, m, 8).sigma2;
    CHECK(sigma2 == doctest::Approx(static_cast<double>(m)));
    for (std::size_t w = 1; w <= 8; ++w) {
      CHECK(leakage_bound_frobenius(scheme, {w}, sigma2) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(leakage_bound_frobenius(scheme, {w}, 2 * sigma2) == doctest::Approx(0.5).epsilon(1e-12));
    }
  }
  const auto shamir = NestedCosetScheme::shamir(6, 2, 2);
  const double s2 = calibrate_sigma2(0.1, 2, 2, 6).sigma2;
  const auto subsets = all_subsets(6, 2);
  CHECK(subsets.size() == 15);
  for (const auto& t : subsets) CHECK(leakage_bound_frobenius(shamir, t, s2) <= 0.1);
  CHECK_THROWS_AS(leakage_bound_frobenius(shamir, {1}, s2), Error);
}

TEST_CASE("log-det leakage bound") {
  const auto scheme = NestedCosetScheme::shamir(7, 3, 2);
  CHECK(leakage_bound_logdet(scheme, {1, 4}, 1.0, ComplexMatrix(3, 3)) == 0.0);
  double prev = 1e300;
  for (const double s2 : {1.0, 10.0, 100.0, 1e4, 1e8}) {
    const double v = leakage_bound_logdet(scheme, {2, 5}, s2, ComplexMatrix::identity(3));
    CHECK(v < prev);
    CHECK(v >= 0.0);
    prev = v;
  }
  CHECK(prev < 1e-6);

  RandomSource rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t a = 1 + rng.engine()() % 7;
    std::size_t b = 1 + rng.engine()() % 7;
    if (b == a) b = a % 7 + 1;
    const Subset t{std::min(a, b), std::max(a, b)};
    const double s2 = rng.uniform(0.1, 50.0);
    const double ld = leakage_bound_logdet(scheme, t, s2, ComplexMatrix::identity(3));
    CHECK(ld <= leakage_bound_frobenius(scheme, t, s2) + 1e-9);
    // Water-filling is the supremum over admissible Q, so it dominates Q = I.
    const double worst = leakage_bound_logdet_worst(scheme, t, s2);
    CHECK(ld <= worst + 1e-12);
    CHECK(worst <= leakage_bound_frobenius(scheme, t, s2) + 1e-9);
  }
}

TEST_CASE("audit") {
  const auto scheme = NestedCosetScheme::shamir(8, 3, 2);
  const auto empty = audit_scheme(scheme, 1.0, 0, 0.1);
  CHECK(empty.entries.empty());
  CHECK(empty.passed);

  const double s2 = calibrate_sigma2(0.1, 2, 3, 8).sigma2;
  const auto ok = audit_scheme(scheme, s2, 2, 0.1);
  CHECK(ok.entries.size() == 28);
  CHECK(ok.passed);
  CHECK(ok.exhaustive);
  for (const auto& e : ok.entries) CHECK(e.logdet_nats <= e.frobenius_nats + 1e-9);

  const auto low = audit_scheme(scheme, s2 / 1000, 2, 0.1);
  CHECK_FALSE(low.passed);
  CHECK(low.worst_subset.size() == 2);
  CHECK(low.worst_case_nats > 0.1);

  AuditOptions capped;
  capped.max_subsets = 10;
  CHECK_THROWS_AS(audit_scheme(scheme, s2, 2, 0.1, capped), Error);
  capped.allow_sampling = true;
  capped.samples = 40;
  const auto sampled = audit_scheme(scheme, s2, 2, 0.1, capped);
  CHECK_FALSE(sampled.exhaustive);
  CHECK(sampled.entries.size() == 40);

  const auto csv = leakage_csv(ok);
  CHECK(csv.rfind("subset,frobenius_nats,logdet_nats\n1;2,", 0) == 0);
}

TEST_CASE("calibration closes the audit for Shamir codes") {
  for (std::size_t x = 1; x <= 3; ++x) {
    for (std::size_t p = 1; p <= 4; ++p) {
      for (std::size_t n = p + x; n <= 9; ++n) {
        const auto scheme = NestedCosetScheme::shamir(static_cast<std::int64_t>(n), p, x);
        for (const double delta : {1.0, 1e-2}) {
          const double s2 = calibrate_sigma2(scheme, delta, p).sigma2;
          CHECK(audit_scheme(scheme, s2, x, delta).passed);
        }
      }
    }
  }
}

TEST_CASE("binomials and subsets") {
  CHECK(binomial(9, 7) == 36);
  CHECK(binomial(5, 6) == 0);
  CHECK(binomial(200, 100) == UINT64_MAX);
  const auto s = all_subsets(4, 2);
  CHECK(s.size() == 6);
  CHECK(s.front() == Subset{1, 2});
  CHECK(s.back() == Subset{3, 4});
  CHECK(all_subsets(3, 0).size() == 1);
}
