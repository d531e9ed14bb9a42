#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "helpers.hpp"
#include "sdmm/error.hpp"
#include "sdmm/laurent.hpp"
#include "sdmm/matrix.hpp"
#include "sdmm/roots.hpp"
#include "sdmm/vandermonde.hpp"

using namespace sdmm;
using testing::naive_product;
using testing::rel_err;

namespace {

LaurentMatrixPoly random_poly(std::int64_t min_exp, std::size_t terms, std::size_t rows, std::size_t cols,
                              std::uint64_t seed) {
  RandomSource rng(seed);
  std::vector<ComplexMatrix> c;
  for (std::size_t j = 0; j < terms; ++j) c.push_back(rng.complex_normal_matrix(rows, cols, 1.0));
  return LaurentMatrixPoly(min_exp, c);
}

// Direct summation of coeff_j z^(min + j) with std::pow, independent of Horner.
ComplexMatrix sum_terms(const LaurentMatrixPoly& p, cplx z) {
  Dense acc = Dense::Zero(static_cast<Eigen::Index>(p.rows()), static_cast<Eigen::Index>(p.cols()));
  for (std::size_t j = 0; j < p.num_terms(); ++j) {
    acc += std::pow(z, static_cast<double>(p.min_exp() + static_cast<std::int64_t>(j))) * p.coeffs()[j].values();
  }
  return ComplexMatrix(acc);
}

}  // namespace

TEST_CASE("roots of unity") {
  const auto one = roots_of_unity(1);
  CHECK(one.alpha(1) == cplx(1, 0));

  const auto four = roots_of_unity(4);
  CHECK(four.alpha(1) == cplx(0, 1));
  CHECK(four.alpha(2) == cplx(-1, 0));
  CHECK(four.alpha(3) == cplx(0, -1));
  CHECK(four.alpha(4) == cplx(1, 0));

  const auto eight = roots_of_unity(8);
  const double h = std::sqrt(2.0) / 2;
  CHECK(std::abs(eight.alpha(1) - cplx(h, h)) < 1e-15);

  CHECK_THROWS_AS(roots_of_unity(0), Error);

  for (std::int64_t n = 1; n <= 32; ++n) {
    const auto r = roots_of_unity(n);
    for (std::int64_t i = 1; i <= n; ++i) {
      CHECK(std::abs(std::abs(r.alpha(i)) - 1.0) < 1e-15);
      for (std::int64_t j = 1; j <= n; ++j) {
        const std::int64_t k = (i + j) % n == 0 ? n : (i + j) % n;
        CHECK(std::abs(r.alpha(i) * r.alpha(j) - r.alpha(k)) < 1e-14);
      }
    }
    for (std::int64_t ell = -2 * n; ell <= 2 * n; ++ell) {
      cplx s = 0;
      for (std::int64_t i = 1; i <= n; ++i) s += RootPoint{n, i}.pow(ell);
      const double want = ell % n == 0 ? static_cast<double>(n) : 0.0;
      CHECK(std::abs(s - want) <= 1e-10 * static_cast<double>(n));
    }
  }
}

TEST_CASE("single precision matrices hold binary32 values") {
  RandomSource rng(1);
  const auto m = rng.complex_normal_matrix(4, 4, 1.0, Precision::f32);
  for (const auto v : m.entries()) {
    CHECK(static_cast<double>(static_cast<float>(v.real())) == v.real());
    CHECK(static_cast<double>(static_cast<float>(v.imag())) == v.imag());
  }
  CHECK(m.precision() == Precision::f32);
  CHECK(parse_precision("single") == Precision::f32);
  CHECK(parse_precision("double") == Precision::f64);
  CHECK_THROWS_AS(parse_precision("half"), Error);
}

TEST_CASE("Laurent evaluation") {
  const auto a0 = ComplexMatrix::from_entries(1, 2, std::vector<cplx>{{1, 2}, {3, -1}});
  const LaurentMatrixPoly constant(0, {a0});
  CHECK(eval_laurent(constant, cplx(0.3, 2.0)) == a0);

  const LaurentMatrixPoly inv(-1, {ComplexMatrix::identity(1)});
  CHECK(std::abs(eval_laurent(inv, cplx(0, 1))(0, 0) - cplx(0, -1)) < 1e-16);
  CHECK_THROWS_AS(eval_laurent(inv, 0.0), Error);

  const auto p = random_poly(-2, 6, 2, 2, 7);
  const auto z = root_of_unity(8, 3);
  CHECK(rel_err(eval_laurent(p, z), sum_terms(p, z)) <= 1e-12);
}

TEST_CASE("coefficientwise conjugation") {
  RandomSource rng(2);
  const LaurentMatrixPoly real_poly(-1, {rng.uniform_real_matrix(2, 2), rng.uniform_real_matrix(2, 2)});
  const auto c = conj_poly(real_poly);
  for (std::size_t j = 0; j < 2; ++j) CHECK(c.coeffs()[j] == real_poly.coeffs()[j]);

  const auto iz = LaurentMatrixPoly::from_terms(std::vector<LaurentMatrixPoly::Term>{
      {1, ComplexMatrix::from_entries(1, 1, std::vector<cplx>{{0, 1}})}});
  CHECK(conj_poly(iz).coeff(1)(0, 0) == cplx(0, -1));

  const auto p = random_poly(-3, 7, 3, 2, 9);
  CHECK(conj_poly(conj_poly(p)).coeffs() == p.coeffs());
  for (std::int64_t k = 0; k < 16; ++k) {
    const auto z = root_of_unity(16, k);
    CHECK(rel_err(eval_laurent(conj_poly(p), 1.0 / z), eval_laurent(p, z).conj()) <= 1e-12);
    const cplx off(0.7, -1.3);
    CHECK(rel_err(eval_laurent(conj_poly(p), std::conj(off)), eval_laurent(p, off).conj()) <= 1e-12);
  }
}

TEST_CASE("interpolation recovers a constant") {
  const auto c = ComplexMatrix::from_entries(2, 1, std::vector<cplx>{{1, 1}, {-2, 0.5}});
  std::vector<Sample> s{{{5, 1}, c}, {{5, 2}, c}, {{5, 4}, c}};
  const auto p = interpolate_laurent(s, 0, 3);
  CHECK(rel_err(p.coeff(0), c) <= 1e-12);
  CHECK(frobenius_norm(p.coeff(1)) <= 1e-12);
  CHECK(frobenius_norm(p.coeff(2)) <= 1e-12);
}

TEST_CASE("interpolation round trip over every root order up to 32") {
  for (std::int64_t n = 1; n <= 32; ++n) {
    const std::int64_t min_exp = -(n / 3);
    const auto terms = static_cast<std::size_t>(std::max<std::int64_t>(1, n - 1));
    const auto p = random_poly(min_exp, terms, 2, 2, static_cast<std::uint64_t>(n));
    for (const bool shortcut : {true, false}) {
      std::vector<Sample> s;
      for (std::int64_t i = 1; i <= n; ++i) s.push_back({{n, i}, eval_laurent(p, root_of_unity(n, i))});
      const auto q = interpolate_laurent(s, min_exp, terms, {shortcut});
      for (std::size_t j = 0; j < terms; ++j) {
        CHECK(rel_err(q.coeffs()[j], p.coeffs()[j]) <= 1e-10);
      }
      for (std::int64_t i = 1; i <= n; ++i) CHECK(rel_err(eval_laurent(q, root_of_unity(n, i)), s[i - 1].value) <= 1e-10);
    }
  }
  const auto p = random_poly(-3, 8, 2, 3, 41);
  std::vector<Sample> s;
  for (std::int64_t i = 1; i <= 8; ++i) s.push_back({{8, i}, eval_laurent(p, root_of_unity(8, i))});
  const auto q = interpolate_laurent(s, -3, 8);
  for (std::size_t j = 0; j < 8; ++j) CHECK(rel_err(q.coeffs()[j], p.coeffs()[j]) <= 1e-10);
}

TEST_CASE("full-circle interpolation is the scaled conjugate DFT") {
  const std::int64_t n = 8;
  std::vector<RootPoint> pts;
  for (std::int64_t i = 1; i <= n; ++i) pts.push_back({n, i});
  const Dense w = interpolation_weights(pts, 0, n);
  const Dense solved = interpolation_weights(pts, 0, n, Precision::f64, {false});
  for (std::int64_t j = 0; j < n; ++j) {
    for (std::int64_t i = 0; i < n; ++i) {
      const cplx want = std::conj(root_of_unity(n, (i + 1) * j)) / static_cast<double>(n);
      CHECK(std::abs(w(j, i) - want) <= 1e-12);
      CHECK(std::abs(solved(j, i) - want) <= 1e-12);
    }
  }
}

TEST_CASE("over-determined interpolation uses least squares") {
  const auto p = random_poly(-1, 3, 2, 2, 4);
  std::vector<Sample> s;
  for (std::int64_t i = 1; i <= 7; ++i) s.push_back({{7, i}, eval_laurent(p, root_of_unity(7, i))});
  const auto q = interpolate_laurent(s, -1, 3);
  for (std::size_t j = 0; j < 3; ++j) CHECK(rel_err(q.coeffs()[j], p.coeffs()[j]) <= 1e-12);
}

TEST_CASE("interpolation errors") {
  const auto c = ComplexMatrix::identity(1);
  std::vector<Sample> two{{{4, 1}, c}, {{4, 2}, c}};
  CHECK_THROWS_AS(interpolate_laurent(two, 0, 3), Error);
  try {
    interpolate_laurent(two, 0, 3);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::insufficient_data);
  }
  std::vector<Sample> dup{{{4, 1}, c}, {{8, 2}, c}};
  try {
    interpolate_laurent(dup, 0, 2);
    FAIL("duplicate points accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_parameter);
  }
}

TEST_CASE("3M and naive products") {
  const auto a = ComplexMatrix::from_entries(1, 1, std::vector<cplx>{{1, 1}});
  const auto b = ComplexMatrix::from_entries(1, 1, std::vector<cplx>{{1, -1}});
  for (const auto m : {MatmulMethod::naive, MatmulMethod::three_m}) {
    CHECK(matmul(a, b, m)(0, 0) == cplx(2, 0));
    RandomSource rng(3);
    const auto x = rng.complex_normal_matrix(5, 5, 1.0);
    CHECK(rel_err(matmul(ComplexMatrix::identity(5), x, m), x) <= 1e-15);
  }
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomSource rng(seed);
    const auto x = rng.unit_disk_matrix(32, 32);
    const auto y = rng.unit_disk_matrix(32, 32);
    const auto oracle = naive_product(x, y);
    CHECK(rel_err(matmul(x, y, MatmulMethod::three_m), oracle) <= 1e-12);
    CHECK(rel_err(matmul(x, y, MatmulMethod::naive), oracle) <= 1e-12);
  }
  CHECK_THROWS_AS(matmul(ComplexMatrix(2, 3), ComplexMatrix(2, 3)), Error);
}

TEST_CASE("norms") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomSource rng(seed);
    const auto a = rng.complex_normal_matrix(16, 16, 1.0);
    const auto b = rng.complex_normal_matrix(16, 16, 1.0);
    CHECK(norm_2(a) <= frobenius_norm(a) * (1 + 1e-12));
    CHECK(norm_2(matmul(a, b)) <= norm_2(a) * norm_2(b) * (1 + 1e-12));
    CHECK(frobenius_norm(matmul(a, b)) <= frobenius_norm(a) * frobenius_norm(b) * (1 + 1e-12));
    CHECK(norm_inf(matmul(a, b)) <= norm_inf(a) * norm_inf(b) * (1 + 1e-12));
  }
}

TEST_CASE("condition numbers") {
  CHECK(cond_2(ComplexMatrix::identity(4)) == doctest::Approx(1.0));
  const auto d = ComplexMatrix::from_entries(2, 2, std::vector<cplx>{2, 0, 0, 1});
  CHECK(cond_2(d) == doctest::Approx(2.0));
  std::vector<std::int64_t> all(8);
  for (int i = 0; i < 8; ++i) all[i] = i;
  CHECK(std::abs(cond_2(GeneralizedVandermonde::standard(8, all).matrix()) - 1.0) <= 1e-10);
  CHECK(std::isinf(cond_2(ComplexMatrix::from_entries(2, 2, std::vector<cplx>{1, 1, 1, 1}))));
  CHECK_THROWS_AS(cond_2(ComplexMatrix(2, 3)), Error);
}

TEST_CASE("generalized Vandermonde matrices") {
  const GeneralizedVandermonde v(12, {1, 5, 7}, {-2, 0, 3});
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::abs(std::abs(v.matrix()(j, i)) - 1.0) < 1e-14);
      CHECK(std::abs(v.matrix()(j, i) - std::pow(root_of_unity(12, v.eval_indices()[i]), v.exponents()[j])) < 1e-13);
    }
  }
  CHECK(std::isfinite(cond_2(v.matrix())));
  CHECK(v.complement_indices().size() == 9);
  CHECK_FALSE(v.consecutive_exponents());
  CHECK(GeneralizedVandermonde(12, {1, 5}, {3, 4}).consecutive_exponents());
  CHECK_THROWS_AS(GeneralizedVandermonde(4, {1, 1}, {0, 1}), Error);
  CHECK_THROWS_AS(GeneralizedVandermonde(4, {0, 4}, {0, 1}), Error);
}
