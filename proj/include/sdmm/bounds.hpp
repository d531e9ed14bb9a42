#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sdmm/matrix.hpp"
#include "sdmm/vandermonde.hpp"

namespace sdmm {

using BigInt = boost::multiprecision::cpp_int;

/// Pi(m): product of the first m entries of 1, 1, 2, 2, 3, 3, ... (OEIS A010551).
BigInt pi(unsigned m);

/// Memoized Pi values for repeated lookups. Not thread-safe; copy per thread.
class PiSequence {
 public:
  const BigInt& operator()(unsigned m);

 private:
  std::vector<BigInt> values_{BigInt(1)};
};

double to_double(const BigInt& v);

// Norm bounds for an m x m Vandermonde matrix W whose evaluation points are
// distinct n-th roots of unity, d = n - m.

/// ||W||_2 <= sqrt(n).
double bound_w_norm(std::int64_t n);
/// ||W^-1||_2 <= n^(d + 3/2) / d!.
double bound_inv_large(std::int64_t n, std::int64_t d);
/// kappa_2(W) <= n^(d + 2) / d!.
double bound_cond_large(std::int64_t n, std::int64_t d);
/// ||W^-1||_2 <= sqrt(m) n^(m-1) / (2^(m-1) Pi(m-1)).
double bound_inv_small_2(std::int64_t n, std::int64_t m);
/// ||W^-1||_F <= m n^(m-1) / (2^(m-1) Pi(m-1)).
double bound_inv_small_F(std::int64_t n, std::int64_t m);

/// W^-1 = B^-1 C A with B the Vandermonde matrix at the betas, A diagonal with
/// A_jj = prod_{j' != j} (alpha_j - alpha_j')^-1 and
/// C_ij = prod_{j' != j} (beta_i - alpha_j').
struct InverseDecomposition {
  ComplexMatrix b;
  ComplexMatrix c;
  ComplexMatrix a;

  /// B^-1 C A, via a dense solve with B.
  ComplexMatrix reconstruct() const;
};

/// W must be square with exponents 0..m-1; the decomposition is of the
/// point-rows layout W(i, j) = alpha_i^(j-1). Betas must be pairwise distinct
/// and must not coincide with any alpha.
InverseDecomposition decompose_inverse(const GeneralizedVandermonde& w, const std::vector<cplx>& betas);

/// beta_i = omega_{2mn} * omega_m^(i-1): never an n-th root of unity.
std::vector<cplx> large_regime_betas(std::int64_t n, std::int64_t m);
/// beta_i = omega_m^(i-1).
std::vector<cplx> small_regime_betas(std::int64_t m);

struct BoundReport {
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t d = 0;
  std::vector<std::int64_t> subset;

  double w_norm2 = 0;
  double inv_norm2 = 0;
  double inv_normF = 0;
  double cond2 = 0;

  double bound_w = 0;
  double bound_inv_large = 0;
  double bound_cond_large = 0;
  double bound_inv_small_2 = 0;
  double bound_inv_small_F = 0;

  /// Names of the bounds this subset violates (empty when all hold).
  std::vector<std::string> violations;
};

/// Measures and checks one subset K of the n-th roots of unity.
BoundReport measure_subset(std::int64_t n, const std::vector<std::int64_t>& subset);

struct VerifyOptions {
  std::int64_t cap = 14;
  unsigned threads = 0;
};

/// Every nonempty subset of the n-th roots for n = 1..n_max, in (n, bitmask)
/// order. Violations are reported, never thrown.
std::vector<BoundReport> verify_bounds_exhaustive(std::int64_t n_max, VerifyOptions options = {});

std::string bounds_csv(const std::vector<BoundReport>& reports);

}  // namespace sdmm
