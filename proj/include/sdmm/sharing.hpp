#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdmm/matrix.hpp"
#include "sdmm/vandermonde.hpp"

namespace sdmm {

/// Nested coset code over C: s_hat = s * G_enc + r * G_sec, where both
/// generators are generalized Vandermonde matrices over the same n points.
class NestedCosetScheme {
 public:
  NestedCosetScheme(GeneralizedVandermonde g_enc, GeneralizedVandermonde g_sec);

  /// Points alpha_i = omega_n^i for i = 1..n, data exponents 0..m-1 and
  /// security exponents m..m+t-1.
  static NestedCosetScheme shamir(std::int64_t n, std::size_t m, std::size_t t);

  const GeneralizedVandermonde& g_enc() const noexcept { return g_enc_; }
  const GeneralizedVandermonde& g_sec() const noexcept { return g_sec_; }
  std::size_t m() const noexcept { return g_enc_.num_rows(); }
  std::size_t k() const noexcept { return g_sec_.num_rows(); }
  std::size_t n() const noexcept { return g_enc_.num_points(); }
  bool consecutive_sec_exponents() const noexcept { return consecutive_; }

 private:
  GeneralizedVandermonde g_enc_;
  GeneralizedVandermonde g_sec_;
  bool consecutive_;
};

/// Noise level of a sharing: each random coefficient is CN(0, sigma2).
struct NoiseSpec {
  double sigma2 = 0.0;
  double delta = 0.0;
  std::size_t x = 0;
  std::size_t p = 0;
  std::size_t n_workers = 0;
  /// 1 for complex inputs, 2 for complexified real inputs (modulus up to sqrt 2).
  unsigned real_factor = 1;
};

/// sigma^2 = real_factor / delta * P X^3 / (4^(X-1) Pi(X-1)^2) * N^(2X-2).
NoiseSpec calibrate_sigma2(double delta, std::size_t x, std::size_t p, std::size_t n_workers,
                           unsigned real_factor = 1);

/// Same as calibrate_sigma2 but refuses schemes whose security exponents are
/// not consecutive (no closed form is known for those).
NoiseSpec calibrate_sigma2(const NestedCosetScheme& scheme, double delta, std::size_t p, unsigned real_factor = 1);

/// One share vector of length n for a secret of length m.
std::vector<cplx> share(std::span<const cplx> secret, const NestedCosetScheme& scheme, const NoiseSpec& noise,
                        std::uint64_t seed);

/// Share every row of `secrets` (rows x m) independently; result is rows x n.
ComplexMatrix share_rows(const ComplexMatrix& secrets, const NestedCosetScheme& scheme, const NoiseSpec& noise,
                         std::uint64_t seed);

/// 1-based worker positions; |subset| must equal scheme.k().
using Subset = std::vector<std::size_t>;

/// (power / sigma2) * ||G_enc_T G_sec_T^-1||_F^2 in nats per symbol, where the
/// inputs satisfy tr(Q) <= power * m. +inf when G_sec_T is singular.
double leakage_bound_frobenius(const NestedCosetScheme& scheme, const Subset& subset, double sigma2,
                               double power = 1.0);

/// (1/m) log det(I + H Q H^* / sigma2) with H = (G_enc_T G_sec_T^-1)^T.
double leakage_bound_logdet(const NestedCosetScheme& scheme, const Subset& subset, double sigma2,
                            const ComplexMatrix& q);

/// Largest log-det bound over all Q >= 0 with tr(Q) <= power * m (water-filling).
double leakage_bound_logdet_worst(const NestedCosetScheme& scheme, const Subset& subset, double sigma2,
                                  double power = 1.0);

struct LeakageEntry {
  Subset subset;
  double frobenius_nats = 0.0;
  double logdet_nats = 0.0;
};

struct LeakageReport {
  std::vector<LeakageEntry> entries;
  double worst_case_nats = 0.0;
  Subset worst_subset;
  double delta_target = 0.0;
  bool exhaustive = true;
  bool passed = true;
};

struct AuditOptions {
  double power = 1.0;
  std::uint64_t max_subsets = 100000;
  /// Allow Monte Carlo sampling of subsets when C(n, t) exceeds max_subsets.
  bool allow_sampling = false;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

/// Evaluates both leakage bounds on every size-t subset; passes iff the worst
/// Frobenius bound is at most delta.
LeakageReport audit_scheme(const NestedCosetScheme& scheme, double sigma2, std::size_t t, double delta,
                           AuditOptions options = {});

std::string leakage_csv(const LeakageReport& report);

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// All size-k subsets of {1..n} in lexicographic order.
std::vector<Subset> all_subsets(std::size_t n, std::size_t k);

}  // namespace sdmm
