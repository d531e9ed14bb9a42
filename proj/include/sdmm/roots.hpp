#pragma once

#include <cstdint>
#include <vector>

#include "sdmm/matrix.hpp"

namespace sdmm {

/// omega_n^k computed from the angle 2*pi*k/n (never by repeated
/// multiplication). Quarter turns are returned exactly.
cplx root_of_unity(std::int64_t n, std::int64_t k);

/// A point omega_order^index on the unit circle. Keeping the exact rational
/// angle lets powers be evaluated without accumulating rounding.
struct RootPoint {
  std::int64_t order = 1;
  std::int64_t index = 0;

  cplx value() const { return root_of_unity(order, index); }
  /// (omega_order^index)^exponent, evaluated exactly in the angle.
  cplx pow(std::int64_t exponent) const;
  /// Same point on the circle, regardless of how the fraction is written.
  bool same_point(const RootPoint& other) const;
};

/// The n points alpha_i = omega_n^i for i = 1..n (so alpha_n = 1).
class RootsOfUnity {
 public:
  RootsOfUnity(std::int64_t n, Precision precision = Precision::f64);

  std::int64_t n() const noexcept { return n_; }
  Precision precision() const noexcept { return precision_; }
  /// alpha_i for i in 1..n.
  cplx alpha(std::int64_t i) const;
  RootPoint point(std::int64_t i) const { return {n_, i}; }
  const std::vector<cplx>& points() const noexcept { return points_; }

 private:
  std::int64_t n_;
  Precision precision_;
  std::vector<cplx> points_;
};

RootsOfUnity roots_of_unity(std::int64_t n, Precision precision = Precision::f64);

}  // namespace sdmm
