#include "sdmm/roots.hpp"

#include <cmath>
#include <numbers>

#include "sdmm/error.hpp"

namespace sdmm {
namespace {

std::int64_t positive_mod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

// (a * b) mod n without overflow for the magnitudes used here.
std::int64_t mul_mod(std::int64_t a, std::int64_t b, std::int64_t n) {
  return static_cast<std::int64_t>(static_cast<__int128>(positive_mod(a, n)) * positive_mod(b, n) % n);
}

cplx round_point(cplx z, Precision precision) {
  if (precision == Precision::f32) {
    return {static_cast<double>(static_cast<float>(z.real())), static_cast<double>(static_cast<float>(z.imag()))};
  }
  return z;
}

}  // namespace

cplx root_of_unity(std::int64_t n, std::int64_t k) {
  require(n >= 1, Errc::invalid_parameter, "root order must be positive");
  const std::int64_t r = positive_mod(k, n);
  if ((4 * r) % n == 0) {
    switch ((4 * r) / n) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  // Symmetric reduction keeps the angle in [-pi, pi].
  const std::int64_t s = 2 * r > n ? r - n : r;
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(s) / static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

cplx RootPoint::pow(std::int64_t exponent) const { return root_of_unity(order, mul_mod(index, exponent, order)); }

bool RootPoint::same_point(const RootPoint& other) const {
  const auto a = static_cast<__int128>(positive_mod(index, order)) * other.order;
  const auto b = static_cast<__int128>(positive_mod(other.index, other.order)) * order;
  return a == b;
}

RootsOfUnity::RootsOfUnity(std::int64_t n, Precision precision) : n_(n), precision_(precision) {
  require(n >= 1, Errc::invalid_parameter, "roots_of_unity: n must be at least 1");
  points_.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 1; i <= n; ++i) points_.push_back(round_point(root_of_unity(n, i), precision));
}

cplx RootsOfUnity::alpha(std::int64_t i) const {
  require(i >= 1 && i <= n_, Errc::invalid_parameter, "alpha index out of range");
  return points_[static_cast<std::size_t>(i - 1)];
}

RootsOfUnity roots_of_unity(std::int64_t n, Precision precision) { return RootsOfUnity(n, precision); }

}  // namespace sdmm
