#pragma once

#include <cstdint>
#include <random>

#include "sdmm/matrix.hpp"

namespace sdmm {

/// splitmix64 finalizer; used to derive independent streams from (seed, index).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

/// Seeded source of the distributions used across the toolkit.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  /// Circularly-symmetric CN(0, sigma2): real and imaginary parts each N(0, sigma2 / 2).
  cplx complex_normal(double sigma2);
  double uniform(double lo, double hi);
  /// Uniform on the closed unit disk, by rejection from the enclosing square.
  cplx unit_disk();

  ComplexMatrix complex_normal_matrix(std::size_t rows, std::size_t cols, double sigma2,
                                      Precision precision = Precision::f64);
  ComplexMatrix uniform_real_matrix(std::size_t rows, std::size_t cols, Precision precision = Precision::f64);
  ComplexMatrix unit_disk_matrix(std::size_t rows, std::size_t cols, Precision precision = Precision::f64);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace sdmm
