#include <cmath>
#include <cstdlib>
#include <string>

#include "sdmm/parallel.hpp"
#include "sdmm/random.hpp"

namespace sdmm {

unsigned default_thread_count() {
  if (const char* env = std::getenv("SDMM_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

cplx RandomSource::complex_normal(double sigma2) {
  const double scale = std::sqrt(sigma2 / 2.0);
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {scale * re, scale * im};
}

double RandomSource::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

cplx RandomSource::unit_disk() {
  for (;;) {
    const double re = uniform(-1.0, 1.0);
    const double im = uniform(-1.0, 1.0);
    if (re * re + im * im <= 1.0) return {re, im};
  }
}

ComplexMatrix RandomSource::complex_normal_matrix(std::size_t rows, std::size_t cols, double sigma2,
                                                  Precision precision) {
  Dense v(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = complex_normal(sigma2);
  return ComplexMatrix(std::move(v), precision);
}

ComplexMatrix RandomSource::uniform_real_matrix(std::size_t rows, std::size_t cols, Precision precision) {
  Dense v(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = {uniform(-1.0, 1.0), 0.0};
  return ComplexMatrix(std::move(v), precision);
}

ComplexMatrix RandomSource::unit_disk_matrix(std::size_t rows, std::size_t cols, Precision precision) {
  Dense v(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = unit_disk();
  return ComplexMatrix(std::move(v), precision);
}

}  // namespace sdmm
