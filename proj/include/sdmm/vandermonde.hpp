#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sdmm/matrix.hpp"
#include "sdmm/roots.hpp"

namespace sdmm {

/// r x m matrix with entries V(j, i) = (omega_n^{k_i})^{gamma_j}: one row per
/// exponent, one column per evaluation point.
class GeneralizedVandermonde {
 public:
  GeneralizedVandermonde(std::int64_t n, std::vector<std::int64_t> eval_indices, std::vector<std::int64_t> exponents);

  /// Ordinary Vandermonde (exponents 0..m-1) at the given points.
  static GeneralizedVandermonde standard(std::int64_t n, std::vector<std::int64_t> eval_indices);

  std::int64_t n() const noexcept { return n_; }
  const std::vector<std::int64_t>& eval_indices() const noexcept { return eval_indices_; }
  const std::vector<std::int64_t>& exponents() const noexcept { return exponents_; }
  std::size_t num_rows() const noexcept { return exponents_.size(); }
  std::size_t num_points() const noexcept { return eval_indices_.size(); }

  /// Exponent rows x point columns.
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  /// Point rows x exponent columns (the layout used by interpolation).
  ComplexMatrix points_by_exponents() const { return matrix_.transpose(); }

  /// Same exponents restricted to the listed columns (positions into eval_indices).
  GeneralizedVandermonde columns(std::span<const std::size_t> positions) const;

  /// The indices in [0, n) that are not evaluation points.
  std::vector<std::int64_t> complement_indices() const;

  bool consecutive_exponents() const;

 private:
  std::int64_t n_;
  std::vector<std::int64_t> eval_indices_;
  std::vector<std::int64_t> exponents_;
  ComplexMatrix matrix_;
};

}  // namespace sdmm
