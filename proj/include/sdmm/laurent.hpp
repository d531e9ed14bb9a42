#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sdmm/matrix.hpp"
#include "sdmm/roots.hpp"

namespace sdmm {

/// Laurent polynomial with matrix coefficients: sum_j coeffs[j] z^(min_exp + j).
class LaurentMatrixPoly {
 public:
  struct Term {
    std::int64_t exponent;
    ComplexMatrix coeff;
  };

  LaurentMatrixPoly(std::int64_t min_exp, std::vector<ComplexMatrix> coeffs);
  /// Builds the dense exponent window spanned by the given terms; unlisted
  /// exponents in between get zero coefficients. Exponents must be distinct.
  static LaurentMatrixPoly from_terms(std::span<const Term> terms);

  std::int64_t min_exp() const noexcept { return min_exp_; }
  std::int64_t max_exp() const noexcept { return min_exp_ + static_cast<std::int64_t>(coeffs_.size()) - 1; }
  std::size_t num_terms() const noexcept { return coeffs_.size(); }
  std::size_t rows() const noexcept { return coeffs_.front().rows(); }
  std::size_t cols() const noexcept { return coeffs_.front().cols(); }
  Precision precision() const noexcept { return coeffs_.front().precision(); }

  const std::vector<ComplexMatrix>& coeffs() const noexcept { return coeffs_; }
  /// Coefficient of z^exponent (zero matrix outside the window).
  ComplexMatrix coeff(std::int64_t exponent) const;

 private:
  std::int64_t min_exp_;
  std::vector<ComplexMatrix> coeffs_;
};

/// Horner evaluation of z^min_exp * (ordinary polynomial).
ComplexMatrix eval_laurent(const LaurentMatrixPoly& p, cplx z);

/// Coefficientwise conjugation; eval(conj_poly(p), conj(z)) == conj(eval(p, z)).
LaurentMatrixPoly conj_poly(const LaurentMatrixPoly& p);

struct Sample {
  RootPoint point;
  ComplexMatrix value;
};

struct InterpolationOptions {
  /// When the samples are all n-th roots of unity and the window has n terms,
  /// invert with V^-1 = V^* / n instead of a dense solve.
  bool allow_dft_shortcut = true;
};

/// Row j gives the weights w_{j,i} such that coefficient (min_exp + j) of the
/// interpolant equals sum_i w_{j,i} * value_i. Square systems are solved
/// directly, over-determined ones in the least-squares sense.
Dense interpolation_weights(std::span<const RootPoint> points, std::int64_t min_exp, std::size_t num_terms,
                            Precision precision = Precision::f64, InterpolationOptions options = {});

/// Unique Laurent polynomial with exponents min_exp .. min_exp + num_terms - 1
/// matching the samples (least squares when there are more samples than terms).
LaurentMatrixPoly interpolate_laurent(std::span<const Sample> samples, std::int64_t min_exp, std::size_t num_terms,
                                      InterpolationOptions options = {});

}  // namespace sdmm
