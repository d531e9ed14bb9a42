#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

namespace sdmm {

using cplx = std::complex<double>;

/// Working precision of a computation. Values of an f32 matrix are always
/// exactly representable in IEEE binary32 and arithmetic on them is done in
/// single precision.
enum class Precision { f32, f64 };

const char* to_string(Precision p) noexcept;
Precision parse_precision(const std::string& name);

template <typename Real>
using DenseOf = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Dense = DenseOf<double>;

/// Dense row-major complex matrix with a precision tag. Immutable once built;
/// every operation returns a new value.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols, Precision precision = Precision::f64);
  explicit ComplexMatrix(Dense values, Precision precision = Precision::f64);
  explicit ComplexMatrix(const DenseOf<float>& values);

  static ComplexMatrix identity(std::size_t n, Precision precision = Precision::f64);
  static ComplexMatrix from_real(const Eigen::MatrixXd& values, Precision precision = Precision::f64);
  /// Row-major entries; size must equal rows * cols.
  static ComplexMatrix from_entries(std::size_t rows, std::size_t cols, std::span<const cplx> entries,
                                    Precision precision = Precision::f64);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  bool empty() const noexcept { return values_.size() == 0; }
  Precision precision() const noexcept { return precision_; }

  cplx operator()(std::size_t r, std::size_t c) const { return values_(r, c); }
  const Dense& values() const noexcept { return values_; }
  std::span<const cplx> entries() const noexcept { return {values_.data(), size()}; }

  /// Copy of the entries in the working scalar type.
  template <typename Real>
  DenseOf<Real> as() const {
    if constexpr (std::is_same_v<Real, double>) {
      return values_;
    } else {
      return values_.template cast<std::complex<Real>>();
    }
  }

  ComplexMatrix with_precision(Precision precision) const;
  ComplexMatrix conj() const;
  ComplexMatrix transpose() const;
  ComplexMatrix adjoint() const;
  ComplexMatrix real_part() const;
  ComplexMatrix imag_part() const;
  ComplexMatrix block(std::size_t row, std::size_t col, std::size_t rows, std::size_t cols) const;

  bool is_real() const;

  friend ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
  friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
  friend ComplexMatrix operator*(cplx s, const ComplexMatrix& a);
  friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b);

 private:
  Dense values_;
  Precision precision_ = Precision::f64;
};

/// Calls fn(Real{}) with Real = float or double according to the precision.
template <typename Fn>
decltype(auto) dispatch(Precision p, Fn&& fn) {
  if (p == Precision::f32) return fn(float{});
  return fn(double{});
}

enum class MatmulMethod { naive, three_m };

/// Complex matrix product. three_m uses 3 real matrix products instead of 4.
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b,
                     MatmulMethod method = MatmulMethod::naive);

ComplexMatrix hstack(const ComplexMatrix& left, const ComplexMatrix& right);
ComplexMatrix vstack(const ComplexMatrix& top, const ComplexMatrix& bottom);

/// Sum_i weights[i] * terms[i], accumulated in the terms' working precision.
ComplexMatrix linear_combination(std::span<const cplx> weights, std::span<const ComplexMatrix> terms);

double frobenius_norm(const ComplexMatrix& m);
double norm_2(const ComplexMatrix& m);
double norm_inf(const ComplexMatrix& m);
double max_norm(const ComplexMatrix& m);

/// Singular values in descending order (computed in double).
std::vector<double> singular_values(const ComplexMatrix& m);

/// Zero threshold used for rank and singularity decisions.
double singular_tolerance(double largest_singular_value);

/// kappa_2 = s_max / s_min, +inf when s_min is numerically zero.
double cond_2(const ComplexMatrix& m);

std::size_t numerical_rank(const ComplexMatrix& m);

/// ||computed - reference||_F / ||reference||_F.
double relative_error(const ComplexMatrix& computed, const ComplexMatrix& reference);

}  // namespace sdmm
