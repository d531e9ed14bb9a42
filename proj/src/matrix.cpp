#include "sdmm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdmm/error.hpp"

namespace sdmm {
namespace {

Dense round_to(Dense values, Precision precision) {
  if (precision == Precision::f32) {
    return values.cast<std::complex<float>>().cast<cplx>();
  }
  return values;
}

Precision common_precision(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.precision() == b.precision(), Errc::invalid_parameter, "operands have different precision");
  return a.precision();
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), Errc::dimension_mismatch,
          std::string(op) + ": shapes " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " and " +
              std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + " differ");
}

template <typename Real>
ComplexMatrix wrap(const DenseOf<Real>& values, Precision precision) {
  return ComplexMatrix(values.template cast<cplx>(), precision);
}

template <typename Real>
DenseOf<Real> three_m_product(const DenseOf<Real>& a, const DenseOf<Real>& b) {
  using RealMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RealMat ar = a.real(), ai = a.imag(), br = b.real(), bi = b.imag();
  const RealMat p1 = ar * br;
  const RealMat p2 = ai * bi;
  const RealMat p3 = (ar + ai) * (br + bi);
  DenseOf<Real> out(a.rows(), b.cols());
  out.real() = p1 - p2;
  out.imag() = p3 - p1 - p2;
  return out;
}

}  // namespace

const char* to_string(Precision p) noexcept { return p == Precision::f32 ? "single" : "double"; }

Precision parse_precision(const std::string& name) {
  if (name == "single" || name == "f32" || name == "float") return Precision::f32;
  if (name == "double" || name == "f64") return Precision::f64;
  fail(Errc::invalid_parameter, "unknown precision '" + name + "' (expected single or double)");
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, Precision precision)
    : values_(Dense::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols))),
      precision_(precision) {}

ComplexMatrix::ComplexMatrix(Dense values, Precision precision)
    : values_(round_to(std::move(values), precision)), precision_(precision) {}

ComplexMatrix::ComplexMatrix(const DenseOf<float>& values)
    : values_(values.cast<cplx>()), precision_(Precision::f32) {}

ComplexMatrix ComplexMatrix::identity(std::size_t n, Precision precision) {
  const auto k = static_cast<Eigen::Index>(n);
  return ComplexMatrix(Dense::Identity(k, k), precision);
}

ComplexMatrix ComplexMatrix::from_real(const Eigen::MatrixXd& values, Precision precision) {
  return ComplexMatrix(Dense(values.cast<cplx>()), precision);
}

ComplexMatrix ComplexMatrix::from_entries(std::size_t rows, std::size_t cols, std::span<const cplx> entries,
                                          Precision precision) {
  require(entries.size() == rows * cols, Errc::dimension_mismatch,
          "entry count " + std::to_string(entries.size()) + " does not match " + std::to_string(rows) + "x" +
              std::to_string(cols));
  Dense values(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::copy(entries.begin(), entries.end(), values.data());
  return ComplexMatrix(std::move(values), precision);
}

ComplexMatrix ComplexMatrix::with_precision(Precision precision) const { return ComplexMatrix(values_, precision); }

ComplexMatrix ComplexMatrix::conj() const { return ComplexMatrix(values_.conjugate(), precision_); }

ComplexMatrix ComplexMatrix::transpose() const { return ComplexMatrix(values_.transpose(), precision_); }

ComplexMatrix ComplexMatrix::adjoint() const { return ComplexMatrix(values_.adjoint(), precision_); }

ComplexMatrix ComplexMatrix::real_part() const {
  return ComplexMatrix(Dense(values_.real().cast<cplx>()), precision_);
}

ComplexMatrix ComplexMatrix::imag_part() const {
  return ComplexMatrix(Dense(values_.imag().cast<cplx>()), precision_);
}

ComplexMatrix ComplexMatrix::block(std::size_t row, std::size_t col, std::size_t nrows, std::size_t ncols) const {
  require(row + nrows <= rows() && col + ncols <= cols(), Errc::dimension_mismatch, "block out of range");
  return ComplexMatrix(Dense(values_.block(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col),
                                           static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(ncols))),
                       precision_);
}

bool ComplexMatrix::is_real() const { return (values_.imag().array() == 0.0).all(); }

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "add");
  const Precision p = common_precision(a, b);
  return dispatch(p, [&](auto real) {
    using R = decltype(real);
    return wrap<R>(a.as<R>() + b.as<R>(), p);
  });
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "subtract");
  const Precision p = common_precision(a, b);
  return dispatch(p, [&](auto real) {
    using R = decltype(real);
    return wrap<R>(a.as<R>() - b.as<R>(), p);
  });
}

ComplexMatrix operator*(cplx s, const ComplexMatrix& a) {
  return dispatch(a.precision(), [&](auto real) {
    using R = decltype(real);
    const std::complex<R> scale(static_cast<R>(s.real()), static_cast<R>(s.imag()));
    return wrap<R>(scale * a.as<R>(), a.precision());
  });
}

bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.precision() == b.precision() && a.rows() == b.rows() && a.cols() == b.cols() &&
         a.values() == b.values();
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b, MatmulMethod method) {
  require(a.cols() == b.rows(), Errc::dimension_mismatch,
          "matmul: inner dimensions " + std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + " differ");
  const Precision p = common_precision(a, b);
  return dispatch(p, [&](auto real) {
    using R = decltype(real);
    if (method == MatmulMethod::three_m) return wrap<R>(three_m_product<R>(a.as<R>(), b.as<R>()), p);
    return wrap<R>(a.as<R>() * b.as<R>(), p);
  });
}

ComplexMatrix hstack(const ComplexMatrix& left, const ComplexMatrix& right) {
  require(left.rows() == right.rows(), Errc::dimension_mismatch, "hstack: row counts differ");
  const Precision p = common_precision(left, right);
  Dense out(left.values().rows(), left.values().cols() + right.values().cols());
  out << left.values(), right.values();
  return ComplexMatrix(std::move(out), p);
}

ComplexMatrix vstack(const ComplexMatrix& top, const ComplexMatrix& bottom) {
  require(top.cols() == bottom.cols(), Errc::dimension_mismatch, "vstack: column counts differ");
  const Precision p = common_precision(top, bottom);
  Dense out(top.values().rows() + bottom.values().rows(), top.values().cols());
  out << top.values(), bottom.values();
  return ComplexMatrix(std::move(out), p);
}

ComplexMatrix linear_combination(std::span<const cplx> weights, std::span<const ComplexMatrix> terms) {
  require(weights.size() == terms.size(), Errc::dimension_mismatch, "linear_combination: weight count mismatch");
  require(!terms.empty(), Errc::invalid_parameter, "linear_combination: no terms");
  const Precision p = terms.front().precision();
  for (const auto& t : terms) {
    require_same_shape(terms.front(), t, "linear_combination");
    require(t.precision() == p, Errc::invalid_parameter, "linear_combination: mixed precision");
  }
  return dispatch(p, [&](auto real) {
    using R = decltype(real);
    DenseOf<R> acc = DenseOf<R>::Zero(terms.front().values().rows(), terms.front().values().cols());
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::complex<R> w(static_cast<R>(weights[i].real()), static_cast<R>(weights[i].imag()));
      if (w == std::complex<R>(0)) continue;
      acc.noalias() += w * terms[i].as<R>();
    }
    return wrap<R>(acc, p);
  });
}

double frobenius_norm(const ComplexMatrix& m) { return m.values().norm(); }

double norm_2(const ComplexMatrix& m) {
  const auto s = singular_values(m);
  return s.empty() ? 0.0 : s.front();
}

double norm_inf(const ComplexMatrix& m) {
  if (m.empty()) return 0.0;
  return m.values().cwiseAbs().rowwise().sum().maxCoeff();
}

double max_norm(const ComplexMatrix& m) {
  if (m.empty()) return 0.0;
  return m.values().cwiseAbs().maxCoeff();
}

std::vector<double> singular_values(const ComplexMatrix& m) {
  if (m.empty()) return {};
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m.values());
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

double singular_tolerance(double largest_singular_value) {
  return 1e3 * std::numeric_limits<double>::epsilon() * largest_singular_value;
}

double cond_2(const ComplexMatrix& m) {
  require(m.rows() == m.cols(), Errc::invalid_parameter, "cond_2 requires a square matrix");
  const auto s = singular_values(m);
  if (s.empty()) return 1.0;
  const double smin = s.back();
  if (smin <= singular_tolerance(s.front())) return std::numeric_limits<double>::infinity();
  return s.front() / smin;
}

std::size_t numerical_rank(const ComplexMatrix& m) {
  const auto s = singular_values(m);
  if (s.empty()) return 0;
  const double tol = singular_tolerance(s.front());
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [&](double v) { return v > tol; }));
}

double relative_error(const ComplexMatrix& computed, const ComplexMatrix& reference) {
  require(computed.rows() == reference.rows() && computed.cols() == reference.cols(), Errc::dimension_mismatch,
          "relative_error: shapes differ");
  const double denom = reference.values().norm();
  const double num = (computed.values() - reference.values()).norm();
  if (denom == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / denom;
}

}  // namespace sdmm
