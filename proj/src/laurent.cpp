#include "sdmm/laurent.hpp"

#include <algorithm>
#include <map>

#include "sdmm/error.hpp"

namespace sdmm {
namespace {

cplx int_pow(cplx z, std::int64_t e) {
  if (e < 0) return int_pow(1.0 / z, -e);
  cplx result{1.0, 0.0};
  while (e > 0) {
    if (e & 1) result *= z;
    z *= z;
    e >>= 1;
  }
  return result;
}

void check_distinct(std::span<const RootPoint> points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(points[i].order >= 1, Errc::invalid_parameter, "interpolation point has non-positive root order");
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      require(!points[i].same_point(points[j]), Errc::invalid_parameter, "interpolation points are not distinct");
    }
  }
}

bool is_full_root_set(std::span<const RootPoint> points, std::size_t num_terms) {
  if (points.size() != num_terms) return false;
  const std::int64_t n = points.front().order;
  if (static_cast<std::size_t>(n) != num_terms) return false;
  return std::all_of(points.begin(), points.end(), [&](const RootPoint& p) { return p.order == n; });
}

template <typename Real>
Dense weights_impl(std::span<const RootPoint> points, std::int64_t min_exp, std::size_t num_terms,
                   InterpolationOptions options) {
  using C = std::complex<Real>;
  using Mat = Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic>;
  const auto n_samples = static_cast<Eigen::Index>(points.size());
  const auto n_terms = static_cast<Eigen::Index>(num_terms);

  // Shifting every evaluation by point^-min_exp leaves an ordinary
  // polynomial in the exponents 0 .. num_terms-1.
  Mat v(n_samples, n_terms);
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    for (Eigen::Index j = 0; j < n_terms; ++j) v(i, j) = C(points[static_cast<std::size_t>(i)].pow(j));
  }

  Mat inverse;
  if (options.allow_dft_shortcut && is_full_root_set(points, num_terms)) {
    inverse = v.adjoint() / static_cast<Real>(n_terms);
  } else if (n_samples == n_terms) {
    inverse = v.partialPivLu().solve(Mat::Identity(n_samples, n_samples));
  } else {
    inverse = v.colPivHouseholderQr().solve(Mat::Identity(n_samples, n_samples));
  }

  Dense w(n_terms, n_samples);
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    const C shift(points[static_cast<std::size_t>(i)].pow(-min_exp));
    for (Eigen::Index j = 0; j < n_terms; ++j) w(j, i) = cplx(inverse(j, i) * shift);
  }
  return w;
}

}  // namespace

LaurentMatrixPoly::LaurentMatrixPoly(std::int64_t min_exp, std::vector<ComplexMatrix> coeffs)
    : min_exp_(min_exp), coeffs_(std::move(coeffs)) {
  require(!coeffs_.empty(), Errc::invalid_parameter, "Laurent polynomial needs at least one coefficient");
  for (const auto& c : coeffs_) {
    require(c.rows() == coeffs_.front().rows() && c.cols() == coeffs_.front().cols(), Errc::dimension_mismatch,
            "Laurent polynomial coefficients must share dimensions");
    require(c.precision() == coeffs_.front().precision(), Errc::invalid_parameter,
            "Laurent polynomial coefficients must share precision");
  }
}

LaurentMatrixPoly LaurentMatrixPoly::from_terms(std::span<const Term> terms) {
  require(!terms.empty(), Errc::invalid_parameter, "from_terms: no terms");
  std::map<std::int64_t, const ComplexMatrix*> by_exp;
  for (const auto& t : terms) {
    require(by_exp.emplace(t.exponent, &t.coeff).second, Errc::invalid_parameter,
            "from_terms: repeated exponent " + std::to_string(t.exponent));
  }
  const std::int64_t lo = by_exp.begin()->first;
  const std::int64_t hi = by_exp.rbegin()->first;
  const ComplexMatrix& first = terms.front().coeff;
  const ComplexMatrix zero(first.rows(), first.cols(), first.precision());
  std::vector<ComplexMatrix> coeffs;
  coeffs.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t e = lo; e <= hi; ++e) {
    const auto it = by_exp.find(e);
    coeffs.push_back(it == by_exp.end() ? zero : *it->second);
  }
  return LaurentMatrixPoly(lo, std::move(coeffs));
}

ComplexMatrix LaurentMatrixPoly::coeff(std::int64_t exponent) const {
  if (exponent < min_exp_ || exponent > max_exp()) return ComplexMatrix(rows(), cols(), precision());
  return coeffs_[static_cast<std::size_t>(exponent - min_exp_)];
}

ComplexMatrix eval_laurent(const LaurentMatrixPoly& p, cplx z) {
  if (z == cplx(0.0)) {
    require(p.min_exp() >= 0, Errc::domain_error, "cannot evaluate a Laurent polynomial with negative exponents at 0");
    return p.min_exp() == 0 ? p.coeffs().front() : ComplexMatrix(p.rows(), p.cols(), p.precision());
  }
  return dispatch(p.precision(), [&](auto real) {
    using R = decltype(real);
    using C = std::complex<R>;
    const C zz(z);
    DenseOf<R> acc = p.coeffs().back().template as<R>();
    for (std::size_t j = p.num_terms() - 1; j-- > 0;) {
      acc = (zz * acc + p.coeffs()[j].template as<R>()).eval();
    }
    const C shift(int_pow(z, p.min_exp()));
    return ComplexMatrix(Dense((shift * acc).template cast<cplx>()), p.precision());
  });
}

LaurentMatrixPoly conj_poly(const LaurentMatrixPoly& p) {
  std::vector<ComplexMatrix> coeffs;
  coeffs.reserve(p.num_terms());
  for (const auto& c : p.coeffs()) coeffs.push_back(c.conj());
  return LaurentMatrixPoly(p.min_exp(), std::move(coeffs));
}

Dense interpolation_weights(std::span<const RootPoint> points, std::int64_t min_exp, std::size_t num_terms,
                            Precision precision, InterpolationOptions options) {
  require(num_terms >= 1, Errc::invalid_parameter, "interpolation window must be nonempty");
  require(points.size() >= num_terms, Errc::insufficient_data,
          "interpolating " + std::to_string(num_terms) + " coefficients needs at least that many points, got " +
              std::to_string(points.size()));
  check_distinct(points);
  return dispatch(precision, [&](auto real) { return weights_impl<decltype(real)>(points, min_exp, num_terms, options); });
}

LaurentMatrixPoly interpolate_laurent(std::span<const Sample> samples, std::int64_t min_exp, std::size_t num_terms,
                                      InterpolationOptions options) {
  require(!samples.empty(), Errc::insufficient_data, "no samples to interpolate");
  std::vector<RootPoint> points;
  std::vector<ComplexMatrix> values;
  points.reserve(samples.size());
  values.reserve(samples.size());
  for (const auto& s : samples) {
    points.push_back(s.point);
    values.push_back(s.value);
  }
  const Precision precision = values.front().precision();
  const Dense w = interpolation_weights(points, min_exp, num_terms, precision, options);
  std::vector<ComplexMatrix> coeffs;
  coeffs.reserve(num_terms);
  std::vector<cplx> row(points.size());
  for (std::size_t j = 0; j < num_terms; ++j) {
    for (std::size_t i = 0; i < points.size(); ++i) row[i] = w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
    coeffs.push_back(linear_combination(row, values));
  }
  return LaurentMatrixPoly(min_exp, std::move(coeffs));
}

}  // namespace sdmm
