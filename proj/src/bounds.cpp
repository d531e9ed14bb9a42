#include "sdmm/bounds.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "sdmm/csv.hpp"
#include "sdmm/error.hpp"
#include "sdmm/parallel.hpp"
#include "sdmm/roots.hpp"

namespace sdmm {
namespace {

using BigFloat = boost::multiprecision::cpp_bin_float_50;

BigInt factorial(std::int64_t k) {
  BigInt out = 1;
  for (std::int64_t i = 2; i <= k; ++i) out *= i;
  return out;
}

BigInt power(std::int64_t base, std::int64_t e) {
  BigInt out = 1;
  for (std::int64_t i = 0; i < e; ++i) out *= base;
  return out;
}

double ratio(const BigInt& num, const BigInt& den) { return static_cast<double>(BigFloat(num) / BigFloat(den)); }

// n^(m-1) / (2^(m-1) Pi(m-1)), shared by both small-regime bounds.
double small_regime_core(std::int64_t n, std::int64_t m) {
  require(m >= 1 && m <= n, Errc::invalid_parameter, "small-regime bounds need 1 <= m <= n");
  return ratio(power(n, m - 1), power(2, m - 1) * pi(static_cast<unsigned>(m - 1)));
}

void check_large(std::int64_t n, std::int64_t d) {
  require(n >= 1 && d >= 0 && d < n, Errc::invalid_parameter, "large-regime bounds need 0 <= d < n");
}

}  // namespace

BigInt pi(unsigned m) {
  BigInt out = 1;
  for (unsigned i = 1; i <= m; ++i) out *= (i + 1) / 2;
  return out;
}

const BigInt& PiSequence::operator()(unsigned m) {
  while (values_.size() <= m) {
    const auto next = static_cast<unsigned>(values_.size());
    values_.push_back(values_.back() * ((next + 1) / 2));
  }
  return values_[m];
}

double to_double(const BigInt& v) { return static_cast<double>(BigFloat(v)); }

double bound_w_norm(std::int64_t n) {
  require(n >= 1, Errc::invalid_parameter, "n must be positive");
  return std::sqrt(static_cast<double>(n));
}

double bound_inv_large(std::int64_t n, std::int64_t d) {
  check_large(n, d);
  return ratio(power(n, d + 1), factorial(d)) * std::sqrt(static_cast<double>(n));
}

double bound_cond_large(std::int64_t n, std::int64_t d) {
  check_large(n, d);
  return ratio(power(n, d + 2), factorial(d));
}

double bound_inv_small_2(std::int64_t n, std::int64_t m) {
  return std::sqrt(static_cast<double>(m)) * small_regime_core(n, m);
}

double bound_inv_small_F(std::int64_t n, std::int64_t m) { return static_cast<double>(m) * small_regime_core(n, m); }

ComplexMatrix InverseDecomposition::reconstruct() const {
  const Dense ca = c.values() * a.values();
  return ComplexMatrix(Dense(b.values().partialPivLu().solve(ca)));
}

InverseDecomposition decompose_inverse(const GeneralizedVandermonde& w, const std::vector<cplx>& betas) {
  const std::size_t m = w.num_points();
  require(w.num_rows() == m, Errc::invalid_parameter, "decompose_inverse needs a square matrix");
  for (std::size_t j = 0; j < m; ++j) {
    require(w.exponents()[j] == static_cast<std::int64_t>(j), Errc::invalid_parameter,
            "decompose_inverse needs the exponents 0..m-1");
  }
  require(betas.size() == m, Errc::invalid_parameter, "need exactly m betas");

  std::vector<cplx> alpha(m);
  for (std::size_t j = 0; j < m; ++j) alpha[j] = root_of_unity(w.n(), w.eval_indices()[j]);

  constexpr double collision_tol = 1e-12;
  for (std::size_t i = 0; i < m; ++i) {
    require(std::abs(std::abs(betas[i]) - 1.0) < 1e-9, Errc::invalid_parameter, "betas must have unit modulus");
    for (std::size_t k = i + 1; k < m; ++k) {
      require(std::abs(betas[i] - betas[k]) > collision_tol, Errc::invalid_parameter, "betas must be distinct");
    }
    for (std::size_t j = 0; j < m; ++j) {
      require(std::abs(betas[i] - alpha[j]) > collision_tol, Errc::invalid_parameter,
              "beta " + std::to_string(i) + " coincides with an evaluation point; perturb the betas");
    }
  }

  const auto mm = static_cast<Eigen::Index>(m);
  Dense a = Dense::Zero(mm, mm);
  Dense c(mm, mm);
  Dense b(mm, mm);
  for (std::size_t j = 0; j < m; ++j) {
    cplx prod{1.0, 0.0};
    for (std::size_t k = 0; k < m; ++k) {
      if (k != j) prod *= alpha[j] - alpha[k];
    }
    a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = 1.0 / prod;
  }
  for (std::size_t i = 0; i < m; ++i) {
    cplx p{1.0, 0.0};
    for (std::size_t k = 0; k < m; ++k) {
      b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = p;
      p *= betas[i];
    }
    for (std::size_t j = 0; j < m; ++j) {
      cplx prod{1.0, 0.0};
      for (std::size_t k = 0; k < m; ++k) {
        if (k != j) prod *= betas[i] - alpha[k];
      }
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = prod;
    }
  }
  return {ComplexMatrix(std::move(b)), ComplexMatrix(std::move(c)), ComplexMatrix(std::move(a))};
}

std::vector<cplx> large_regime_betas(std::int64_t n, std::int64_t m) {
  require(n >= 1 && m >= 1, Errc::invalid_parameter, "n and m must be positive");
  std::vector<cplx> out;
  for (std::int64_t i = 1; i <= m; ++i) out.push_back(root_of_unity(2 * m * n, 1 + 2 * n * (i - 1)));
  return out;
}

std::vector<cplx> small_regime_betas(std::int64_t m) {
  require(m >= 1, Errc::invalid_parameter, "m must be positive");
  std::vector<cplx> out;
  for (std::int64_t i = 1; i <= m; ++i) out.push_back(root_of_unity(m, i - 1));
  return out;
}

BoundReport measure_subset(std::int64_t n, const std::vector<std::int64_t>& subset) {
  const auto w = GeneralizedVandermonde::standard(n, subset);
  const auto s = singular_values(w.matrix());
  BoundReport r;
  r.n = n;
  r.m = static_cast<std::int64_t>(subset.size());
  r.d = n - r.m;
  r.subset = subset;
  r.w_norm2 = s.front();
  r.inv_norm2 = 1.0 / s.back();
  double sum = 0.0;
  for (const double v : s) sum += 1.0 / (v * v);
  r.inv_normF = std::sqrt(sum);
  r.cond2 = s.front() / s.back();

  r.bound_w = bound_w_norm(n);
  r.bound_inv_large = bound_inv_large(n, r.d);
  r.bound_cond_large = bound_cond_large(n, r.d);
  r.bound_inv_small_2 = bound_inv_small_2(n, r.m);
  r.bound_inv_small_F = bound_inv_small_F(n, r.m);

  constexpr double rel = 1e-6;
  if (r.w_norm2 > r.bound_w + 1e-9) r.violations.emplace_back("w_norm2");
  if (r.inv_norm2 > std::min(r.bound_inv_large, r.bound_inv_small_2) * (1 + rel)) r.violations.emplace_back("inv_norm2");
  if (r.inv_normF > r.bound_inv_small_F * (1 + rel)) r.violations.emplace_back("inv_normF");
  if (r.cond2 > r.bound_cond_large * (1 + rel)) r.violations.emplace_back("cond2");
  return r;
}

std::vector<BoundReport> verify_bounds_exhaustive(std::int64_t n_max, VerifyOptions options) {
  require(n_max >= 1, Errc::invalid_parameter, "n_max must be positive");
  require(n_max <= options.cap, Errc::invalid_parameter,
          "n_max " + std::to_string(n_max) + " exceeds the cap " + std::to_string(options.cap));
  std::vector<std::pair<std::int64_t, std::uint64_t>> jobs;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) jobs.emplace_back(n, mask);
  }
  std::vector<BoundReport> reports(jobs.size());
  parallel_for(
      jobs.size(),
      [&](std::size_t i) {
        const auto [n, mask] = jobs[i];
        std::vector<std::int64_t> subset;
        for (std::int64_t k = 0; k < n; ++k) {
          if (mask & (std::uint64_t{1} << k)) subset.push_back(k);
        }
        reports[i] = measure_subset(n, subset);
      },
      options.threads);
  return reports;
}

std::string bounds_csv(const std::vector<BoundReport>& reports) {
  std::ostringstream out;
  out << "n,m,d,subset,measured_w_norm2,measured_inv_norm2,measured_inv_normF,measured_cond2,"
         "bound_w_norm2,bound_inv_norm2_large,bound_cond2_large,bound_inv_norm2_small,bound_inv_normF_small,"
         "violations\n";
  for (const auto& r : reports) {
    out << r.n << ',' << r.m << ',' << r.d << ',' << join_ints(r.subset, ';') << ',' << format_double(r.w_norm2)
        << ',' << format_double(r.inv_norm2) << ',' << format_double(r.inv_normF) << ','
        << format_double(r.cond2) << ',' << format_double(r.bound_w) << ',' << format_double(r.bound_inv_large)
        << ',' << format_double(r.bound_cond_large) << ',' << format_double(r.bound_inv_small_2) << ','
        << format_double(r.bound_inv_small_F) << ',';
    for (std::size_t i = 0; i < r.violations.size(); ++i) out << (i ? ";" : "") << r.violations[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace sdmm
