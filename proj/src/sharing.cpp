#include "sdmm/sharing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "sdmm/bounds.hpp"
#include "sdmm/csv.hpp"
#include "sdmm/error.hpp"
#include "sdmm/parallel.hpp"
#include "sdmm/random.hpp"

namespace sdmm {
namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

std::vector<std::size_t> positions_of(const Subset& subset, std::size_t n) {
  std::vector<std::size_t> pos;
  pos.reserve(subset.size());
  for (const auto w : subset) {
    require(w >= 1 && w <= n, Errc::invalid_parameter, "worker " + std::to_string(w) + " outside [1, n]");
    pos.push_back(w - 1);
  }
  return pos;
}

Dense column_subset(const Dense& m, const std::vector<std::size_t>& cols) {
  Dense out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = m.col(static_cast<Eigen::Index>(cols[c]));
  return out;
}

// H^T = G_enc_T G_sec_T^-1 (m x t), or nullopt when G_sec_T is singular.
std::optional<Dense> leakage_channel(const NestedCosetScheme& scheme, const Subset& subset) {
  require(subset.size() == scheme.k(), Errc::invalid_parameter,
          "leakage bounds need |T| = " + std::to_string(scheme.k()) + " so that G_sec_T is square");
  const auto pos = positions_of(subset, scheme.n());
  const Dense enc = column_subset(scheme.g_enc().matrix().values(), pos);
  const Dense sec = column_subset(scheme.g_sec().matrix().values(), pos);
  Eigen::JacobiSVD<Dense> svd(sec);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= singular_tolerance(s(0))) return std::nullopt;
  // X G_sec = G_enc  <=>  G_sec^T X^T = G_enc^T.
  const Dense xt = sec.transpose().partialPivLu().solve(enc.transpose());
  return Dense(xt.transpose());
}

double water_filling_capacity(const Eigen::VectorXd& gains, double total_power) {
  std::vector<double> g;
  for (Eigen::Index i = 0; i < gains.size(); ++i) {
    if (gains(i) > 0) g.push_back(gains(i));
  }
  if (g.empty() || total_power <= 0) return 0.0;
  std::sort(g.begin(), g.end(), std::greater<>());
  // Activate the strongest channels until the water level stays above 1/g.
  double inv_sum = 0.0;
  double level = 0.0;
  std::size_t active = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    inv_sum += 1.0 / g[k];
    const double candidate = (total_power + inv_sum) / static_cast<double>(k + 1);
    if (candidate <= 1.0 / g[k]) break;
    level = candidate;
    active = k + 1;
  }
  double capacity = 0.0;
  for (std::size_t k = 0; k < active; ++k) capacity += std::log(level * g[k]);
  return capacity;
}

}  // namespace

NestedCosetScheme::NestedCosetScheme(GeneralizedVandermonde g_enc, GeneralizedVandermonde g_sec)
    : g_enc_(std::move(g_enc)), g_sec_(std::move(g_sec)), consecutive_(g_sec_.consecutive_exponents()) {
  require(g_enc_.n() == g_sec_.n() && g_enc_.eval_indices() == g_sec_.eval_indices(), Errc::invalid_parameter,
          "G_enc and G_sec must be evaluated at the same points");
  const std::size_t want = g_enc_.num_rows() + g_sec_.num_rows();
  require(want <= g_enc_.num_points(), Errc::invalid_parameter,
          "m + k = " + std::to_string(want) + " exceeds the number of shares " + std::to_string(g_enc_.num_points()));
  require(numerical_rank(vstack(g_enc_.matrix(), g_sec_.matrix())) == want, Errc::invalid_parameter,
          "row spaces of G_enc and G_sec intersect nontrivially");
}

NestedCosetScheme NestedCosetScheme::shamir(std::int64_t n, std::size_t m, std::size_t t) {
  require(n >= 1 && m >= 1 && t >= 1, Errc::invalid_parameter, "shamir needs n, m, t >= 1");
  std::vector<std::int64_t> idx;
  for (std::int64_t i = 1; i <= n; ++i) idx.push_back(i % n);
  std::vector<std::int64_t> enc(m);
  std::vector<std::int64_t> sec(t);
  std::iota(enc.begin(), enc.end(), 0);
  std::iota(sec.begin(), sec.end(), static_cast<std::int64_t>(m));
  return {GeneralizedVandermonde(n, idx, enc), GeneralizedVandermonde(n, idx, sec)};
}

NoiseSpec calibrate_sigma2(double delta, std::size_t x, std::size_t p, std::size_t n_workers, unsigned real_factor) {
  require(delta > 0 && std::isfinite(delta), Errc::invalid_parameter, "delta must be positive");
  require(x >= 1, Errc::invalid_parameter, "calibration needs X >= 1");
  require(p >= 1, Errc::invalid_parameter, "partition count must be positive");
  require(n_workers >= x, Errc::invalid_parameter, "need N >= X");
  require(real_factor == 1 || real_factor == 2, Errc::invalid_parameter, "real factor must be 1 or 2");
  using BigFloat = boost::multiprecision::cpp_bin_float_50;
  BigInt num = BigInt(p) * BigInt(x) * BigInt(x) * BigInt(x);
  for (std::size_t i = 0; i < 2 * x - 2; ++i) num *= n_workers;
  BigInt den = pi(static_cast<unsigned>(x - 1));
  den *= den;
  for (std::size_t i = 0; i + 1 < x; ++i) den *= 4;
  const BigFloat core = BigFloat(num) / BigFloat(den);
  NoiseSpec out;
  out.sigma2 = static_cast<double>(core * real_factor / BigFloat(delta));
  out.delta = delta;
  out.x = x;
  out.p = p;
  out.n_workers = n_workers;
  out.real_factor = real_factor;
  return out;
}

NoiseSpec calibrate_sigma2(const NestedCosetScheme& scheme, double delta, std::size_t p, unsigned real_factor) {
  require(scheme.consecutive_sec_exponents(), Errc::invalid_parameter,
          "no closed-form noise variance for non-consecutive security exponents; supply sigma2 directly");
  return calibrate_sigma2(delta, scheme.k(), p, scheme.n(), real_factor);
}

std::vector<cplx> share(std::span<const cplx> secret, const NestedCosetScheme& scheme, const NoiseSpec& noise,
                        std::uint64_t seed) {
  require(secret.size() == scheme.m(), Errc::dimension_mismatch,
          "secret has length " + std::to_string(secret.size()) + ", expected " + std::to_string(scheme.m()));
  const auto s = ComplexMatrix::from_entries(1, secret.size(), secret);
  const auto out = share_rows(s, scheme, noise, seed);
  return {out.entries().begin(), out.entries().end()};
}

ComplexMatrix share_rows(const ComplexMatrix& secrets, const NestedCosetScheme& scheme, const NoiseSpec& noise,
                         std::uint64_t seed) {
  require(secrets.cols() == scheme.m(), Errc::dimension_mismatch, "secret width must equal m");
  require(noise.sigma2 >= 0, Errc::invalid_parameter, "sigma2 must be nonnegative");
  RandomSource rng(seed);
  const auto r = rng.complex_normal_matrix(secrets.rows(), scheme.k(), noise.sigma2);
  const Dense out = secrets.values() * scheme.g_enc().matrix().values() + r.values() * scheme.g_sec().matrix().values();
  return ComplexMatrix(out);
}

double leakage_bound_frobenius(const NestedCosetScheme& scheme, const Subset& subset, double sigma2, double power) {
  const auto h = leakage_channel(scheme, subset);
  if (!h) return kInfinity;
  const double f2 = h->squaredNorm();
  if (sigma2 <= 0) return f2 > 0 ? kInfinity : 0.0;
  return power * f2 / sigma2;
}

double leakage_bound_logdet(const NestedCosetScheme& scheme, const Subset& subset, double sigma2,
                            const ComplexMatrix& q) {
  require(q.rows() == scheme.m() && q.cols() == scheme.m(), Errc::dimension_mismatch, "Q must be m x m");
  require(sigma2 > 0, Errc::invalid_parameter, "sigma2 must be positive");
  const auto ht = leakage_channel(scheme, subset);
  require(ht.has_value(), Errc::numerical_failure, "G_sec restricted to the subset is singular");
  const Dense h = ht->transpose();
  const Dense gram = Dense::Identity(h.rows(), h.rows()) + h * q.values() * h.adjoint() / sigma2;
  Eigen::SelfAdjointEigenSolver<Dense> eig(gram, Eigen::EigenvaluesOnly);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) logdet += std::log(eig.eigenvalues()(i));
  return logdet / static_cast<double>(scheme.m());
}

double leakage_bound_logdet_worst(const NestedCosetScheme& scheme, const Subset& subset, double sigma2,
                                  double power) {
  const auto ht = leakage_channel(scheme, subset);
  if (!ht) return kInfinity;
  if (sigma2 <= 0) return ht->squaredNorm() > 0 ? kInfinity : 0.0;
  // H^* H = conj(H^T) H^T is m x m; its eigenvalues are the channel gains.
  const Dense gram = ht->conjugate() * ht->transpose() / sigma2;
  Eigen::SelfAdjointEigenSolver<Dense> eig(gram, Eigen::EigenvaluesOnly);
  const auto m = static_cast<double>(scheme.m());
  return water_filling_capacity(eig.eigenvalues(), power * m) / m;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 out = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    out = out * (n - k + i) / i;
    if (out > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(out);
}

std::vector<Subset> all_subsets(std::size_t n, std::size_t k) {
  std::vector<Subset> out;
  if (k > n) return out;
  Subset cur(k);
  std::iota(cur.begin(), cur.end(), std::size_t{1});
  while (true) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == n - k + i) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

LeakageReport audit_scheme(const NestedCosetScheme& scheme, double sigma2, std::size_t t, double delta,
                           AuditOptions options) {
  LeakageReport report;
  report.delta_target = delta;
  if (t == 0) return report;
  require(t == scheme.k(), Errc::invalid_parameter,
          "audit needs t = k = " + std::to_string(scheme.k()) + ", got " + std::to_string(t));

  std::vector<Subset> subsets;
  const auto total = binomial(scheme.n(), t);
  if (total <= options.max_subsets) {
    subsets = all_subsets(scheme.n(), t);
  } else {
    require(options.allow_sampling, Errc::invalid_parameter,
            "C(" + std::to_string(scheme.n()) + ", " + std::to_string(t) + ") subsets exceed the cap of " +
                std::to_string(options.max_subsets) + "; enable sampling");
    report.exhaustive = false;
    RandomSource rng(options.seed);
    std::vector<std::size_t> workers(scheme.n());
    std::iota(workers.begin(), workers.end(), std::size_t{1});
    for (std::uint64_t i = 0; i < options.samples; ++i) {
      Subset s;
      std::sample(workers.begin(), workers.end(), std::back_inserter(s), t, rng.engine());
      subsets.push_back(std::move(s));
    }
  }

  report.entries.resize(subsets.size());
  parallel_for(
      subsets.size(),
      [&](std::size_t i) {
        auto& e = report.entries[i];
        e.subset = subsets[i];
        e.frobenius_nats = leakage_bound_frobenius(scheme, e.subset, sigma2, options.power);
        e.logdet_nats = leakage_bound_logdet_worst(scheme, e.subset, sigma2, options.power);
      },
      options.threads);

  for (const auto& e : report.entries) {
    if (report.worst_subset.empty() || e.frobenius_nats > report.worst_case_nats) {
      report.worst_case_nats = e.frobenius_nats;
      report.worst_subset = e.subset;
    }
  }
  report.passed = report.worst_case_nats <= delta * (1 + 1e-9);
  return report;
}

std::string leakage_csv(const LeakageReport& report) {
  std::ostringstream out;
  out << "subset,frobenius_nats,logdet_nats\n";
  for (const auto& e : report.entries) {
    std::vector<std::int64_t> s(e.subset.begin(), e.subset.end());
    out << join_ints(s, ';') << ',' << format_double(e.frobenius_nats) << ',' << format_double(e.logdet_nats) << '\n';
  }
  return out.str();
}

}  // namespace sdmm
