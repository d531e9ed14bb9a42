#include "sdmm/schemes.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "sdmm/error.hpp"
#include "sdmm/parallel.hpp"
#include "sdmm/random.hpp"

namespace sdmm {
namespace {

using I = std::int64_t;

constexpr std::array<SchemeId, 8> kSchemes = {SchemeId::cmatdot, SchemeId::cdft,    SchemeId::cgasp,
                                              SchemeId::ca3s,    SchemeId::rmatdot, SchemeId::rdft,
                                              SchemeId::rgasp,   SchemeId::ra3s};

const cplx kI{0.0, 1.0};

template <typename Real>
using RealMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Real>
ComplexMatrix wrap(const DenseOf<Real>& values, Precision precision) {
  return ComplexMatrix(Dense(values.template cast<cplx>()), precision);
}

bool is_outer(SchemeId id) { return !is_inner_scheme(id); }

std::size_t side_partitions(const SchemeParams& p, bool a_side) {
  if (is_inner_scheme(p.scheme)) return p.m;
  return a_side ? p.k : p.l;
}

std::vector<std::int64_t> worker_indices(std::size_t n) {
  std::vector<std::int64_t> idx;
  for (std::size_t i = 1; i <= n; ++i) idx.push_back(static_cast<I>(i % n));
  return idx;
}

std::pair<std::vector<I>, std::vector<I>> split_exponents(const std::vector<LayoutTerm>& terms, std::size_t n_data,
                                                          std::size_t n_noise) {
  std::vector<I> data(n_data), noise(n_noise);
  for (const auto& t : terms) (t.kind == Coefficient::data ? data : noise)[t.index] = t.exponent;
  return {data, noise};
}

struct Coefficients {
  std::vector<LaurentMatrixPoly::Term> f;
  std::vector<LaurentMatrixPoly::Term> g;
};

Coefficients draw_coefficients(const SchemeParams& params, const ComplexMatrix& a_in, const ComplexMatrix& b_in) {
  check_inputs(params, a_in, b_in);
  ComplexMatrix a = a_in.with_precision(params.precision);
  ComplexMatrix b = b_in.with_precision(params.precision);
  const SchemeId id = params.scheme;
  if (is_real_scheme(id)) {
    std::tie(a, b) = is_inner_scheme(id) ? inner_complexify(a, b) : outer_complexify(a, b);
  }
  const Partition parts = is_inner_scheme(id) ? inner_partition(a, b, params.m) : outer_partition(a, b, params.k, params.l);

  const SideNoise noise = noise_levels(params);
  RandomSource rng_a(mix_seed(params.seed, 0));
  RandomSource rng_b(mix_seed(params.seed, 1));
  std::vector<ComplexMatrix> r, s;
  for (std::size_t j = 0; j < params.x; ++j) {
    r.push_back(rng_a.complex_normal_matrix(parts.a[0].rows(), parts.a[0].cols(), noise.a.sigma2, params.precision));
  }
  for (std::size_t j = 0; j < params.x; ++j) {
    s.push_back(rng_b.complex_normal_matrix(parts.b[0].rows(), parts.b[0].cols(), noise.b.sigma2, params.precision));
  }

  const SchemeLayout layout = scheme_layout(params);
  Coefficients out;
  for (const auto& t : layout.f) out.f.push_back({t.exponent, t.kind == Coefficient::data ? parts.a[t.index] : r[t.index]});
  for (const auto& t : layout.g) out.g.push_back({t.exponent, t.kind == Coefficient::data ? parts.b[t.index] : s[t.index]});
  return out;
}

ComplexMatrix evaluate_terms(const std::vector<LaurentMatrixPoly::Term>& terms, const RootPoint& point) {
  std::vector<cplx> weights;
  std::vector<ComplexMatrix> mats;
  weights.reserve(terms.size());
  mats.reserve(terms.size());
  for (const auto& t : terms) {
    weights.push_back(point.pow(t.exponent));
    mats.push_back(t.coeff);
  }
  return linear_combination(weights, mats);
}

ComplexMatrix extract(const Dense& weights, const Window& window, std::int64_t exponent,
                      std::span<const ComplexMatrix> values) {
  require(window.contains(exponent), Errc::numerical_failure, "extraction exponent outside the interpolation window");
  const auto row = static_cast<Eigen::Index>(exponent - window.min_exp);
  std::vector<cplx> w(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) w[i] = weights(row, static_cast<Eigen::Index>(i));
  return linear_combination(w, values);
}

double imag_residue(const ComplexMatrix& c) {
  const double total = frobenius_norm(c);
  return total > 0 ? frobenius_norm(c.imag_part()) / total : 0.0;
}

}  // namespace

const char* to_string(SchemeId id) noexcept {
  switch (id) {
    case SchemeId::cmatdot: return "cmatdot";
    case SchemeId::cdft: return "cdft";
    case SchemeId::cgasp: return "cgasp";
    case SchemeId::ca3s: return "ca3s";
    case SchemeId::rmatdot: return "rmatdot";
    case SchemeId::rdft: return "rdft";
    case SchemeId::rgasp: return "rgasp";
    case SchemeId::ra3s: return "ra3s";
  }
  return "unknown";
}

SchemeId parse_scheme(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (const auto id : kSchemes) {
    if (lower == to_string(id)) return id;
  }
  fail(Errc::invalid_parameter, "unknown scheme '" + name +
                                    "' (expected cmatdot, cdft, cgasp, ca3s, rmatdot, rdft, rgasp or ra3s)");
}

const std::array<SchemeId, 8>& all_schemes() noexcept { return kSchemes; }

bool is_real_scheme(SchemeId id) noexcept { return static_cast<int>(id) >= 5; }

bool is_dft_scheme(SchemeId id) noexcept { return id == SchemeId::cdft || id == SchemeId::rdft; }

bool is_inner_scheme(SchemeId id) noexcept {
  return id == SchemeId::cmatdot || id == SchemeId::cdft || id == SchemeId::rmatdot || id == SchemeId::rdft;
}

std::size_t recovery_threshold(SchemeId id, std::size_t p1, std::size_t l, std::size_t x) {
  switch (id) {
    case SchemeId::cmatdot: return 2 * p1 + 2 * x - 1;
    case SchemeId::cdft: return p1 + 2 * x;
    case SchemeId::cgasp: return 2 * p1 * l + 2 * x - 1;
    case SchemeId::ca3s: return (p1 + x) * (l + 1) - 1;
    case SchemeId::rmatdot: return 2 * p1 + 4 * x - 1;
    case SchemeId::rdft: return p1 + 2 * x;
    case SchemeId::rgasp: return 2 * p1 * l + p1 + 3 * x - 2;
    case SchemeId::ra3s: return (p1 + x) * (l + 1) + x - 1;
  }
  fail(Errc::invalid_parameter, "unknown scheme id");
}

std::size_t recovery_threshold(const SchemeParams& params) {
  return is_inner_scheme(params.scheme) ? recovery_threshold(params.scheme, params.m, 1, params.x)
                                        : recovery_threshold(params.scheme, params.k, params.l, params.x);
}

SchemeParams resolve(SchemeParams params) {
  const SchemeId id = params.scheme;
  require(static_cast<int>(id) >= 1 && static_cast<int>(id) <= 8, Errc::invalid_parameter, "unknown scheme id");
  if (is_inner_scheme(id)) {
    require(params.m >= 1, Errc::invalid_parameter, "M must be at least 1");
  } else {
    require(params.k >= 1 && params.l >= 1, Errc::invalid_parameter, "K and L must be at least 1");
  }
  const std::size_t r = recovery_threshold(params);
  if (is_dft_scheme(id)) {
    require(params.stragglers == 0, Errc::invalid_parameter,
            std::string(to_string(id)) + " cannot tolerate stragglers: S must be 0");
    if (params.n_workers == 0) params.n_workers = r;
    require(params.n_workers == r, Errc::invalid_parameter,
            std::string(to_string(id)) + " needs exactly N = M + 2X = " + std::to_string(r) + " workers, got " +
                std::to_string(params.n_workers));
  } else {
    if (params.n_workers == 0) params.n_workers = r + params.stragglers;
    require(params.n_workers >= r + params.stragglers, Errc::invalid_parameter,
            "N = " + std::to_string(params.n_workers) + " is less than R + S = " + std::to_string(r) + " + " +
                std::to_string(params.stragglers));
  }
  if (params.sigma2) {
    require(*params.sigma2 >= 0, Errc::invalid_parameter, "sigma2 must be nonnegative");
  } else if (params.x > 0) {
    require(params.delta > 0, Errc::invalid_parameter, "delta must be positive");
  }
  return params;
}

void check_inputs(const SchemeParams& params, const ComplexMatrix& a, const ComplexMatrix& b) {
  const SchemeId id = params.scheme;
  require(!a.empty() && !b.empty(), Errc::invalid_parameter, "inputs must be nonempty");
  require(a.cols() == b.rows(), Errc::dimension_mismatch,
          "A is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " but B has " +
              std::to_string(b.rows()) + " rows");
  if (is_real_scheme(id)) {
    require(a.is_real() && b.is_real(), Errc::invalid_parameter,
            std::string(to_string(id)) + " multiplies real matrices; inputs have imaginary parts");
  }
  const std::size_t factor = is_real_scheme(id) ? 2 : 1;
  if (is_inner_scheme(id)) {
    require(a.cols() % (factor * params.m) == 0, Errc::invalid_parameter,
            "shared dimension " + std::to_string(a.cols()) + " is not divisible by " +
                (factor == 2 ? "2M = " : "M = ") + std::to_string(factor * params.m));
  } else {
    require(a.rows() % (factor * params.k) == 0, Errc::invalid_parameter,
            "rows of A (" + std::to_string(a.rows()) + ") not divisible by " + (factor == 2 ? "2K = " : "K = ") +
                std::to_string(factor * params.k));
    require(b.cols() % (factor * params.l) == 0, Errc::invalid_parameter,
            "columns of B (" + std::to_string(b.cols()) + ") not divisible by " + (factor == 2 ? "2L = " : "L = ") +
                std::to_string(factor * params.l));
  }
}

SideNoise noise_levels(const SchemeParams& raw) {
  const SchemeParams p = resolve(raw);
  const unsigned factor = is_real_scheme(p.scheme) ? 2 : 1;
  auto side = [&](bool a_side) {
    const std::size_t parts = side_partitions(p, a_side);
    NoiseSpec spec;
    if (p.x > 0 && !p.sigma2) {
      spec = calibrate_sigma2(p.delta, p.x, parts, p.n_workers, factor);
    } else {
      spec.sigma2 = p.x > 0 ? *p.sigma2 : 0.0;
      spec.delta = p.delta;
      spec.x = p.x;
      spec.p = parts;
      spec.n_workers = p.n_workers;
      spec.real_factor = factor;
    }
    return spec;
  };
  return {side(true), side(false)};
}

SchemeLayout scheme_layout(const SchemeParams& params) {
  const SchemeParams p = resolve(params);
  const I x = static_cast<I>(p.x);
  SchemeLayout out;
  auto add = [](std::vector<LayoutTerm>& terms, Coefficient kind, I count, auto exponent) {
    for (I j = 1; j <= count; ++j) terms.push_back({kind, static_cast<std::size_t>(j - 1), exponent(j)});
  };
  const auto D = Coefficient::data;
  const auto N = Coefficient::noise;

  if (is_inner_scheme(p.scheme)) {
    const I m = static_cast<I>(p.m);
    add(out.f, D, m, [](I j) { return j - 1; });
    add(out.f, N, x, [&](I j) { return m + j - 1; });
    add(out.g, D, m, [](I j) { return -(j - 1); });
    add(out.g, N, x, [](I j) { return j; });
    if (is_real_scheme(p.scheme)) {
      out.plus = {-(m + 2 * x - 1), static_cast<std::size_t>(2 * m + 4 * x - 1)};
    } else {
      out.plus = {-(m - 1), static_cast<std::size_t>(2 * m + 2 * x - 1)};
    }
    out.extract.push_back({0, 0, 0, false});
    return out;
  }

  const I k = static_cast<I>(p.k);
  const I l = static_cast<I>(p.l);
  const I r = static_cast<I>(recovery_threshold(p));
  switch (p.scheme) {
    case SchemeId::cgasp:
      add(out.f, N, x, [](I j) { return j - 1; });
      add(out.f, D, k, [&](I j) { return k * (l - 1) + x + j - 1; });
      add(out.g, N, x, [](I j) { return j - 1; });
      add(out.g, D, l, [&](I j) { return k + x - 1 + k * (j - 1); });
      out.plus = {0, static_cast<std::size_t>(r)};
      break;
    case SchemeId::ca3s:
      add(out.f, D, k, [](I j) { return j - 1; });
      add(out.f, N, x, [&](I j) { return k + j - 1; });
      add(out.g, D, l, [&](I j) { return (k + x) * (j - 1); });
      add(out.g, N, x, [&](I j) { return (k + x) * (l - 1) + k + j - 1; });
      out.plus = {0, static_cast<std::size_t>(r)};
      break;
    case SchemeId::rgasp:
      add(out.f, N, x, [](I j) { return j - 1; });
      add(out.f, D, k, [&](I j) { return k * l + 2 * x - 1 + j - 1; });
      add(out.g, N, x, [](I j) { return j - 1; });
      add(out.g, D, l, [&](I j) { return k + x - 1 + k * (j - 1); });
      out.plus = {0, static_cast<std::size_t>(r)};
      out.minus = Window{-(k * l + x - 1), static_cast<std::size_t>(r)};
      break;
    case SchemeId::ra3s:
      add(out.f, D, k, [](I j) { return j - 1; });
      add(out.f, N, x, [&](I j) { return k + j - 1; });
      add(out.g, D, l, [&](I j) { return (k + x) * (j - 1); });
      add(out.g, N, x, [&](I j) { return (k + x) * l + j - 1; });
      out.plus = {0, static_cast<std::size_t>(r)};
      out.minus = Window{-((k + x) * l + x - 1), static_cast<std::size_t>(r)};
      break;
    default:
      fail(Errc::invalid_parameter, "not an outer scheme");
  }

  const auto [fa, fr] = split_exponents(out.f, p.k, p.x);
  const auto [gb, gs] = split_exponents(out.g, p.l, p.x);
  for (std::size_t j = 0; j < p.k; ++j) {
    for (std::size_t jp = 0; jp < p.l; ++jp) out.extract.push_back({j, jp, fa[j] + gb[jp], false});
  }
  if (out.minus) {
    for (std::size_t j = 0; j < p.k; ++j) {
      for (std::size_t jp = 0; jp < p.l; ++jp) out.extract.push_back({j, jp, fa[j] - gb[jp], true});
    }
  }
  return out;
}

Partition inner_partition(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t m_parts) {
  require(m_parts >= 1, Errc::invalid_parameter, "M must be at least 1");
  require(a.cols() == b.rows(), Errc::dimension_mismatch, "inner partition: A.cols != B.rows");
  require(a.cols() % m_parts == 0, Errc::invalid_parameter,
          "shared dimension " + std::to_string(a.cols()) + " is not divisible by M = " + std::to_string(m_parts));
  const std::size_t w = a.cols() / m_parts;
  Partition out;
  for (std::size_t j = 0; j < m_parts; ++j) {
    out.a.push_back(a.block(0, j * w, a.rows(), w));
    out.b.push_back(b.block(j * w, 0, w, b.cols()));
  }
  return out;
}

Partition outer_partition(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t k_parts, std::size_t l_parts) {
  require(k_parts >= 1 && l_parts >= 1, Errc::invalid_parameter, "K and L must be at least 1");
  require(a.cols() == b.rows(), Errc::dimension_mismatch, "outer partition: A.cols != B.rows");
  require(a.rows() % k_parts == 0, Errc::invalid_parameter,
          "rows of A (" + std::to_string(a.rows()) + ") not divisible by K = " + std::to_string(k_parts));
  require(b.cols() % l_parts == 0, Errc::invalid_parameter,
          "columns of B (" + std::to_string(b.cols()) + ") not divisible by L = " + std::to_string(l_parts));
  const std::size_t h = a.rows() / k_parts;
  const std::size_t w = b.cols() / l_parts;
  Partition out;
  for (std::size_t j = 0; j < k_parts; ++j) out.a.push_back(a.block(j * h, 0, h, a.cols()));
  for (std::size_t j = 0; j < l_parts; ++j) out.b.push_back(b.block(0, j * w, b.rows(), w));
  return out;
}

std::pair<ComplexMatrix, ComplexMatrix> inner_complexify(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.cols() == b.rows(), Errc::dimension_mismatch, "inner complexification: A.cols != B.rows");
  require(a.is_real() && b.is_real(), Errc::invalid_parameter, "complexification needs real matrices");
  require(a.cols() % 2 == 0, Errc::invalid_parameter, "inner complexification needs an even shared dimension");
  const std::size_t h = a.cols() / 2;
  const auto a1 = a.block(0, 0, a.rows(), h);
  const auto a2 = a.block(0, h, a.rows(), h);
  const auto b1 = b.block(0, 0, h, b.cols());
  const auto b2 = b.block(h, 0, h, b.cols());
  return {a1 + kI * a2, b1 - kI * b2};
}

std::pair<ComplexMatrix, ComplexMatrix> outer_complexify(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.cols() == b.rows(), Errc::dimension_mismatch, "outer complexification: A.cols != B.rows");
  require(a.is_real() && b.is_real(), Errc::invalid_parameter, "complexification needs real matrices");
  require(a.rows() % 2 == 0, Errc::invalid_parameter, "outer complexification needs an even number of rows in A");
  require(b.cols() % 2 == 0, Errc::invalid_parameter, "outer complexification needs an even number of columns in B");
  const std::size_t t = a.rows() / 2;
  const std::size_t r = b.cols() / 2;
  const auto a1 = a.block(0, 0, t, a.cols());
  const auto a2 = a.block(t, 0, t, a.cols());
  const auto b1 = b.block(0, 0, b.rows(), r);
  const auto b2 = b.block(0, r, b.rows(), r);
  return {a1 + kI * a2, b1 + kI * b2};
}

ComplexMatrix assemble_outer(const ComplexMatrix& p_plus, const ComplexMatrix& p_minus) {
  require(p_plus.rows() == p_minus.rows() && p_plus.cols() == p_minus.cols(), Errc::dimension_mismatch,
          "assembly needs P+ and P- of the same shape");
  const Dense& pp = p_plus.values();
  const Dense& pm = p_minus.values();
  const auto t = pp.rows();
  const auto r = pp.cols();
  Eigen::MatrixXd out(2 * t, 2 * r);
  out.topLeftCorner(t, r) = 0.5 * (pp.real() + pm.real());
  out.topRightCorner(t, r) = 0.5 * (pp.imag() - pm.imag());
  out.bottomLeftCorner(t, r) = 0.5 * (pp.imag() + pm.imag());
  out.bottomRightCorner(t, r) = 0.5 * (pm.real() - pp.real());
  return ComplexMatrix::from_real(out, p_plus.precision());
}

ComplexMatrix assemble_blocks(std::span<const ComplexMatrix> blocks, std::size_t k_parts, std::size_t l_parts) {
  require(blocks.size() == k_parts * l_parts && !blocks.empty(), Errc::invalid_parameter,
          "expected K * L blocks");
  const auto h = static_cast<Eigen::Index>(blocks[0].rows());
  const auto w = static_cast<Eigen::Index>(blocks[0].cols());
  Dense out(h * static_cast<Eigen::Index>(k_parts), w * static_cast<Eigen::Index>(l_parts));
  for (std::size_t j = 0; j < k_parts; ++j) {
    for (std::size_t jp = 0; jp < l_parts; ++jp) {
      const auto& blk = blocks[j * l_parts + jp];
      require(static_cast<Eigen::Index>(blk.rows()) == h && static_cast<Eigen::Index>(blk.cols()) == w,
              Errc::dimension_mismatch, "blocks differ in shape");
      out.block(static_cast<Eigen::Index>(j) * h, static_cast<Eigen::Index>(jp) * w, h, w) = blk.values();
    }
  }
  return ComplexMatrix(std::move(out), blocks[0].precision());
}

EncodingPolynomials encoding_polynomials(const SchemeParams& params, const ComplexMatrix& a, const ComplexMatrix& b) {
  const SchemeParams p = resolve(params);
  const auto c = draw_coefficients(p, a, b);
  return {LaurentMatrixPoly::from_terms(c.f), LaurentMatrixPoly::from_terms(c.g)};
}

EncodedShares encode(const SchemeParams& params, const ComplexMatrix& a, const ComplexMatrix& b) {
  const SchemeParams p = resolve(params);
  const auto c = draw_coefficients(p, a, b);
  EncodedShares out{p.scheme, p.n_workers, std::vector<WorkerShare>(p.n_workers)};
  const auto n = static_cast<I>(p.n_workers);
  parallel_for(p.n_workers, [&](std::size_t i) {
    const RootPoint alpha{n, static_cast<I>(i + 1)};
    out.shares[i] = {i + 1, evaluate_terms(c.f, alpha), evaluate_terms(c.g, alpha)};
  });
  return out;
}

GeneratorPair generator_pair(const SchemeParams& params) {
  const SchemeParams p = resolve(params);
  require(p.x >= 1, Errc::invalid_parameter, "generator matrices need X >= 1");
  const SchemeLayout layout = scheme_layout(p);
  const auto n = static_cast<I>(p.n_workers);
  const auto idx = worker_indices(p.n_workers);
  const auto [fa, fr] = split_exponents(layout.f, side_partitions(p, true), p.x);
  const auto [gb, gs] = split_exponents(layout.g, side_partitions(p, false), p.x);
  return {NestedCosetScheme(GeneralizedVandermonde(n, idx, fa), GeneralizedVandermonde(n, idx, fr)),
          NestedCosetScheme(GeneralizedVandermonde(n, idx, gb), GeneralizedVandermonde(n, idx, gs))};
}

SchemeAudit audit_scheme(const SchemeParams& params, AuditOptions options) {
  const SchemeParams p = resolve(params);
  SchemeAudit out;
  out.a.delta_target = out.b.delta_target = p.delta;
  if (p.x == 0) return out;
  const auto pair = generator_pair(p);
  const auto noise = noise_levels(p);
  options.power = is_real_scheme(p.scheme) ? 2.0 : 1.0;
  out.a = audit_scheme(pair.a, noise.a.sigma2, p.x, p.delta, options);
  out.b = audit_scheme(pair.b, noise.b.sigma2, p.x, p.delta, options);
  out.worst_case_nats = std::max(out.a.worst_case_nats, out.b.worst_case_nats);
  out.passed = out.a.passed && out.b.passed;
  return out;
}

WorkerResponse worker_compute(SchemeId id, std::size_t worker, const ComplexMatrix& a, const ComplexMatrix& b,
                              ComputeOptions options) {
  require(a.cols() == b.rows(), Errc::dimension_mismatch,
          "share shapes " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " and " +
              std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + " do not multiply");
  require(a.precision() == b.precision(), Errc::invalid_parameter, "shares have different precision");
  WorkerResponse out;
  out.worker = worker;
  const Precision prec = a.precision();

  if (!is_real_scheme(id)) {
    out.plus = matmul(a, b, options.method);
    return out;
  }

  if (is_inner_scheme(id)) {
    if (options.path == WorkerPath::direct) {
      out.plus = matmul(a, b, options.method).real_part();
      return out;
    }
    out.plus = dispatch(prec, [&](auto real) {
      using R = decltype(real);
      const DenseOf<R> av = a.as<R>();
      const DenseOf<R> bv = b.as<R>();
      RealMat<R> left(av.rows(), 2 * av.cols());
      left << av.real(), av.imag();
      RealMat<R> right(2 * bv.rows(), bv.cols());
      right << bv.real(), -bv.imag();
      const RealMat<R> prod = left * right;
      return wrap<R>(DenseOf<R>(prod.template cast<std::complex<R>>()), prec);
    });
    return out;
  }

  if (options.path == WorkerPath::direct) {
    out.plus = matmul(a, b, options.method);
    out.minus = matmul(a, b.conj(), options.method);
    return out;
  }
  const auto [plus, minus] = dispatch(prec, [&](auto real) {
    using R = decltype(real);
    const DenseOf<R> av = a.as<R>();
    const DenseOf<R> bv = b.as<R>();
    const auto t = av.rows();
    const auto r = bv.cols();
    RealMat<R> left(2 * t, av.cols());
    left << av.real(), av.imag();
    RealMat<R> right(bv.rows(), 2 * r);
    right << bv.real(), bv.imag();
    const RealMat<R> prod = left * right;
    const RealMat<R> rr = prod.topLeftCorner(t, r), ri = prod.topRightCorner(t, r);
    const RealMat<R> ir = prod.bottomLeftCorner(t, r), ii = prod.bottomRightCorner(t, r);
    DenseOf<R> p(t, r), m(t, r);
    p.real() = rr - ii;
    p.imag() = ri + ir;
    m.real() = rr + ii;
    m.imag() = ir - ri;
    return std::pair{wrap<R>(p, prec), wrap<R>(m, prec)};
  });
  out.plus = plus;
  out.minus = minus;
  return out;
}

WorkerResponse worker_compute(SchemeId id, const WorkerShare& share, ComputeOptions options) {
  return worker_compute(id, share.worker, share.a, share.b, options);
}

DecodeResult decode(const SchemeParams& params, std::span<const WorkerResponse> responses, DecodeOptions options) {
  const SchemeParams p = resolve(params);
  const SchemeId id = p.scheme;
  const bool outer_real = is_real_scheme(id) && is_outer(id);

  std::vector<const WorkerResponse*> distinct;
  std::set<std::size_t> seen;
  for (const auto& r : responses) {
    require(r.worker >= 1 && r.worker <= p.n_workers, Errc::invalid_parameter,
            "response from unknown worker " + std::to_string(r.worker));
    require(seen.insert(r.worker).second, Errc::invalid_parameter,
            "duplicate response from worker " + std::to_string(r.worker));
    require(!outer_real || r.minus.has_value(), Errc::invalid_parameter,
            "worker " + std::to_string(r.worker) + " did not return h-");
    distinct.push_back(&r);
  }

  const std::size_t needed = is_dft_scheme(id) ? p.n_workers : recovery_threshold(p);
  if (distinct.size() < needed) throw InsufficientResponses(distinct.size(), needed);
  if (!options.use_all_responses || is_dft_scheme(id)) distinct.resize(needed);

  DecodeResult out;
  std::vector<RootPoint> points;
  std::vector<ComplexMatrix> plus, minus;
  for (const auto* r : distinct) {
    out.used_workers.push_back(r->worker);
    points.push_back({static_cast<I>(p.n_workers), static_cast<I>(r->worker)});
    plus.push_back(r->plus);
    if (r->minus) minus.push_back(*r->minus);
  }
  const Precision prec = plus.front().precision();

  auto finish_inner = [&](ComplexMatrix c) {
    if (is_real_scheme(id)) {
      out.imag_residue = imag_residue(c);
      if (options.residue == ResiduePolicy::fail && out.imag_residue > options.residue_tolerance) {
        fail(Errc::numerical_failure, "imaginary residue " + std::to_string(out.imag_residue) +
                                          " of the decoded product exceeds " +
                                          std::to_string(options.residue_tolerance));
      }
      c = c.real_part();
    }
    out.product = std::move(c);
    return out;
  };

  const SchemeLayout layout = scheme_layout(p);

  if (is_dft_scheme(id)) {
    if (options.dft == DftDecode::average) {
      std::vector<cplx> w(plus.size(), cplx(1.0 / static_cast<double>(p.n_workers)));
      return finish_inner(linear_combination(w, plus));
    }
    const Window window{layout.plus.min_exp, p.n_workers};
    const Dense weights = interpolation_weights(points, window.min_exp, window.num_terms, prec, {false});
    return finish_inner(extract(weights, window, 0, plus));
  }

  const Dense wplus = interpolation_weights(points, layout.plus.min_exp, layout.plus.num_terms, prec);
  if (is_inner_scheme(id)) return finish_inner(extract(wplus, layout.plus, 0, plus));

  std::vector<ComplexMatrix> grid_plus(p.k * p.l), grid_minus;
  std::optional<Dense> wminus;
  if (outer_real) {
    grid_minus.resize(p.k * p.l);
    wminus = interpolation_weights(points, layout.minus->min_exp, layout.minus->num_terms, prec);
  }
  for (const auto& e : layout.extract) {
    const std::size_t slot = e.row_block * p.l + e.col_block;
    if (e.minus) {
      grid_minus[slot] = extract(*wminus, *layout.minus, e.exponent, minus);
    } else {
      grid_plus[slot] = extract(wplus, layout.plus, e.exponent, plus);
    }
  }
  const ComplexMatrix pp = assemble_blocks(grid_plus, p.k, p.l);
  out.product = outer_real ? assemble_outer(pp, assemble_blocks(grid_minus, p.k, p.l)) : pp;
  return out;
}

CostCounts cost_model(CostRow row, Dims d, std::uint64_t p1, std::uint64_t l, std::uint64_t x,
                      std::uint64_t r_threshold) {
  require(d.t > 0 && d.s > 0 && d.r > 0, Errc::invalid_parameter, "dimensions must be positive");
  require(p1 >= 1 && r_threshold >= 1, Errc::invalid_parameter, "partition count and R must be positive");
  const bool inner = row == CostRow::real_linear_inner || row == CostRow::complexified_inner ||
                     row == CostRow::complex_embedding_inner;
  const std::uint64_t pa = p1;
  const std::uint64_t pb = inner || row == CostRow::real_linear_outer ? p1 : l;
  require(pb >= 1, Errc::invalid_parameter, "L must be positive");
  require((d.t * d.s) % pa == 0 && (d.s * d.r) % pb == 0, Errc::invalid_parameter,
          "block sizes are not integral for these partitions");
  const std::uint64_t ts = d.t * d.s / pa;
  const std::uint64_t sr = d.s * d.r / pb;
  const std::uint64_t tr = d.t * d.r;
  const std::uint64_t R = r_threshold;
  switch (row) {
    case CostRow::real_linear_inner:
    case CostRow::real_linear_outer:
      return {(2 * (pa + x) - 1) * ts, (2 * (pb + x) - 1) * sr, (2 * R - 1) * tr};
    case CostRow::complexified_inner:
      return {(4 * (pa + x) - 1) * ts, (4 * (pb + x) - 1) * sr, (2 * R - 1) * tr};
    case CostRow::complexified_outer:
      return {(4 * (pa + x) - 1) * ts, (4 * (pb + x) - 1) * sr, (4 * R - 1) * tr};
    case CostRow::complex_embedding_inner:
    case CostRow::complex_embedding_outer:
      return {(8 * (pa + x) - 2) * ts, (8 * (pb + x) - 2) * sr, (8 * R - 2) * tr};
  }
  fail(Errc::invalid_parameter, "unknown cost row");
}

}  // namespace sdmm
