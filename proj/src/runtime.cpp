#include "sdmm/runtime.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "sdmm/csv.hpp"
#include "sdmm/error.hpp"
#include "sdmm/parallel.hpp"
#include "sdmm/random.hpp"

namespace sdmm {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::pair<ComplexMatrix, ComplexMatrix> sample_inputs(const RunConfig& config, std::uint64_t seed) {
  RandomSource rng(seed);
  auto dist = config.inputs;
  if (dist == InputDistribution::automatic) {
    dist = is_real_scheme(config.params.scheme) ? InputDistribution::uniform_real : InputDistribution::unit_disk;
  }
  const auto p = config.params.precision;
  if (dist == InputDistribution::uniform_real) {
    auto a = rng.uniform_real_matrix(config.t, config.s, p);
    return {std::move(a), rng.uniform_real_matrix(config.s, config.r, p)};
  }
  auto a = rng.unit_disk_matrix(config.t, config.s, p);
  return {std::move(a), rng.unit_disk_matrix(config.s, config.r, p)};
}

std::vector<std::size_t> stragglers_for(const RunConfig& config, std::size_t n, std::uint64_t seed) {
  const auto& spec = config.stragglers;
  if (spec.policy == StragglerPolicy::fixed) return spec.workers;
  if (spec.policy == StragglerPolicy::none || spec.count == 0) return {};
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{1});
  std::vector<std::size_t> out;
  RandomSource rng(seed);
  std::sample(all.begin(), all.end(), std::back_inserter(out), spec.count, rng.engine());
  return out;
}

TrialOutcome run_trial(const RunConfig& config, const SchemeParams& resolved, std::size_t trial, PhaseTimes& times) {
  TrialOutcome out;
  out.trial = trial;
  const auto [params, a, b, truth] = prepare_trial(config, resolved, trial);

  auto start = std::chrono::steady_clock::now();
  const auto shares = encode(params, a, b);
  times.encode += seconds_since(start);

  const auto dropped = stragglers_for(config, params.n_workers, mix_seed(params.seed, 3));
  std::vector<WorkerResponse> responses(shares.shares.size());
  std::vector<char> alive(shares.shares.size(), 1);
  for (const auto w : dropped) alive[w - 1] = 0;
  start = std::chrono::steady_clock::now();
  parallel_for(shares.shares.size(), [&](std::size_t i) {
    if (alive[i]) responses[i] = worker_compute(params.scheme, shares.shares[i], config.compute);
  });
  times.compute += seconds_since(start);

  std::vector<WorkerResponse> survivors;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    if (!alive[i]) continue;
    out.responding.push_back(i + 1);
    survivors.push_back(std::move(responses[i]));
  }

  start = std::chrono::steady_clock::now();
  try {
    DecodeOptions opts;
    opts.residue = ResiduePolicy::report;
    const auto decoded = decode(params, survivors, opts);
    out.rel_error = relative_error(decoded.product, truth);
    out.imag_residue = decoded.imag_residue;
  } catch (const Error& e) {
    out.rel_error = nan;
    out.failure = e.what();
  }
  times.decode += seconds_since(start);
  return out;
}

}  // namespace

TrialSetup prepare_trial(const RunConfig& config, const SchemeParams& resolved, std::size_t trial) {
  TrialSetup out;
  out.params = resolved;
  out.params.seed = mix_seed(resolved.seed, trial);
  std::tie(out.a, out.b) = sample_inputs(config, mix_seed(out.params.seed, 2));
  out.truth = matmul(out.a.with_precision(Precision::f64), out.b.with_precision(Precision::f64));
  return out;
}

InputDistribution parse_distribution(const std::string& name) {
  const auto n = lower(name);
  if (n == "auto" || n == "automatic") return InputDistribution::automatic;
  if (n == "uniform" || n == "uniform_real" || n == "real") return InputDistribution::uniform_real;
  if (n == "disk" || n == "unit_disk") return InputDistribution::unit_disk;
  fail(Errc::invalid_parameter, "unknown input distribution '" + name + "'");
}

SchemeParams validate(const RunConfig& config) {
  require(config.trials >= 1, Errc::invalid_parameter, "trials must be at least 1");
  require(config.t > 0 && config.s > 0 && config.r > 0, Errc::invalid_parameter, "matrix sizes must be positive");
  const auto& spec = config.stragglers;
  if (is_dft_scheme(config.params.scheme)) {
    require(spec.policy == StragglerPolicy::none, Errc::invalid_parameter,
            std::string(to_string(config.params.scheme)) + " cannot tolerate stragglers");
  }
  const auto params = resolve(config.params);
  if (spec.policy == StragglerPolicy::fixed) {
    require(spec.workers.size() <= params.stragglers, Errc::invalid_parameter,
            "straggler set larger than S = " + std::to_string(params.stragglers));
    auto sorted = spec.workers;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), Errc::invalid_parameter,
            "duplicate straggler");
    for (const auto w : sorted) {
      require(w >= 1 && w <= params.n_workers, Errc::invalid_parameter,
              "straggler " + std::to_string(w) + " outside 1.." + std::to_string(params.n_workers));
    }
  } else if (spec.policy == StragglerPolicy::random) {
    require(spec.count <= params.stragglers, Errc::invalid_parameter,
            "straggler count " + std::to_string(spec.count) + " exceeds S = " + std::to_string(params.stragglers));
  }
  const auto dist = config.inputs;
  if (is_real_scheme(params.scheme)) {
    require(dist != InputDistribution::unit_disk, Errc::invalid_parameter, "real schemes need real inputs");
  }
  // Shape checks on placeholder inputs of the configured size.
  check_inputs(params, ComplexMatrix(config.t, config.s), ComplexMatrix(config.s, config.r));
  return params;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return nan;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

RunResult run_local(const RunConfig& config) {
  const auto params = validate(config);
  RunResult result;
  result.trials.resize(config.trials);
  std::vector<PhaseTimes> times(config.trials);
  parallel_for(
      config.trials, [&](std::size_t i) { result.trials[i] = run_trial(config, params, i, times[i]); },
      config.threads);

  std::vector<double> ok;
  for (std::size_t i = 0; i < config.trials; ++i) {
    result.timings.encode += times[i].encode;
    result.timings.compute += times[i].compute;
    result.timings.decode += times[i].decode;
    if (result.trials[i].failure) {
      ++result.failures;
    } else {
      ok.push_back(result.trials[i].rel_error);
    }
  }
  result.median = quantile(ok, 0.5);
  result.q05 = quantile(ok, 0.05);
  result.q95 = quantile(ok, 0.95);
  return result;
}

SweepAxis parse_axis(const std::string& name) {
  const auto n = lower(name);
  if (n == "delta") return SweepAxis::delta;
  if (n == "x") return SweepAxis::x;
  if (n == "s") return SweepAxis::s;
  fail(Errc::invalid_parameter, "unknown sweep axis '" + name + "' (expected delta, x or s)");
}

const char* to_string(SweepAxis axis) noexcept {
  switch (axis) {
    case SweepAxis::delta:
      return "delta";
    case SweepAxis::x:
      return "x";
    case SweepAxis::s:
      return "s";
  }
  return "?";
}

std::vector<SweepPoint> sweep(const RunConfig& config, SweepAxis axis, const std::vector<double>& values) {
  require(!values.empty(), Errc::invalid_parameter, "sweep values must be nonempty");
  bool up = true, down = true;
  for (std::size_t i = 1; i < values.size(); ++i) {
    up = up && values[i] > values[i - 1];
    down = down && values[i] < values[i - 1];
  }
  require(up || down, Errc::invalid_parameter, "sweep values must be strictly monotone");
  if (axis == SweepAxis::delta) {
    require(!config.params.sigma2, Errc::invalid_parameter, "a delta sweep needs calibrated noise, not a fixed sigma2");
  } else {
    for (const double v : values) {
      require(v >= 0 && v == std::floor(v), Errc::invalid_parameter,
              std::string(to_string(axis)) + " values must be nonnegative integers");
    }
  }

  std::vector<SweepPoint> out;
  for (const double v : values) {
    auto point = config;
    switch (axis) {
      case SweepAxis::delta:
        point.params.delta = v;
        break;
      case SweepAxis::x:
        point.params.x = static_cast<std::size_t>(v);
        point.params.n_workers = 0;
        break;
      case SweepAxis::s:
        point.params.stragglers = static_cast<std::size_t>(v);
        point.params.n_workers = 0;
        if (point.stragglers.policy == StragglerPolicy::random) point.stragglers.count = point.params.stragglers;
        break;
    }
    out.push_back({v, run_local(point)});
  }
  return out;
}

std::string trials_csv(const std::vector<SweepPoint>& points) {
  std::string out = "sweep_value,trial,rel_error\n";
  for (const auto& p : points) {
    for (const auto& t : p.result.trials) {
      out += format_double(p.value) + ',' + std::to_string(t.trial) + ',' + format_double(t.rel_error) + '\n';
    }
  }
  return out;
}

std::string summary_csv(const std::vector<SweepPoint>& points) {
  std::string out = "sweep_value,median,q05,q95\n";
  for (const auto& p : points) {
    out += format_double(p.value) + ',' + format_double(p.result.median) + ',' + format_double(p.result.q05) + ',' +
           format_double(p.result.q95) + '\n';
  }
  return out;
}

std::string run_csv(const RunResult& result) {
  std::string out = "trial,rel_error,responding\n";
  for (const auto& t : result.trials) {
    std::vector<std::int64_t> w(t.responding.begin(), t.responding.end());
    out += std::to_string(t.trial) + ',' + format_double(t.rel_error) + ',' + join_ints(w, ';') + '\n';
  }
  return out;
}

}  // namespace sdmm
