#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sdmm/schemes.hpp"

namespace sdmm {

enum class StragglerPolicy {
  none,
  /// The listed workers never respond.
  fixed,
  /// `count` workers chosen uniformly per trial never respond.
  random,
};

struct StragglerSpec {
  StragglerPolicy policy = StragglerPolicy::none;
  /// 1-based worker positions for the fixed policy.
  std::vector<std::size_t> workers;
  std::size_t count = 0;
};

enum class InputDistribution {
  /// Uniform [-1, 1] for real schemes, unit disk for complex ones.
  automatic,
  uniform_real,
  unit_disk,
};

InputDistribution parse_distribution(const std::string& name);

struct RunConfig {
  SchemeParams params;
  StragglerSpec stragglers;
  std::size_t trials = 50;
  InputDistribution inputs = InputDistribution::automatic;
  /// A is t x s, B is s x r.
  std::size_t t = 64;
  std::size_t s = 64;
  std::size_t r = 64;
  ComputeOptions compute;
  /// Concurrent trials; 0 uses the default pool size.
  unsigned threads = 0;
};

struct TrialOutcome {
  std::size_t trial = 0;
  /// NaN when decoding failed.
  double rel_error = 0.0;
  std::optional<std::string> failure;
  std::vector<std::size_t> responding;
  double imag_residue = 0.0;
};

/// Seconds summed over trials.
struct PhaseTimes {
  double encode = 0.0;
  double compute = 0.0;
  double decode = 0.0;
};

struct RunResult {
  std::vector<TrialOutcome> trials;
  /// Statistics over the successful trials; NaN when none succeeded.
  double median = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
  std::size_t failures = 0;
  PhaseTimes timings;
};

/// Checks the configuration; returns the resolved scheme parameters.
SchemeParams validate(const RunConfig& config);

RunResult run_local(const RunConfig& config);

/// Per-trial parameters (seed split from (seed, trial)), inputs and the
/// double-precision reference product used by run_local.
struct TrialSetup {
  SchemeParams params;
  ComplexMatrix a;
  ComplexMatrix b;
  ComplexMatrix truth;
};
TrialSetup prepare_trial(const RunConfig& config, const SchemeParams& resolved, std::size_t trial);

/// Linear-interpolation quantile of unsorted data, q in [0, 1].
double quantile(std::vector<double> values, double q);

enum class SweepAxis { delta, x, s };

SweepAxis parse_axis(const std::string& name);
const char* to_string(SweepAxis axis) noexcept;

struct SweepPoint {
  double value = 0.0;
  RunResult result;
};

/// One run per value. Changing x or s resets n_workers to R + S; a random
/// straggler policy follows s.
std::vector<SweepPoint> sweep(const RunConfig& config, SweepAxis axis, const std::vector<double>& values);

/// sweep_value,trial,rel_error
std::string trials_csv(const std::vector<SweepPoint>& points);
/// sweep_value,median,q05,q95
std::string summary_csv(const std::vector<SweepPoint>& points);
/// trial,rel_error,responding
std::string run_csv(const RunResult& result);

}  // namespace sdmm
