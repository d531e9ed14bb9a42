#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sdmm/error.hpp"
#include "sdmm/runtime.hpp"

using namespace sdmm;

namespace {

RunConfig small_config(SchemeId id, std::size_t parts, std::size_t x, std::size_t size = 16) {
  RunConfig c;
  c.params = testing::make_params(id, parts, x);
  c.params.seed = 11;
  c.trials = 4;
  c.t = c.s = c.r = size;
  return c;
}

}  // namespace

TEST_CASE("quantiles interpolate linearly") {
  CHECK(quantile({5, 1, 3, 2, 4}, 0.5) == 3.0);
  CHECK(quantile({5, 1, 3, 2, 4}, 0.05) == doctest::Approx(1.2));
  CHECK(quantile({5, 1, 3, 2, 4}, 0.95) == doctest::Approx(4.8));
  CHECK(quantile({7}, 0.3) == 7.0);
  CHECK(std::isnan(quantile({}, 0.5)));
}

TEST_CASE("noiseless runs are exact for every scheme") {
  for (const auto id : all_schemes()) {
    const std::size_t parts = is_inner_scheme(id) ? 4 : 2;
    auto c = small_config(id, parts, 2);
    c.params.sigma2 = 0.0;
    const auto r = run_local(c);
    CHECK(r.failures == 0);
    CHECK(r.trials.size() == 4);
    CHECK_MESSAGE(r.median <= 1e-10, std::string(to_string(id)));
    CHECK(r.q05 <= r.median);
    CHECK(r.median <= r.q95);
    CHECK(r.trials[0].responding.size() == resolve(c.params).n_workers);
  }
}

TEST_CASE("straggler injection") {
  auto c = small_config(SchemeId::cmatdot, 8, 3);
  c.params.sigma2 = 0.0;
  for (const std::size_t s : {0, 2, 4}) {
    c.params.stragglers = s;
    c.stragglers.policy = StragglerPolicy::random;
    c.stragglers.count = s;
    const auto r = run_local(c);
    CHECK(r.failures == 0);
    for (const auto& t : r.trials) {
      CHECK(t.responding.size() == recovery_threshold(c.params));
      CHECK(std::isfinite(t.rel_error));
      CHECK(t.rel_error <= 1e-9);
    }
  }

  c.params.stragglers = 2;
  c.stragglers.policy = StragglerPolicy::fixed;
  c.stragglers.workers = {1, 23};
  const auto fixed = run_local(c);
  CHECK(fixed.trials[0].responding.front() == 2);
  CHECK(fixed.trials[0].responding.back() == 22);

  c.stragglers.workers = {1, 24};
  CHECK_THROWS_AS(run_local(c), Error);
  c.stragglers.workers = {3, 3};
  CHECK_THROWS_AS(run_local(c), Error);
  c.stragglers.workers = {1, 2, 3};
  CHECK_THROWS_AS(run_local(c), Error);
  c.stragglers.policy = StragglerPolicy::random;
  c.stragglers.count = 3;
  CHECK_THROWS_AS(run_local(c), Error);
}

TEST_CASE("configuration validation") {
  auto dft = small_config(SchemeId::cdft, 4, 1);
  dft.stragglers.policy = StragglerPolicy::random;
  try {
    run_local(dft);
    FAIL("DFT with stragglers accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("stragglers") != std::string::npos);
  }
  auto c = small_config(SchemeId::cmatdot, 4, 1);
  c.trials = 0;
  CHECK_THROWS_AS(run_local(c), Error);
  c.trials = 1;
  c.s = 10;
  CHECK_THROWS_AS(run_local(c), Error);
  auto real = small_config(SchemeId::rmatdot, 4, 1);
  real.inputs = InputDistribution::unit_disk;
  CHECK_THROWS_AS(run_local(real), Error);
  auto complex_real_inputs = small_config(SchemeId::cgasp, 2, 1);
  complex_real_inputs.inputs = InputDistribution::uniform_real;
  complex_real_inputs.params.sigma2 = 0.0;
  CHECK(run_local(complex_real_inputs).median <= 1e-10);
  CHECK(parse_distribution("disk") == InputDistribution::unit_disk);
  CHECK_THROWS_AS(parse_distribution("gauss"), Error);
  CHECK(parse_axis("X") == SweepAxis::x);
  CHECK_THROWS_AS(parse_axis("n"), Error);
}

TEST_CASE("reproducible regardless of concurrency") {
  auto c = small_config(SchemeId::rgasp, 2, 2);
  c.trials = 6;
  c.threads = 1;
  const auto one = sweep(c, SweepAxis::delta, {1e-2, 1});
  c.threads = 4;
  const auto four = sweep(c, SweepAxis::delta, {1e-2, 1});
  CHECK(trials_csv(one) == trials_csv(four));
  CHECK(summary_csv(one) == summary_csv(four));
  c.params.seed = 12;
  CHECK(trials_csv(sweep(c, SweepAxis::delta, {1e-2, 1})) != trials_csv(one));
}

TEST_CASE("single-point sweep is a plain run") {
  auto c = small_config(SchemeId::ca3s, 2, 1);
  c.params.delta = 0.5;
  const auto points = sweep(c, SweepAxis::delta, {0.5});
  const auto direct = run_local(c);
  REQUIRE(points.size() == 1);
  CHECK(points[0].result.median == direct.median);
  CHECK(run_csv(points[0].result) == run_csv(direct));
}

TEST_CASE("CSV layout") {
  auto c = small_config(SchemeId::cmatdot, 2, 1);
  c.trials = 2;
  const auto points = sweep(c, SweepAxis::s, {0, 1});
  const auto trials = trials_csv(points);
  CHECK(trials.rfind("sweep_value,trial,rel_error\n0,0,", 0) == 0);
  CHECK(std::count(trials.begin(), trials.end(), '\n') == 5);
  const auto summary = summary_csv(points);
  CHECK(summary.rfind("sweep_value,median,q05,q95\n0,", 0) == 0);
  CHECK(summary.find("\n1,") != std::string::npos);
  CHECK(run_csv(points[0].result).rfind("trial,rel_error,responding\n0,", 0) == 0);
}

TEST_CASE("sweep argument checks") {
  auto c = small_config(SchemeId::cmatdot, 2, 1);
  CHECK_THROWS_AS(sweep(c, SweepAxis::delta, {}), Error);
  CHECK_THROWS_AS(sweep(c, SweepAxis::delta, {1, 0.1, 0.5}), Error);
  CHECK_THROWS_AS(sweep(c, SweepAxis::x, {1.5, 2}), Error);
  c.params.sigma2 = 1.0;
  CHECK_THROWS_AS(sweep(c, SweepAxis::delta, {0.1, 1}), Error);
}

TEST_CASE("median error falls as leakage grows") {
  auto c = small_config(SchemeId::cmatdot, 8, 3);
  c.trials = 20;
  const auto points = sweep(c, SweepAxis::delta, {1e-4, 1e-2, 1});
  for (std::size_t i = 1; i < points.size(); ++i) CHECK(points[i].result.median <= points[i - 1].result.median);
}

TEST_CASE("CDFT error grows with X") {
  auto c = small_config(SchemeId::cdft, 8, 1);
  c.trials = 20;
  const auto points = sweep(c, SweepAxis::x, {1, 2, 3, 4, 5, 6});
  for (std::size_t i = 1; i < points.size(); ++i) CHECK(points[i].result.median > points[i - 1].result.median);
}
