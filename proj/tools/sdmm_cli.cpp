#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <sstream>
#include <thread>

#include "sdmm/bounds.hpp"
#include "sdmm/csv.hpp"
#include "sdmm/error.hpp"
#include "sdmm/net.hpp"
#include "sdmm/runtime.hpp"

using namespace sdmm;

namespace {

struct SchemeFlags {
  std::string scheme = "cmatdot";
  std::size_t m = 8;
  std::size_t k = 4;
  std::size_t l = 4;
  std::size_t x = 3;
  std::size_t n = 0;
  std::size_t s = 0;
  double delta = 1e-2;
  std::optional<double> sigma2;
  std::string precision = "single";
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--scheme", scheme, "cmatdot cdft cgasp ca3s rmatdot rdft rgasp ra3s")->capture_default_str();
    app->add_option("--M", m, "inner partitions")->capture_default_str();
    app->add_option("--K", k, "row blocks of A")->capture_default_str();
    app->add_option("--L", l, "column blocks of B")->capture_default_str();
    app->add_option("--X", x, "colluding workers")->capture_default_str();
    app->add_option("--N", n, "workers (0: R + S)")->capture_default_str();
    app->add_option("--S", s, "stragglers")->capture_default_str();
    app->add_option("--delta", delta, "leakage budget in nats")->capture_default_str();
    app->add_option("--sigma2", sigma2, "fixed noise variance instead of calibration");
    app->add_option("--precision", precision, "single or double")->capture_default_str();
    app->add_option("--seed", seed)->capture_default_str();
  }

  SchemeParams params() const {
    SchemeParams p;
    p.scheme = parse_scheme(scheme);
    p.m = m;
    p.k = k;
    p.l = l;
    p.x = x;
    p.n_workers = n;
    p.stragglers = s;
    p.delta = delta;
    p.sigma2 = sigma2;
    p.precision = parse_precision(precision);
    p.seed = seed;
    return p;
  }
};

struct RunFlags {
  SchemeFlags scheme;
  std::string size = "256,256,256";
  std::size_t trials = 50;
  std::string inputs = "auto";
  std::string straggle = "random";
  std::vector<std::size_t> drop;
  unsigned threads = 0;

  void add(CLI::App* app) {
    scheme.add(app);
    app->add_option("--size", size, "t,s,r for A (t x s) and B (s x r)")->capture_default_str();
    app->add_option("--trials", trials)->capture_default_str();
    app->add_option("--inputs", inputs, "auto, uniform or disk")->capture_default_str();
    app->add_option("--straggle", straggle, "none, random (S per trial) or fixed (--drop)")->capture_default_str();
    app->add_option("--drop", drop, "1-based workers that never respond")->delimiter(',');
    app->add_option("--threads", threads, "concurrent trials (0: SDMM_THREADS or all cores)");
  }

  RunConfig config() const {
    RunConfig c;
    c.params = scheme.params();
    std::vector<std::size_t> dims;
    std::stringstream ss(size);
    for (std::string part; std::getline(ss, part, ',');) dims.push_back(std::stoul(part));
    require(dims.size() == 3, Errc::invalid_parameter, "--size expects t,s,r");
    c.t = dims[0];
    c.s = dims[1];
    c.r = dims[2];
    c.trials = trials;
    c.inputs = parse_distribution(inputs);
    c.threads = threads;
    if (straggle == "none") {
      c.stragglers.policy = StragglerPolicy::none;
    } else if (straggle == "random") {
      // DFT schemes have no slack, so the default degrades to no stragglers.
      c.stragglers.policy = c.params.stragglers > 0 ? StragglerPolicy::random : StragglerPolicy::none;
      c.stragglers.count = c.params.stragglers;
    } else if (straggle == "fixed") {
      c.stragglers.policy = StragglerPolicy::fixed;
      c.stragglers.workers = drop;
    } else {
      fail(Errc::invalid_parameter, "unknown straggler policy '" + straggle + "'");
    }
    return c;
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), Errc::io_error, "cannot open " + path);
  out << text;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    require(used == part.size() && !part.empty(), Errc::invalid_parameter, "bad sweep value '" + part + "'");
    out.push_back(v);
  }
  return out;
}

int serve(const std::string& bind, std::uint16_t port) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  net::WorkerServer server({bind, port});
  std::cout << server.port() << std::endl;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  });
  server.run();
  waiter.join();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure distributed matrix multiplication with roots-of-unity codes"};
  app.require_subcommand(1);

  RunFlags run_flags;
  std::string run_out;
  auto* run = app.add_subcommand("run", "encode, compute, drop stragglers, decode; CSV of per-trial errors");
  run_flags.add(run);
  run->add_option("--out", run_out, "CSV path (default stdout)");

  RunFlags sweep_flags;
  std::string axis = "delta";
  std::string values;
  std::string sweep_out, sweep_summary;
  auto* sweep_cmd = app.add_subcommand("sweep", "repeat run over delta, x or s");
  sweep_flags.add(sweep_cmd);
  sweep_cmd->add_option("--axis", axis, "delta, x or s")->capture_default_str();
  sweep_cmd->add_option("--values", values, "comma-separated, monotone")->required();
  sweep_cmd->add_option("--out", sweep_out, "per-trial CSV path");
  sweep_cmd->add_option("--summary", sweep_summary, "summary CSV path (default stdout)");

  SchemeFlags audit_flags;
  std::string audit_out;
  std::size_t audit_max = 100000;
  bool audit_sample = false;
  auto* audit = app.add_subcommand("audit", "exhaustive leakage audit of both generator pairs");
  audit_flags.add(audit);
  audit->add_option("--out", audit_out, "per-subset CSV path");
  audit->add_option("--max-subsets", audit_max)->capture_default_str();
  audit->add_flag("--sample", audit_sample, "sample subsets when the count exceeds --max-subsets");

  std::int64_t n_max = 8;
  std::string bounds_out;
  unsigned bounds_threads = 0;
  auto* bounds = app.add_subcommand("bounds", "check the Vandermonde norm bounds over every subset");
  bounds->add_option("--n-max", n_max)->capture_default_str();
  bounds->add_option("--out", bounds_out, "per-subset CSV path");
  bounds->add_option("--threads", bounds_threads);

  std::string bind = "127.0.0.1";
  std::uint16_t port = 0;
  auto* worker = app.add_subcommand("serve-worker", "run a worker daemon; prints the bound port");
  worker->add_option("--port", port, "0 picks a free port")->capture_default_str();
  worker->add_option("--bind", bind)->capture_default_str();

  RunFlags coord_flags;
  std::string workers;
  int timeout_ms = 10000;
  std::string coord_out;
  auto* coord = app.add_subcommand("coordinate", "run one job over TCP workers");
  coord_flags.add(coord);
  coord->add_option("--workers", workers, "host:port,...")->required();
  coord->add_option("--timeout", timeout_ms, "milliseconds")->capture_default_str();
  coord->add_option("--out", coord_out, "CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto result = run_local(run_flags.config());
      write_text(run_out, run_csv(result));
      std::cerr << "median " << format_double(result.median) << " q05 " << format_double(result.q05) << " q95 "
                << format_double(result.q95) << " failures " << result.failures << "\n";
    } else if (*sweep_cmd) {
      const auto points = sweep(sweep_flags.config(), parse_axis(axis), parse_values(values));
      if (!sweep_out.empty()) write_text(sweep_out, trials_csv(points));
      write_text(sweep_summary, summary_csv(points));
    } else if (*audit) {
      AuditOptions opts;
      opts.max_subsets = audit_max;
      opts.allow_sampling = audit_sample;
      const auto params = audit_flags.params();
      const auto report = audit_scheme(params, opts);
      if (!audit_out.empty()) {
        std::string csv = "side," + leakage_csv(report.a);
        std::string body;
        auto add_side = [&](const char* side, const LeakageReport& r) {
          const auto text = leakage_csv(r);
          std::stringstream ss(text.substr(text.find('\n') + 1));
          for (std::string line; std::getline(ss, line);) body += std::string(side) + ',' + line + '\n';
        };
        add_side("A", report.a);
        add_side("B", report.b);
        write_text(audit_out, csv.substr(0, csv.find('\n') + 1) + body);
      }
      auto show = [](const char* side, const LeakageReport& r) {
        std::vector<std::int64_t> w(r.worst_subset.begin(), r.worst_subset.end());
        std::cout << side << " worst " << format_double(r.worst_case_nats) << " nats at {" << join_ints(w, ',')
                  << "} over " << r.entries.size() << (r.exhaustive ? " subsets" : " sampled subsets") << "\n";
      };
      show("A", report.a);
      show("B", report.b);
      std::cout << (report.passed ? "pass" : "FAIL") << ": worst " << format_double(report.worst_case_nats)
                << " <= delta " << format_double(params.delta) << "\n";
      return report.passed ? 0 : 1;
    } else if (*bounds) {
      VerifyOptions opts;
      opts.threads = bounds_threads;
      const auto reports = verify_bounds_exhaustive(n_max, opts);
      if (!bounds_out.empty()) write_text(bounds_out, bounds_csv(reports));
      std::size_t violations = 0;
      for (const auto& r : reports) {
        if (r.violations.empty()) continue;
        ++violations;
        std::vector<std::int64_t> s(r.subset.begin(), r.subset.end());
        std::cout << "violation n=" << r.n << " subset {" << join_ints(s, ',') << "}\n";
      }
      std::cout << reports.size() << " subsets, " << violations << " violations\n";
      return violations == 0 ? 0 : 1;
    } else if (*worker) {
      return serve(bind, port);
    } else if (*coord) {
      const auto config = coord_flags.config();
      const auto resolved = validate(config);
      const auto setup = prepare_trial(config, resolved, 0);
      const auto result = net::coordinate(net::parse_endpoints(workers), setup.params, setup.a, setup.b,
                                          std::chrono::milliseconds(timeout_ms));
      std::vector<std::int64_t> used(result.used_workers.begin(), result.used_workers.end());
      write_text(coord_out, "rel_error,used_workers\n" + format_double(relative_error(result.product, setup.truth)) +
                                ',' + join_ints(used, ';') + '\n');
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
