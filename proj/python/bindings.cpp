#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdmm/bounds.hpp"
#include "sdmm/error.hpp"
#include "sdmm/net.hpp"
#include "sdmm/runtime.hpp"

namespace py = pybind11;
using namespace sdmm;

namespace {

ComplexMatrix to_matrix(const Dense& values, Precision p = Precision::f64) { return ComplexMatrix(values, p); }

SchemeParams make_params(const std::string& scheme, std::size_t m, std::size_t k, std::size_t l, std::size_t x,
                         std::size_t n, std::size_t s, double delta, std::optional<double> sigma2,
                         const std::string& precision, std::uint64_t seed) {
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
  return resolve(p);
}

py::dict result_dict(const RunResult& r) {
  py::dict d;
  std::vector<double> errors;
  std::vector<std::vector<std::size_t>> responding;
  for (const auto& t : r.trials) {
    errors.push_back(t.rel_error);
    responding.push_back(t.responding);
  }
  d["errors"] = errors;
  d["responding"] = responding;
  d["median"] = r.median;
  d["q05"] = r.q05;
  d["q95"] = r.q95;
  d["failures"] = r.failures;
  d["timings"] = py::dict(py::arg("encode") = r.timings.encode, py::arg("compute") = r.timings.compute,
                          py::arg("decode") = r.timings.decode);
  return d;
}

RunConfig make_config(const SchemeParams& params, std::size_t trials, std::tuple<std::size_t, std::size_t, std::size_t> size,
                      std::size_t straggle) {
  RunConfig c;
  c.params = params;
  c.trials = trials;
  std::tie(c.t, c.s, c.r) = size;
  if (straggle > 0) {
    c.stragglers.policy = StragglerPolicy::random;
    c.stragglers.count = straggle;
  }
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Secure distributed matrix multiplication over the complex numbers";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<InsufficientResponses>(m, "InsufficientResponses", m.attr("Error").ptr());

  py::class_<SchemeParams>(m, "SchemeParams")
      .def(py::init(&make_params), py::arg("scheme") = "cmatdot", py::arg("m") = 1, py::arg("k") = 1,
           py::arg("l") = 1, py::arg("x") = 0, py::arg("n") = 0, py::arg("s") = 0, py::arg("delta") = 1e-2,
           py::arg("sigma2") = py::none(), py::arg("precision") = "double", py::arg("seed") = 0)
      .def_property_readonly("scheme", [](const SchemeParams& p) { return std::string(to_string(p.scheme)); })
      .def_readonly("m", &SchemeParams::m)
      .def_readonly("k", &SchemeParams::k)
      .def_readonly("l", &SchemeParams::l)
      .def_readonly("x", &SchemeParams::x)
      .def_readonly("n", &SchemeParams::n_workers)
      .def_readonly("s", &SchemeParams::stragglers)
      .def_readonly("delta", &SchemeParams::delta)
      .def_readonly("seed", &SchemeParams::seed)
      .def_property_readonly("r", [](const SchemeParams& p) { return recovery_threshold(p); })
      .def("__repr__", [](const SchemeParams& p) {
        return "SchemeParams(" + std::string(to_string(p.scheme)) + ", N=" + std::to_string(p.n_workers) +
               ", R=" + std::to_string(recovery_threshold(p)) + ")";
      });

  m.def("schemes", [] {
    std::vector<std::string> out;
    for (const auto id : all_schemes()) out.emplace_back(to_string(id));
    return out;
  });

  m.def(
      "encode",
      [](const SchemeParams& p, const Dense& a, const Dense& b) {
        const auto shares = encode(p, to_matrix(a, p.precision), to_matrix(b, p.precision));
        std::vector<std::tuple<std::size_t, Dense, Dense>> out;
        for (const auto& s : shares.shares) out.emplace_back(s.worker, s.a.values(), s.b.values());
        return out;
      },
      py::arg("params"), py::arg("a"), py::arg("b"), "Shares as (worker, a_share, b_share), workers 1-based.");

  m.def(
      "worker_compute",
      [](const std::string& scheme, std::size_t worker, const Dense& a, const Dense& b) {
        const auto r = worker_compute(parse_scheme(scheme), worker, to_matrix(a), to_matrix(b));
        std::optional<Dense> minus;
        if (r.minus) minus = r.minus->values();
        return std::make_tuple(r.worker, Dense(r.plus.values()), minus);
      },
      py::arg("scheme"), py::arg("worker"), py::arg("a"), py::arg("b"));

  m.def(
      "decode",
      [](const SchemeParams& p, const std::vector<std::tuple<std::size_t, Dense, std::optional<Dense>>>& responses) {
        std::vector<WorkerResponse> rs;
        for (const auto& [w, plus, minus] : responses) {
          WorkerResponse r{w, to_matrix(plus, p.precision), std::nullopt};
          if (minus) r.minus = to_matrix(*minus, p.precision);
          rs.push_back(std::move(r));
        }
        DecodeOptions opts;
        opts.residue = ResiduePolicy::report;
        return Dense(decode(p, rs, opts).product.values());
      },
      py::arg("params"), py::arg("responses"));

  m.def(
      "multiply",
      [](const SchemeParams& p, const Dense& a, const Dense& b) {
        const auto shares = encode(p, to_matrix(a, p.precision), to_matrix(b, p.precision));
        std::vector<WorkerResponse> rs;
        for (const auto& s : shares.shares) rs.push_back(worker_compute(p.scheme, s));
        DecodeOptions opts;
        opts.residue = ResiduePolicy::report;
        return Dense(decode(p, rs, opts).product.values());
      },
      py::arg("params"), py::arg("a"), py::arg("b"), "Encode, compute at every worker and decode.");

  m.def(
      "run_local",
      [](const SchemeParams& p, std::size_t trials, std::tuple<std::size_t, std::size_t, std::size_t> size,
         std::size_t stragglers) {
        const auto c = make_config(p, trials, size, stragglers);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_local(c);
        }
        return result_dict(r);
      },
      py::arg("params"), py::arg("trials") = 50, py::arg("size") = std::make_tuple(64, 64, 64),
      py::arg("stragglers") = 0);

  m.def(
      "sweep",
      [](const SchemeParams& p, const std::string& axis, const std::vector<double>& values, std::size_t trials,
         std::tuple<std::size_t, std::size_t, std::size_t> size, std::size_t stragglers) {
        auto c = make_config(p, trials, size, stragglers);
        const auto points = sweep(c, parse_axis(axis), values);
        py::dict d;
        d["trials_csv"] = trials_csv(points);
        d["summary_csv"] = summary_csv(points);
        py::list per_point;
        for (const auto& pt : points) per_point.append(result_dict(pt.result));
        d["results"] = per_point;
        return d;
      },
      py::arg("params"), py::arg("axis"), py::arg("values"), py::arg("trials") = 50,
      py::arg("size") = std::make_tuple(64, 64, 64), py::arg("stragglers") = 0);

  m.def("recovery_threshold", [](const SchemeParams& p) { return recovery_threshold(p); });

  m.def(
      "audit",
      [](const SchemeParams& p) {
        const auto a = audit_scheme(p);
        py::dict d;
        d["worst_case_nats"] = a.worst_case_nats;
        d["passed"] = a.passed;
        d["a_csv"] = leakage_csv(a.a);
        d["b_csv"] = leakage_csv(a.b);
        d["worst_subset_a"] = a.a.worst_subset;
        d["worst_subset_b"] = a.b.worst_subset;
        return d;
      },
      py::arg("params"));

  m.def(
      "calibrate_sigma2",
      [](double delta, std::size_t x, std::size_t p, std::size_t n, double factor) {
        return calibrate_sigma2(delta, x, p, n, factor).sigma2;
      },
      py::arg("delta"), py::arg("x"), py::arg("p"), py::arg("n"), py::arg("factor") = 1.0);

  m.def(
      "verify_bounds",
      [](std::int64_t n_max) {
        const auto reports = verify_bounds_exhaustive(n_max);
        std::size_t violations = 0;
        for (const auto& r : reports) violations += r.violations.empty() ? 0 : 1;
        return std::make_tuple(reports.size(), violations, bounds_csv(reports));
      },
      py::arg("n_max"), "(subsets checked, subsets with a violation, CSV)");

  m.def(
      "encode_frame",
      [](std::uint8_t type, const py::bytes& payload) {
        const std::string s = payload;
        require(type >= 1 && type <= 5, Errc::invalid_parameter, "unknown message type");
        const auto bytes = net::encode_frame({static_cast<net::MsgType>(type), {s.begin(), s.end()}});
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      },
      py::arg("type"), py::arg("payload"));

  m.def(
      "decode_frame",
      [](const py::bytes& data) {
        const std::string s = data;
        const auto f = net::decode_frame({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
        return std::make_tuple(static_cast<int>(f.type),
                               py::bytes(reinterpret_cast<const char*>(f.payload.data()), f.payload.size()));
      },
      py::arg("data"));
}
