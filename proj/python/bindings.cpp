#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fmoment/bounds.hpp"
#include "fmoment/charfunc.hpp"
#include "fmoment/clt.hpp"
#include "fmoment/criterion.hpp"
#include "fmoment/io.hpp"
#include "fmoment/levy.hpp"

namespace py = pybind11;
using namespace fmoment;

namespace {

CharFn make_f(double p, double A, double B, double C, std::optional<double> p_prime,
              std::optional<double> K0) {
  CharFnParams params{p, A, B, C, p_prime, K0};
  return CharFn::family(params);
}

// Documents cross the boundary as JSON text; the Python side wraps them.
std::string criterion_json(const std::string& spec, const CharFn& f, std::uint64_t seed,
                           std::size_t replicates, int points, double h0, int levels,
                           unsigned threads) {
  const auto s = io::process_spec_from_json(io::json::parse(spec));
  const auto cfg = CriterionConfig::standard(f, replicates, h0, levels, points);
  py::gil_scoped_release nogil;
  return io::to_json(run_criterion(s, cfg, {seed, 0}, {threads})).dump();
}

std::string subsequence_json(const std::string& spec, const CharFn& f,
                             const std::vector<double>& t_seq, std::size_t n,
                             std::uint64_t seed, unsigned threads) {
  const auto s = io::process_spec_from_json(io::json::parse(spec));
  py::gil_scoped_release nogil;
  return io::to_json(subsequence_criterion(s, f, t_seq, n, {seed, 0}, {threads})).dump();
}

std::string counterexample_json(const CharFn& f, const std::vector<double>& t_seq,
                                std::size_t n, std::uint64_t seed, unsigned threads) {
  py::gil_scoped_release nogil;
  const auto ce = counterexample(f, t_seq);
  io::json j = io::to_json(subsequence_criterion(ce, f, n, {seed, 0}, {threads}));
  j["b"] = ce.b();
  j["k_values"] = ce.k_values();
  return j.dump();
}

std::string clt_json(const std::string& model, const std::string& config,
                     std::uint64_t seed, unsigned threads) {
  const auto m = io::sequence_model_from_json(io::json::parse(model));
  const auto c = io::clt_config_from_json(io::json::parse(config));
  py::gil_scoped_release nogil;
  return io::to_json(run_clt(m, c, {seed, 0}, {threads})).dump();
}

}  // namespace

PYBIND11_MODULE(_fmoment, m) {
  m.doc() = "f-moment Brownian-motion criterion and self-normalized CLT toolkit";

  py::register_exception<io::ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<CharFn>(m, "CharFn")
      .def(py::init(&make_f), py::arg("p") = 1.0, py::arg("A") = 1.0, py::arg("B") = 0.0,
           py::arg("C") = 0.0, py::arg("p_prime") = py::none(), py::arg("K0") = py::none())
      .def("__call__", &CharFn::operator())
      .def("inverse", &CharFn::inverse)
      .def_property_readonly("p", &CharFn::p)
      .def_property_readonly("A", &CharFn::A)
      .def_property_readonly("B", &CharFn::B)
      .def_property_readonly("C", &CharFn::C)
      .def_property_readonly("p_prime", &CharFn::p_prime)
      .def_property_readonly("K0", &CharFn::K0)
      .def("__repr__", [](const CharFn& f) {
        return "CharFn(" + io::to_json(f).dump() + ")";
      });

  m.def("psi", &psi, py::arg("f"), py::arg("x"));
  m.def("psi_inverse", &psi_inverse, py::arg("f"), py::arg("y"));
  m.def("g_shift", &g_shift, py::arg("f"), py::arg("y"));
  m.def("gaussian_abs_moment", &gaussian_abs_moment, py::arg("p"));
  m.def("verify_fcond", [](const CharFn& f) {
    const auto r = verify_fcond(f, default_x_grid(), default_k_grid(f.K0()));
    py::dict d;
    d["convexity_violations"] = r.convexity_violations;
    d["growth_violations"] = r.growth_violations;
    d["worst_growth_ratio"] = r.worst_growth_ratio;
    d["alpha"] = r.alpha;
    d["ok"] = r.ok();
    return d;
  }, py::arg("f"));

  m.def("_run_criterion", &criterion_json, py::arg("spec"), py::arg("f"), py::arg("seed"),
        py::arg("replicates"), py::arg("points"), py::arg("h0"), py::arg("levels"),
        py::arg("threads"));
  m.def("_subsequence_criterion", &subsequence_json, py::arg("spec"), py::arg("f"),
        py::arg("t_seq"), py::arg("replicates"), py::arg("seed"), py::arg("threads"));
  m.def("_counterexample", &counterexample_json, py::arg("f"), py::arg("t_seq"),
        py::arg("replicates"), py::arg("seed"), py::arg("threads"));
  m.def("_run_clt", &clt_json, py::arg("model"), py::arg("config"), py::arg("seed"),
        py::arg("threads"));

  m.def("burkholder_check", [](const std::vector<std::pair<std::vector<double>, std::vector<double>>>& jumps,
                               const CharFn& f) {
    std::vector<Distribution> d;
    for (const auto& [v, p] : jumps) d.push_back(Distribution::discrete(v, p));
    const auto r = burkholder_check(d, f);
    return py::make_tuple(r.middle, r.upper_sum, r.ratio_low);
  }, py::arg("jumps"), py::arg("f"),
     "Returns (E f(sum), E f(sqrt(sum of squares)), ratio).");
}
