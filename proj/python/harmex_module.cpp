// Python bindings for the main operations: interface sampling, driving
// extraction, SLE trace generation, exponent tables, and the experiment
// runner.  Deliberately a thin functional surface over the C++ core.
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>
#include <vector>

#include "harmex/analysis.hpp"
#include "harmex/conformal.hpp"
#include "harmex/experiment.hpp"
#include "harmex/explorer.hpp"
#include "harmex/lattice.hpp"
#include "harmex/loewner.hpp"
#include "harmex/rng.hpp"

namespace py = pybind11;
using namespace harmex;

namespace {

lattice::GridDomain load_domain(const std::string& file, double eps) {
  auto poly = lattice::JordanPolygon::from_json_file(file);
  return lattice::build_domain_approximation(poly, eps);
}

conformal::HalfPlaneMap domain_map(const std::string& file,
                                   const lattice::GridDomain& dom,
                                   const std::string& map_kind) {
  if (map_kind == "welded") return conformal::map_to_halfplane(dom);
  if (map_kind != "closed")
    throw std::invalid_argument("map must be 'closed' or 'welded'");
  auto poly = lattice::JordanPolygon::from_json_file(file);
  double R = 0.0;
  if (!conformal::canonical_halfdisk(poly, &R))
    throw std::invalid_argument(
        "closed-form map needs the canonical half-disk; use map='welded'");
  return conformal::halfdisk_closed_form(R);
}

}  // namespace

PYBIND11_MODULE(harmex, m) {
  m.doc() =
      "harmonic explorer interfaces, their Loewner driving functions, and "
      "SLE(4) convergence statistics";

  m.def("exponents", [] {
    analysis::ExponentTable t = analysis::optimize_exponents();
    py::dict d;
    d["beta_star"] = t.beta_star;
    d["r_star"] = t.r_star;
    d["nu_star"] = t.nu_star;
    d["m_star"] = t.m_star;
    d["cubic_residual"] = t.cubic_residual;
    return d;
  }, "optimal rate exponents of the convergence analysis");

  m.def("rate_functions", [](double beta, double r) {
    analysis::RateFunctions f = analysis::exponent_functions(beta, r);
    return py::make_tuple(f.chi, f.q, f.nu);
  }, py::arg("beta"), py::arg("r"),
     "(chi, q, nu) at the given growth exponent and rate split");

  m.def("sample_path",
        [](const std::string& domain_file, double eps, uint64_t seed) {
          auto dom = load_domain(domain_file, eps);
          explorer::ExplorerPath p = explorer::sample_path_walk(dom, seed);
          std::vector<std::pair<double, double>> pts;
          pts.reserve(p.points.size());
          for (cplx z : p.points) pts.emplace_back(z.real(), z.imag());
          py::dict d;
          d["eps"] = p.eps;
          d["seed"] = p.seed;
          d["steps"] = p.steps;
          d["points"] = pts;
          return d;
        },
        py::arg("domain_file"), py::arg("eps"), py::arg("seed"),
        "draw one interface path on the grid approximation of the domain");

  m.def("extract_drive",
        [](const std::string& domain_file, double eps, uint64_t seed,
           double t_max, const std::string& map_kind) {
          auto dom = load_domain(domain_file, eps);
          auto map = domain_map(domain_file, dom, map_kind);
          explorer::ExplorerPath p = explorer::sample_path_walk(dom, seed);
          std::vector<cplx> img(p.points.begin(), p.points.end() - 1);
          img = conformal::map_curve(map, img);
          img[0] = cplx(img[0].real(), 0.0);
          loewner::DrivingFunction drv = loewner::extract_driving(img, t_max);
          py::dict d;
          d["t"] = drv.t;
          d["w"] = drv.w;
          return d;
        },
        py::arg("domain_file"), py::arg("eps"), py::arg("seed"),
        py::arg("t_max") = 0.5, py::arg("map") = "closed",
        "sample a path and extract its chordal driving function");

  m.def("sle_trace",
        [](double T, double dt, uint64_t seed, double kappa) {
          loewner::DrivingFunction drv =
              loewner::sample_sle4_driving(T, dt, seed, kappa);
          loewner::TraceCurve c = loewner::solve_trace(drv);
          std::vector<double> x, y;
          x.reserve(c.z.size());
          y.reserve(c.z.size());
          for (cplx z : c.z) {
            x.push_back(z.real());
            y.push_back(z.imag());
          }
          py::dict d;
          d["t"] = c.t;
          d["x"] = x;
          d["y"] = y;
          return d;
        },
        py::arg("T"), py::arg("dt"), py::arg("seed"), py::arg("kappa") = 4.0,
        "sample a Brownian driving function and solve its trace");

  m.def("modulus_exceedance",
        [](const std::string& domain_file, double eps, uint64_t seed,
           int samples, double delta, double r) {
          auto dom = load_domain(domain_file, eps);
          std::vector<explorer::ExplorerPath> paths;
          paths.reserve(samples);
          for (int s = 0; s < samples; ++s)
            paths.push_back(
                explorer::sample_path_walk(dom, stream_seed(seed, uint64_t(s))));
          return analysis::modulus_exceedance(paths, delta, r);
        },
        py::arg("domain_file"), py::arg("eps"), py::arg("seed"),
        py::arg("samples"), py::arg("delta"), py::arg("r") = 0.8,
        "fraction of sampled interfaces whose crosscut modulus at scale delta "
        "exceeds delta**r");

  m.def("run_experiment",
        [](const std::string& config_json, int threads) {
          experiment::ExperimentConfig cfg =
              experiment::ExperimentConfig::from_json(config_json);
          experiment::ConvergenceReport rep =
              experiment::run_experiment(cfg, threads);
          return rep.to_json();
        },
        py::arg("config_json"), py::arg("threads") = 1,
        "run the multi-mesh convergence experiment; returns the report JSON");

  py::register_exception<experiment::ConfigError>(m, "ConfigError");
}
