// Command-line front end for the statistics: deterministic exponent tables,
// multi-mesh convergence experiments, and crosscut-modulus tables.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "harmex/analysis.hpp"
#include "harmex/experiment.hpp"
#include "harmex/rng.hpp"

using namespace harmex;

namespace {

constexpr int kOk = 0, kConfig = 2, kRuntime = 3, kCriteria = 4;

int run_exponents() {
  analysis::ExponentTable t = analysis::optimize_exponents();
  std::printf("optimal convergence exponents\n");
  std::printf("  beta_star      %12.6f\n", t.beta_star);
  std::printf("  r_star         %12.6f\n", t.r_star);
  std::printf("  nu_star        %12.6f\n", t.nu_star);
  std::printf("  m_star         %12.6f\n", t.m_star);
  std::printf("  cubic_residual %12.3e\n", t.cubic_residual);
  std::printf("%s\n", t.to_json().c_str());
  return kOk;
}

int run_convergence(const std::string& config_file, const std::string& out_dir,
                    int threads) {
  experiment::ExperimentConfig cfg;
  try {
    cfg = experiment::ExperimentConfig::from_json_file(config_file);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
  } catch (const experiment::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfig;
  }

  experiment::ConvergenceReport rep;
  try {
    rep = experiment::run_experiment(cfg, threads);
  } catch (const experiment::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: experiment failed: %s\n", e.what());
    return kRuntime;
  }

  try {
    rep.write(cfg.out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: cannot write report: %s\n", e.what());
    return kRuntime;
  }

  for (const experiment::CriterionResult& c : rep.criteria)
    std::printf("[%s] %-18s %s\n",
                !c.evaluated ? "SKIP" : c.pass ? "PASS" : "FAIL",
                c.name.c_str(), c.detail.c_str());
  bool ok = rep.all_pass();
  std::printf("%s -- report in %s\n",
              ok ? "all criteria passed" : "criteria FAILED", cfg.out_dir.c_str());
  return ok ? kOk : kCriteria;
}

struct ModulusArgs {
  std::string domain, out;
  double eps = 0.0, r = 0.8;
  uint64_t seed = 0;
  int samples = 100;
  std::vector<double> deltas;
};

int run_modulus(const ModulusArgs& a) {
  if (!std::filesystem::exists(a.domain)) {
    std::fprintf(stderr, "error: domain file '%s' does not exist\n",
                 a.domain.c_str());
    return kConfig;
  }
  for (double d : a.deltas)
    if (!(d > 2.0 * a.eps)) {
      std::fprintf(stderr,
                   "error: delta %g must exceed twice the mesh size %g\n", d,
                   a.eps);
      return kConfig;
    }
  try {
    auto poly = lattice::JordanPolygon::from_json_file(a.domain);
    auto dom = lattice::build_domain_approximation(poly, a.eps);
    std::vector<explorer::ExplorerPath> paths;
    paths.reserve(a.samples);
    for (int s = 0; s < a.samples; ++s)
      paths.push_back(
          explorer::sample_path_walk(dom, stream_seed(a.seed, uint64_t(s))));
    std::string csv = "delta,r,samples,exceedance\n";
    for (double d : a.deltas) {
      double freq = analysis::modulus_exceedance(paths, d, a.r);
      char buf[128];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.17g\n", d, a.r,
                    a.samples, freq);
      csv += buf;
    }
    if (a.out.empty()) {
      std::fputs(csv.c_str(), stdout);
    } else {
      std::ofstream f(a.out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + a.out);
      f << csv;
      std::printf("wrote %s: %zu crosscut scales, %d samples\n", a.out.c_str(),
                  a.deltas.size(), a.samples);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: modulus analysis failed: %s\n", e.what());
    return kRuntime;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convergence statistics for explorer interfaces"};
  app.require_subcommand(1);

  CLI::App* exponents = app.add_subcommand(
      "exponents", "print the optimal rate exponents as text and JSON");

  std::string config_file, out_dir;
  int threads = 1;
  CLI::App* convergence = app.add_subcommand(
      "convergence", "run the multi-mesh experiment from a JSON config");
  convergence->add_option("--config", config_file, "experiment config JSON")
      ->required();
  convergence->add_option("--out", out_dir,
                          "output directory (overrides the config)");
  convergence->add_option("--threads", threads, "worker threads")
      ->check(CLI::Range(1, 64));

  ModulusArgs ma;
  CLI::App* modulus = app.add_subcommand(
      "modulus", "tabulate crosscut-modulus exceedance frequencies");
  modulus->add_option("--domain", ma.domain, "marked Jordan domain JSON file")
      ->required();
  modulus->add_option("--eps", ma.eps, "mesh size")
      ->required()
      ->check(CLI::PositiveNumber);
  modulus->add_option("--seed", ma.seed, "random seed")->required();
  modulus->add_option("--delta", ma.deltas, "crosscut scales")
      ->required()
      ->check(CLI::PositiveNumber);
  modulus->add_option("--r", ma.r, "exceedance exponent in (0,1)")
      ->check(CLI::Range(1e-9, 1.0));
  modulus->add_option("--samples", ma.samples, "number of interface samples")
      ->check(CLI::Range(1, 1000000));
  modulus->add_option("--out", ma.out, "output CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  if (exponents->parsed()) return run_exponents();
  if (convergence->parsed())
    return run_convergence(config_file, out_dir, threads);
  return run_modulus(ma);
}
