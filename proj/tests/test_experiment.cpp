#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "harmex/experiment.hpp"

using namespace harmex;
using experiment::ConfigError;
using experiment::ExperimentConfig;

static std::string data_dir() {
  const char* env = std::getenv("HARMEX_DATA_DIR");
  return env ? env : "data";
}

// Small but real config: two coarse meshes on the half-disk, enough samples
// to clear the estimator minimums, and every statistic enabled.
static ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.domain_file = data_dir() + "/halfdisk.json";
  cfg.map = "closed";
  cfg.eps_list = {0.12, 0.1};
  cfg.samples = 30;
  cfg.capacity_T = 0.3;
  cfg.t_grid = {0.1, 0.2};
  cfg.moment_time = 0.1;
  cfg.observe_time = 0.05;
  cfg.observable_samples = 8;
  cfg.modulus_samples = 30;
  cfg.trace_samples = 12;
  cfg.delta_list = {0.3, 0.5};
  cfg.modulus_r = 0.8;
  cfg.seed = 97;
  cfg.tol = 1e-10;
  cfg.out_dir = "unused";
  return cfg;
}

TEST_CASE("config JSON round trip preserves every field") {
  ExperimentConfig cfg = tiny_config();
  ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
  CHECK(back.domain_file == cfg.domain_file);
  CHECK(back.eps_list == cfg.eps_list);
  CHECK(back.seed == cfg.seed);
  CHECK(back.delta_list == cfg.delta_list);
}

TEST_CASE("config defaults fill optional fields") {
  ExperimentConfig cfg = ExperimentConfig::from_json(R"({
    "domain": "data/halfdisk.json",
    "eps_list": [0.1, 0.05],
    "samples": 40,
    "capacity_T": 0.5,
    "t_grid": [0.1],
    "seed": 7
  })");
  CHECK(cfg.map == "closed");
  CHECK(cfg.moment_time == 0.1);
  CHECK(cfg.observe_time == 0.05);
  CHECK(cfg.modulus_r == 0.8);
  CHECK(cfg.tol == 1e-10);
  CHECK(cfg.out_dir == "report");
  CHECK(cfg.delta_list.empty());
}

TEST_CASE("config validation rejects each malformed field") {
  auto broken = [](auto mutate) {
    ExperimentConfig cfg = tiny_config();
    mutate(cfg);
    return cfg;
  };
  CHECK_THROWS_AS(
      broken([](ExperimentConfig& c) { c.samples = 29; }).validate(),
      ConfigError);
  CHECK_THROWS_AS(
      broken([](ExperimentConfig& c) { c.eps_list = {}; }).validate(),
      ConfigError);
  CHECK_THROWS_AS(
      broken([](ExperimentConfig& c) { c.eps_list = {0.1, 0.1}; }).validate(),
      ConfigError);
  CHECK_THROWS_AS(
      broken([](ExperimentConfig& c) { c.eps_list = {0.05, 0.1}; }).validate(),
      ConfigError);
  CHECK_THROWS_AS(
      broken([](ExperimentConfig& c) { c.eps_list = {0.1, -0.05}; }).validate(),
      ConfigError);
  CHECK_THROWS_AS(
      broken([](ExperimentConfig& c) { c.capacity_T = 0.0; }).validate(),
      ConfigError);
  CHECK_THROWS_AS(
      broken([](ExperimentConfig& c) { c.t_grid = {}; }).validate(),
      ConfigError);
  CHECK_THROWS_AS(
      broken([](ExperimentConfig& c) { c.t_grid = {0.1, 0.4}; }).validate(),
      ConfigError);  // beyond capacity_T
  CHECK_THROWS_AS(
      broken([](ExperimentConfig& c) { c.t_grid = {0.2, 0.1}; }).validate(),
      ConfigError);
  CHECK_THROWS_AS(
      broken([](ExperimentConfig& c) { c.moment_time = 0.3; }).validate(),
      ConfigError);  // must be < capacity_T
  CHECK_THROWS_AS(
      broken([](ExperimentConfig& c) { c.observe_time = 0.0; }).validate(),
      ConfigError);
  CHECK_THROWS_AS(
      broken([](ExperimentConfig& c) { c.map = "mobius"; }).validate(),
      ConfigError);
  CHECK_THROWS_AS(
      broken([](ExperimentConfig& c) { c.delta_list = {0.5, 0.3}; }).validate(),
      ConfigError);
  CHECK_THROWS_AS(
      broken([](ExperimentConfig& c) { c.modulus_r = 1.0; }).validate(),
      ConfigError);
  CHECK_THROWS_AS(
      broken([](ExperimentConfig& c) { c.observable_samples = -1; }).validate(),
      ConfigError);
  CHECK_THROWS_AS(
      broken([](ExperimentConfig& c) { c.tol = 0.0; }).validate(),
      ConfigError);
  CHECK_THROWS_AS(
      broken([](ExperimentConfig& c) { c.out_dir = ""; }).validate(),
      ConfigError);
  CHECK_THROWS_AS(
      broken([](ExperimentConfig& c) { c.domain_file = ""; }).validate(),
      ConfigError);
}

TEST_CASE("config parse errors surface as ConfigError") {
  CHECK_THROWS_AS(ExperimentConfig::from_json("not json"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json("{}"), ConfigError);
  CHECK_THROWS_AS(
      ExperimentConfig::from_json(
          R"({"schema":"other/1","domain":"d","eps_list":[0.1],"samples":30,
              "capacity_T":0.5,"t_grid":[0.1],"seed":1})"),
      ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_file("/nonexistent/cfg.json"),
                  ConfigError);
}

TEST_CASE("run_experiment rejects unusable domains before sampling") {
  ExperimentConfig cfg = tiny_config();
  cfg.domain_file = "/nonexistent/domain.json";
  CHECK_THROWS_AS(experiment::run_experiment(cfg), ConfigError);

  // closed-form map on a non-half-disk domain
  ExperimentConfig star = tiny_config();
  star.domain_file = data_dir() + "/hexstar.json";
  star.eps_list = {0.12, 0.1};
  CHECK_THROWS_AS(experiment::run_experiment(star), ConfigError);
}

TEST_CASE("tiny run fills every block statistic") {
  ExperimentConfig cfg = tiny_config();
  experiment::ConvergenceReport rep = experiment::run_experiment(cfg, 1);

  REQUIRE(rep.blocks.size() == 2);
  CHECK(rep.have_fit == false);  // needs three meshes
  for (const experiment::EpsBlock& b : rep.blocks) {
    CHECK(b.samples == 30);
    CHECK(b.mean_steps > 10.0);
    REQUIRE(b.marginals.size() == 2);
    CHECK(b.marginals[0].t == 0.1);
    CHECK(b.marginals[0].n_samples == 30);
    CHECK(b.marginals[1].variance > 0.0);
    CHECK(b.moments.n_samples == 30);
    CHECK(b.observable_count > 0);
    CHECK(b.observable_count <= 8);
    CHECK(b.observable_max >= b.observable_mean);
    CHECK(b.observable_mean > 0.0);
    CHECK(b.trace_blocks == 16);
    CHECK(b.trace_count == 12);
    CHECK(b.trace_mean > 0.0);
    REQUIRE(b.qualifying_deltas.size() == 2);
    for (double f : b.exceedance) {
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
    }
  }

  // nine named criteria; the three trend checks need >= 3 meshes
  REQUIRE(rep.criteria.size() == 9);
  auto find = [&rep](const std::string& name) {
    for (const experiment::CriterionResult& c : rep.criteria)
      if (c.name == name) return c;
    REQUIRE(false);
    return rep.criteria[0];
  };
  CHECK(find("observable-slope").evaluated == false);
  CHECK(find("ks-trend").evaluated == false);
  CHECK(find("trace-trend").evaluated == false);
  CHECK(find("variance-band").evaluated == true);
  CHECK(find("mean-band").evaluated == true);
  CHECK(find("ks-band").evaluated == true);
  CHECK(find("moment-flagged").evaluated == true);
  CHECK(find("modulus-monotone").evaluated == true);
  CHECK(find("modulus-bound").evaluated == true);
}

TEST_CASE("report bytes are identical across thread counts and reruns") {
  ExperimentConfig cfg = tiny_config();
  experiment::ConvergenceReport a = experiment::run_experiment(cfg, 1);
  experiment::ConvergenceReport b = experiment::run_experiment(cfg, 2);
  experiment::ConvergenceReport c = experiment::run_experiment(cfg, 3);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_json() == c.to_json());
  CHECK(a.summary_csv() == b.summary_csv());
  CHECK(a.variance_csv() == b.variance_csv());
  CHECK(a.modulus_csv() == b.modulus_csv());

  // a different master seed must actually change the data
  ExperimentConfig other = cfg;
  other.seed = 98;
  experiment::ConvergenceReport d = experiment::run_experiment(other, 2);
  CHECK(d.summary_csv() != a.summary_csv());
}

TEST_CASE("write emits the full artifact set") {
  namespace fs = std::filesystem;
  ExperimentConfig cfg = tiny_config();
  cfg.samples = 30;
  experiment::ConvergenceReport rep = experiment::run_experiment(cfg, 2);

  fs::path dir = fs::temp_directory_path() / "harmex_experiment_write_test";
  fs::remove_all(dir);
  rep.write(dir.string());
  for (const char* name :
       {"report.json", "summary.csv", "variance_profile.csv", "modulus.csv",
        "variance_profile.svg", "observable_fit.svg"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(dir / name));
    CHECK(fs::file_size(dir / name) > 0);
  }

  std::ifstream in(dir / "report.json");
  nlohmann::json j = nlohmann::json::parse(in);
  CHECK(j.at("schema") == "explorer-convergence/1");
  CHECK(j.at("blocks").size() == 2);
  CHECK(j.at("config").at("seed") == 97);
  CHECK(j.at("criteria").size() == 9);
  CHECK(j.contains("pass"));

  std::ifstream svg_in(dir / "variance_profile.svg");
  std::string svg_text((std::istreambuf_iterator<char>(svg_in)),
                       std::istreambuf_iterator<char>());
  CHECK(svg_text.find("<svg") != std::string::npos);
  CHECK(svg_text.find("Var W(t)") != std::string::npos);
  fs::remove_all(dir);
}
