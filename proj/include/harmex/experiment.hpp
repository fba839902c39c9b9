#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "harmex/analysis.hpp"

namespace harmex::experiment {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Batch description for a convergence study: which domain to refine, at which
// mesh sizes, how many interface samples per mesh, and which statistics to
// evaluate on the extracted driving functions.
struct ExperimentConfig {
  std::string domain_file;      // polygon JSON with the two boundary marks
  std::string map = "closed";   // "closed" (canonical half-disk) or "welded"
  std::vector<double> eps_list; // strictly decreasing mesh sizes
  int samples = 0;              // interface samples per mesh size (>= 30)
  double capacity_T = 0.5;      // capacity horizon for driving extraction
  std::vector<double> t_grid;   // marginal-law capacity times, in (0, T]
  double moment_time = 0.1;     // base time of the two-sided stopping rule
  double observe_time = 0.05;   // capacity at which field errors are measured
  int observable_samples = 40;  // per mesh; 0 means every sample
  int modulus_samples = 100;    // per mesh; 0 means every sample
  int trace_samples = 0;        // per mesh; 0 means every sample
  std::vector<double> delta_list;  // modulus scales (may be empty)
  double modulus_r = 0.8;          // exceedance exponent
  uint64_t seed = 0;
  double tol = 1e-10;
  std::string out_dir = "report";

  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
  std::string to_json() const;

  // Throws ConfigError on any violated constraint.
  void validate() const;
};

// Per-mesh aggregate statistics.
struct EpsBlock {
  double eps = 0.0;
  int samples = 0;
  double mean_steps = 0.0;
  std::vector<analysis::MarginalRow> marginals;
  analysis::MomentStats moments;

  int observable_count = 0;  // samples that contributed a field-error value
  double observable_max = 0.0;
  double observable_mean = 0.0;

  std::vector<double> exceedance;  // aligned with qualifying_deltas
  std::vector<double> qualifying_deltas;

  int trace_blocks = 0;  // coarsening resolution used at this mesh
  int trace_count = 0;
  double trace_mean = 0.0;
  double trace_median = 0.0;
};

struct CriterionResult {
  std::string name;
  bool evaluated = false;  // false when the config cannot support the check
  bool pass = false;
  std::string detail;
};

struct ConvergenceReport {
  ExperimentConfig config;
  std::vector<EpsBlock> blocks;
  bool have_fit = false;
  analysis::PowerLawFit observable_fit;
  std::vector<CriterionResult> criteria;

  bool all_pass() const;

  std::string to_json() const;
  std::string summary_csv() const;
  std::string variance_csv() const;
  std::string modulus_csv() const;

  // Writes report.json, summary.csv, variance_profile.csv, modulus.csv and
  // the two charts into `dir`, creating it if needed.
  void write(const std::string& dir) const;
};

// Runs the full pipeline: for every mesh size, samples interfaces, maps them
// to the half-plane, extracts driving functions up to config.capacity_T and
// aggregates marginal, moment, field-error, modulus and trace statistics,
// then evaluates the convergence criteria.  `threads` > 1 distributes the
// per-sample work; results are reduced in sample order, so the report bytes
// do not depend on the thread count.
ConvergenceReport run_experiment(const ExperimentConfig& cfg, int threads = 1);

}  // namespace harmex::experiment
