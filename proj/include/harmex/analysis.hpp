#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "harmex/conformal.hpp"
#include "harmex/explorer.hpp"
#include "harmex/lattice.hpp"
#include "harmex/loewner.hpp"

namespace harmex::analysis {

// Deterministic exponent computations -----------------------------------

// The three rate functions at (beta, r): the growth exponent chi, the
// auxiliary exponent q = min{17 beta / 8, chi - 2}, and the convergence rate
// nu = min{r (1 - beta), chi - 2, (1 - r) / 2}.
struct RateFunctions {
  double chi = 0.0;
  double q = 0.0;
  double nu = 0.0;
};

// Domain: beta in (sqrt(3)/2, 1), r in (0, 1); throws std::domain_error.
RateFunctions exponent_functions(double beta, double r);

struct ExponentTable {
  double beta_star = 0.0;
  double r_star = 0.0;
  double nu_star = 0.0;
  double m_star = 0.0;
  double cubic_residual = 0.0;

  std::string to_json() const;
};

// Maximizes nu over the rectangle: beta_star solves
// 8 b^3 - 14 b^2 - 6 b + 11 = 0 in (sqrt(3)/2, 1) by bisection to 1e-12,
// r_star = 1 / (3 - 2 beta_star) equalizes the first and third branches,
// m_star = nu_star / (2 - beta_star).
ExponentTable optimize_exponents();

// Statistical estimators -------------------------------------------------

// Max over test vertices v of |h(v) - htilde(phi_j(v) - W_end)|, where h is
// the state's field, phi_j composes the forward slit cells of `drv` after the
// half-plane map, W_end = drv.w.back(), and htilde(z) = 1 - arg(z)/pi.
// Every test vertex must lie at distance >= 0.1 * diam both from the boundary
// and from the traced curve, the latter proxied by the state's interior
// colored vertices (throws std::invalid_argument otherwise).
double observable_error(const lattice::GridDomain& dom,
                        const explorer::ExplorerState& state,
                        const conformal::HalfPlaneMap& map,
                        const loewner::DrivingFunction& drv,
                        const std::vector<int>& test_vertices);

// Increment statistics at the two-sided stopping rule: per sample, n is the
// first index with t_n >= n_time and m the first later index with
// (t_m - t_n) or (W_m - W_n)^2 reaching eps^{1/3}; samples where the rule
// never triggers take m at the end and are counted in `flagged`.
struct MomentStats {
  double mean_inc = 0.0;   // mean of W(t_m) - W(t_n)
  double var_defect = 0.0; // mean of (W(t_m) - W(t_n))^2 - 4 (t_m - t_n)
  double sd_inc = 0.0;     // sample standard deviations of the two summands
  double sd_defect = 0.0;
  int n_samples = 0;
  int flagged = 0;
  std::vector<int> stop_n, stop_m;  // per-sample indices
};

MomentStats driving_moment_stats(
    const std::vector<loewner::DrivingFunction>& samples, double eps,
    double n_time);

// Marginal law of W(t) on a capacity grid: empirical mean and variance plus
// the one-sample Kolmogorov-Smirnov statistic against N(0, 4t).
struct MarginalRow {
  double t = 0.0;
  int n_samples = 0;
  double mean = 0.0;
  double variance = 0.0;
  double ks_stat = 0.0;
};

std::vector<MarginalRow> marginal_distance(
    const std::vector<loewner::DrivingFunction>& samples,
    const std::vector<double>& t_grid);

// Asymptotic one-sample KS acceptance threshold c(alpha)/sqrt(n) with
// c(alpha) = sqrt(-ln(alpha/2)/2); c(0.01) ~= 1.6276.
double ks_critical(double alpha, int n);

// Least-squares fit of log(err) = amplitude + exponent * log(eps).
struct PowerLawFit {
  double exponent = 0.0;
  double stderr_exponent = 0.0;
  double log_amplitude = 0.0;
};

// Requires >= 3 distinct eps values and positive errors.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& pairs);

// Fraction of sampled paths whose tip-structure modulus proxy at scale delta
// exceeds delta^r.  Each curve is stopped on first reaching distance
// 0.1 * (its own diameter) from its final point; delta must exceed twice the
// lattice spacing of every sample.
double modulus_exceedance(const std::vector<explorer::ExplorerPath>& samples,
                          double delta, double r);

// Sup distance between the trace of `drv` restricted to a uniform grid of
// `blocks` capacity cells on [0, T] and the trace of its Gaussian skeleton:
// the normalized block increments (W(t_{j+1}) - W(t_j)) / (2 sqrt(dt)) are
// replaced, in rank order, by the normal quantiles Phi^-1((i+1/2)/blocks)
// recentred to the sample mean, so the skeleton reproduces the sample's
// overall displacement and the distance measures shape discrepancy only.
// Fully deterministic; zero exactly when the normalized increments already
// form a shifted quantile set, and shrinking as the block-increment law
// approaches a Gaussian.  Requires blocks >= 2 and a sample reaching T.
// When eval_points > 0 the sup runs over that many uniformly spaced grid
// times instead of all block boundaries, so distances computed at different
// block resolutions stay comparable (a sup over more points is biased up).
double gaussianized_trace_distance(const loewner::DrivingFunction& drv,
                                   double T, int blocks, int eval_points = 0);

}  // namespace harmex::analysis
