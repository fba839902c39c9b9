#pragma once
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "harmex/harmonic.hpp"
#include "harmex/lattice.hpp"

namespace harmex::explorer {

using harmonic::Workspace;
using lattice::Coord;
using lattice::GridDomain;

struct AlreadyTerminated : std::logic_error {
  explicit AlreadyTerminated(const std::string& what) : std::logic_error(what) {}
};
struct StepBudgetExceeded : std::runtime_error {
  explicit StepBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// One consumed turn decision.  z is the uniform variate compared against the
// hitting probability, or -1 when the decision was made without one (walk
// sampling or an already-colored apex in the walk sampler).
struct TurnRecord {
  double z;
  bool left;
};

// Interface process state: the colored vertex set, the current field solved
// on its complement, and the directed edge the path is about to cross.
// The edge is oriented in travel direction: `edge_left` carries color 0,
// `edge_right` color 1; this holds inductively from the start edge.
struct ExplorerState {
  const GridDomain* dom = nullptr;
  int n = 0;                     // completed steps
  cplx v_hat, v_hat_prev;        // current and previous polyline points
  int edge_left = -1, edge_right = -1;
  int prev_tri = -1;             // triangle on the entered-from side (-1 at start)
  std::vector<int8_t> color;     // per vertex: -1 free, else 0/1
  Workspace field;               // Dirichlet solution for the colored set
  std::vector<TurnRecord> log;
  bool terminated = false;
};

ExplorerState initial_state(const GridDomain& dom, double tol = 1e-10);

// Advances one triangle: identifies the apex across the current edge, compares
// Z against its field value, colors it (1 on a left turn), and re-solves the
// field incrementally.  Returns the successor state.
ExplorerState step(const ExplorerState& s, double Z);
void step_inplace(ExplorerState& s, double Z);

// Sampled curve through edge midpoints and triangle centers.
struct ExplorerPath {
  double eps = 0.0;
  uint64_t seed = 0;
  int steps = 0;                      // triangles visited
  std::vector<cplx> points;           // 2*steps + 1 points, v0_hat ... ve_hat
  std::vector<int8_t> kinds;          // 0 = edge midpoint, 1 = triangle center
  std::vector<int> absorbed;          // vertex id colored at each step
  std::vector<int8_t> absorbed_color; // its color
  std::vector<TurnRecord> log;
};

// Draws the path by stepping the field process with one uniform variate per
// step.  Deterministic in (dom, seed, tol).
ExplorerPath sample_path(const GridDomain& dom, uint64_t seed, double tol = 1e-10);

// Same transition law, but each turn is decided by running a lattice random
// walk from the apex until it hits a colored vertex (the left-turn probability
// is exactly the field value, so the two samplers agree in distribution).
// Skips the per-step field maintenance, which dominates at fine meshes.
ExplorerPath sample_path_walk(const GridDomain& dom, uint64_t seed);

// One-step tower property of the field at v: returns (lhs, rhs) with
// rhs = current field value and lhs = p * h_left(v) + (1-p) * h_right(v),
// the children being full re-solves after coloring the apex 1 resp. 0.
std::pair<double, double> martingale_audit(const ExplorerState& s, Coord v);

// Rebuilds the state after the first `steps` turns of a recorded path by
// replaying its turn outcomes and then solving the field once from the
// accumulated colors.  One cold solve instead of `steps` warm updates, so a
// single intermediate state is much cheaper than re-running sample_path.
// Throws std::invalid_argument on a step count outside [0, path.steps] and
// std::logic_error if the replayed geometry diverges from path.points.
ExplorerState replay_prefix(const GridDomain& dom, const ExplorerPath& path,
                            int steps, double tol = 1e-10);

// CSV with one comment header line (eps, seed, N) then index,x,y,kind rows.
void write_path_csv(const ExplorerPath& p, const std::string& path);
std::string path_csv_string(const ExplorerPath& p);

}  // namespace harmex::explorer
