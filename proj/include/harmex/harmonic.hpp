#pragma once
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "harmex/lattice.hpp"

namespace harmex::harmonic {

using lattice::Coord;
using lattice::GridDomain;

struct MissingNeighbor : std::runtime_error {
  explicit MissingNeighbor(const std::string& what) : std::runtime_error(what) {}
};
struct NonConvergence : std::runtime_error {
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

// Dirichlet data keyed by vertex id.  Any finite reals are accepted; the
// explorer only ever uses values in [0,1].
struct BoundaryData {
  std::map<int, double> values;
  static BoundaryData from_coords(const GridDomain& dom, const std::map<Coord, double>& vals);
};

// Data for the initial explorer field: 1 on the arc from v0_hat to ve_hat
// (ccw), 0 on the complementary arc.
BoundaryData arc_indicator_data(const GridDomain& dom);

struct HarmonicField {
  const GridDomain* dom = nullptr;
  std::vector<double> values;   // per vertex id
  std::vector<char> dirichlet;  // per vertex id
  double tol = 1e-10;
  double residual = 0.0;

  double at(int id) const { return values[id]; }
  double at(Coord c) const;
};

// Mean over the six lattice neighbors minus the center value; requires the
// full neighbor ring inside the domain.
double discrete_laplacian(const HarmonicField& f, int vertex_id);

// budget_sweeps < 0 means the default budget of 50 * vertex_count sweeps
HarmonicField solve_dirichlet(const GridDomain& dom, const BoundaryData& bd, double tol = 1e-10,
                              double budget_sweeps = -1.0);

// Same field after `changed` turns into a Dirichlet vertex with `value`,
// warm-started from the previous solution.
HarmonicField update_after_step(const HarmonicField& f, int changed, double value);

void dump_csv(const HarmonicField& f, const std::string& path);  // header m,n,value

// In-place relaxation engine shared by solve_dirichlet / update_after_step and
// the explorer's inner loop (which performs one Dirichlet insertion per step).
class Workspace {
 public:
  Workspace(const GridDomain& dom, const BoundaryData& bd, double tol,
            double budget_sweeps = -1.0);
  explicit Workspace(const HarmonicField& f);

  // Gauss-Seidel relaxation (deterministic expanding-worklist schedule) until
  // the max residual over free vertices is within the internal target.
  void relax_all();
  void relax_after(int changed_vertex);
  void set_dirichlet(int vertex, double value);

  double value(int vertex) const { return values_[vertex]; }
  bool is_dirichlet(int vertex) const { return dirichlet_[vertex] != 0; }
  double residual() const { return residual_; }
  double tol() const { return tol_; }
  double used_sweeps() const { return used_sweeps_; }
  const GridDomain& dom() const { return *dom_; }
  HarmonicField snapshot() const;

 private:
  void check_free_ring(int vertex) const;
  double wave(std::vector<int> seeds, double delta_act);
  double residual_pass(std::vector<int>* violators, double thresh);
  void converge(std::vector<int> seeds);

  const GridDomain* dom_;
  std::vector<double> values_;
  std::vector<char> dirichlet_;
  std::vector<int> free_ids_;  // ascending; rebuilt when a vertex is pinned
  double tol_;
  double target_;
  double residual_ = 0.0;
  double used_sweeps_ = 0.0;
  double budget_sweeps_;
  std::vector<char> mark_;  // scratch
};

}  // namespace harmex::harmonic
