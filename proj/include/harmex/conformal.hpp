#pragma once

// Conformal maps from grid domains onto the upper half-plane, the boundary
// metric used to compare half-plane curves, and the tip structure modulus
// (a bottleneck detector for simple curves).

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "harmex/explorer.hpp"
#include "harmex/lattice.hpp"
#include "harmex/loewner.hpp"

namespace harmex {
namespace conformal {

class MapConstructionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cayley transform (z - i)/(z + i) onto the unit disk; infinity maps to 1.
cplx cayley(cplx z);

// Metric rho(z, w) = |cayley(z) - cayley(w)| on the closed half-plane plus
// the point at infinity.
double rho_metric(cplx z, cplx w);

enum class Metric { kEuclidean, kRho };

// One boundary-welding cell: a real Mobius u = z / (1 - z*inv_a) followed by
// the vertical slit map of height h, rescaled by 1/h to keep magnitudes tame.
struct ZipCell {
  double inv_a = 0.0;
  double h = 1.0;
};

// Conformal map from a domain onto the upper half-plane sending the start
// mark to 0 and the end mark to infinity, with a designated third boundary
// point sent to 1 fixing the remaining scale freedom.  Two representations:
// a closed form for the canonical half-disk, and a welded composition of
// boundary cells for arbitrary grid domains.
struct HalfPlaneMap {
  enum class Kind { kClosedFormHalfDisk, kZipper };
  Kind kind = Kind::kZipper;

  // closed form: upper half-disk {|z| < R, Im z > 0}, start mark at +R,
  // end mark at -R, top of the arc at 1
  double R = 1.0;

  // welded composition
  cplx start;                  // start mark, mapped to exactly 0
  cplx end_mark;               // end mark, mapped to infinity
  cplx one_mark;               // designated boundary point mapped to 1
  cplx q0, q1;                 // first two welded boundary points
  std::vector<ZipCell> cells;  // one cell per remaining boundary point
  double inv_xfar = 0.0;       // terminal Mobius parameter
  double s_term = 1.0;         // +-1 picking the upper-half-plane square side
  double K = -1.0;             // final Mobius w -> K / (w - Xe)
  double Xe = 0.0;
  std::vector<double> boundary_images;  // welded point images, diagnostics
  std::size_t idx_end = 0;              // index of the end mark (image inf)
  std::size_t idx_one = 0;              // index of the point sent to 1

  // Evaluation exactly at the end mark is ill-posed (its image is infinity)
  // and raises std::invalid_argument from the slit primitives.
  cplx forward(cplx z) const;
  cplx inverse(cplx w) const;
};

// Closed-form map of the canonical half-disk of radius R.
HalfPlaneMap halfdisk_closed_form(double R);

// True when the polygon is a canonical upper half-disk that the closed-form
// map handles: marks at (R, 0) and (-R, 0), every vertex on the arc or on
// the diameter.  On success *R_out (if given) receives the radius.
bool canonical_halfdisk(const lattice::JordanPolygon& poly,
                        double* R_out = nullptr);

// Weld the grid boundary cycle (with the two edge-midpoint marks inserted)
// into the half-plane.  refine_per_edge > 1 subdivides every boundary
// segment to tighten the welded proxy.  Throws MapConstructionFailure when
// the welding degenerates (non-positive heights, orientation breakdown).
HalfPlaneMap map_to_halfplane(const lattice::GridDomain& dom,
                              int refine_per_edge = 1);

// Pointwise images of a curve.  When pts[0] equals the map's start mark the
// first image is exactly 0.
std::vector<cplx> map_curve(const HalfPlaneMap& map,
                            const std::vector<cplx>& pts);
std::vector<cplx> map_curve(const HalfPlaneMap& map,
                            const explorer::ExplorerPath& path);

struct StructureModulusReport {
  double delta = 0.0;
  double eta = 0.0;
  bool has_witness = false;
  double s = 0.0, t = 0.0;  // witness times when has_witness
  std::string to_json() const;  // {"delta":..., "eta":..., "witness":[s,t]|null}
};

// Tip-anchored structure modulus of a polyline: eta(delta) = max(delta,
// largest "dive" closed off by a delta-gate).  A gate is an index pair
// u < v (v >= u+2) with dist(p_u, p_v) <= delta whose open chord is not
// crossed by the earlier polyline p[0..v]; the chord then closes a pocket
// bounded by p[u..v].  The dive is the stretch p[v..w] up to the first later
// segment crossing the chord (or the curve end), and its diameter counts
// only when the dive starts on the opposite side of the pocket from
// `far_point`, the reference endpoint the tip must be cut off from; a U-turn
// that exits past its gate contributes nothing.  far_point = nullopt places
// the reference at infinity (outside every pocket), the right choice for
// half-plane curves escaping to infinity.  The chord test uses the curve
// itself as the only obstacle.  Under Metric::kRho all geometry is measured
// after the Cayley transform and an infinite reference sits at its image 1.
// The witness reports the gate times (t_u, t_v) when a gate attains eta.
StructureModulusReport tip_structure_modulus(
    const std::vector<double>& times, const std::vector<cplx>& pts,
    double delta, Metric metric = Metric::kEuclidean,
    std::optional<cplx> far_point = std::nullopt);
StructureModulusReport tip_structure_modulus(
    const loewner::TraceCurve& curve, double delta,
    Metric metric = Metric::kEuclidean,
    std::optional<cplx> far_point = std::nullopt);

}  // namespace conformal
}  // namespace harmex
