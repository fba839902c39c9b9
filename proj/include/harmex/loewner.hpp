#pragma once
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "harmex/lattice.hpp"

namespace harmex::loewner {

struct PointOnBoundary : std::runtime_error {
  explicit PointOnBoundary(const std::string& what) : std::runtime_error(what) {}
};

// Elementary growth cell: a vertical slit of height y = 2*sqrt(dcap) at x.
struct SlitStep {
  double x = 0.0;
  double dcap = 0.0;
};

inline double hcap_of_slit(double y) {
  if (!(y > 0.0)) throw std::invalid_argument("slit height must be positive");
  return y * y / 4.0;
}

// Forward cell map g: H minus the slit -> H, normalized g(z) = z + O(1/z).
// The tip x + iy maps to x.  Precondition: z != x (the slit base is a double
// prime end with no single image).
cplx slit_map(cplx z, const SlitStep& step);

// Inverse cell map f: H -> H minus the slit, f(x) = tip.
cplx slit_map_inverse(cplx w, const SlitStep& step);

// Capacity-time samples of the driving function.  Between samples the hull
// grows a single vertical slit at w[k] (constant-plus-slit convention), so
// the sample list doubles as the exact cell sequence for solve_trace.
struct DrivingFunction {
  std::vector<double> t;  // strictly increasing, t[0] = 0
  std::vector<double> w;  // w[0] = value at the curve base

  // piecewise-constant evaluation: value of the cell containing `time`
  double at(double time) const;
  double total_capacity() const { return t.empty() ? 0.0 : t.back(); }
};

struct TraceCurve {
  std::vector<double> t;
  std::vector<cplx> z;
};

// Absorbs one curve point per cell: at each stage the image z' of the next
// point under the previous cells yields (x = Re z', dcap = (Im z')^2 / 4).
// Stops early once cumulative capacity reaches t_max.
DrivingFunction extract_driving(const std::vector<cplx>& curve,
                                double t_max = std::numeric_limits<double>::infinity());

// Evaluates the trace at every sample time by composing the inverse cell maps
// in reverse; the innermost cell's driving point maps to its tip exactly, so
// no off-boundary regularization is needed.
TraceCurve solve_trace(const DrivingFunction& drv);

// Driving increments are independent centered Gaussians of variance
// kappa * dt on the uniform grid t_k = k * dt.
DrivingFunction sample_sle4_driving(double T, double dt, uint64_t seed,
                                    double kappa = 4.0);

// Linear-interpolation refinement to spacing <= max_spacing; original points
// are kept and their new positions reported.
struct ResampledCurve {
  std::vector<cplx> points;
  std::vector<int> index_of_original;
};
ResampledCurve resample_polyline(const std::vector<cplx>& curve, double max_spacing);

std::string driving_csv_string(const DrivingFunction& d);  // t,W
void write_driving_csv(const DrivingFunction& d, const std::string& path);
std::string trace_csv_string(const TraceCurve& c);  // t,x,y
void write_trace_csv(const TraceCurve& c, const std::string& path);

}  // namespace harmex::loewner
