#include "harmex/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "harmex/rng.hpp"

namespace harmex::loewner {

cplx slit_map(cplx z, const SlitStep& step) {
  double y2 = 4.0 * step.dcap;
  cplx zeta = z - step.x;
  if (zeta == 0.0)
    throw std::invalid_argument("slit base has two prime-end images");
  // Written as zeta * sqrt(1 + y^2/zeta^2): the argument stays off the
  // negative real axis for every zeta outside the slit, so the principal
  // branch is the correct one on both sides (the naive sqrt(zeta^2 + y^2)
  // would cross its cut for Re zeta < 0).
  return step.x + zeta * std::sqrt(1.0 + y2 / (zeta * zeta));
}

cplx slit_map_inverse(cplx w, const SlitStep& step) {
  double y2 = 4.0 * step.dcap;
  cplx omega = w - step.x;
  cplx s = std::sqrt(omega * omega - y2);
  // branch with Im >= 0; for real results keep the sign of omega so the two
  // boundary rays continue symmetrically
  if (s.imag() < 0.0) s = -s;
  if (s.imag() == 0.0 && (s.real() < 0.0) != (omega.real() < 0.0)) s = -s;
  return step.x + s;
}

double DrivingFunction::at(double time) const {
  if (t.empty()) throw std::logic_error("empty driving function");
  if (time <= t.front()) return w.front();
  auto it = std::lower_bound(t.begin(), t.end(), time);
  if (it == t.end()) return w.back();
  return w[static_cast<size_t>(it - t.begin())];
}

DrivingFunction extract_driving(const std::vector<cplx>& curve, double t_max) {
  if (curve.size() < 2) throw std::invalid_argument("need at least two curve points");
  if (std::abs(curve.front().imag()) > 1e-12)
    throw std::invalid_argument("curve must start on the real axis");
  for (size_t i = 1; i < curve.size(); ++i) {
    if (curve[i] == curve[i - 1])
      throw std::invalid_argument("consecutive curve points must be distinct");
  }
  DrivingFunction out;
  out.t.push_back(0.0);
  out.w.push_back(curve.front().real());
  std::vector<cplx> img(curve.begin() + 1, curve.end());
  double t = 0.0;
  for (size_t k = 0; k < img.size(); ++k) {
    cplx zp = img[k];
    if (!(zp.imag() > 0.0))
      throw PointOnBoundary("curve sample " + std::to_string(k + 1) +
                            " left the upper half-plane during unzipping");
    SlitStep cell{zp.real(), zp.imag() * zp.imag() / 4.0};
    t += cell.dcap;
    out.t.push_back(t);
    out.w.push_back(cell.x);
    if (t >= t_max) break;
    for (size_t j = k + 1; j < img.size(); ++j) img[j] = slit_map(img[j], cell);
  }
  return out;
}

TraceCurve solve_trace(const DrivingFunction& drv) {
  size_t n = drv.t.size();
  if (n == 0 || drv.w.size() != n) throw std::invalid_argument("malformed driving function");
  std::vector<SlitStep> cells(n);  // cells[k] grows on (t[k-1], t[k]]
  for (size_t k = 1; k < n; ++k) {
    double dcap = drv.t[k] - drv.t[k - 1];
    if (!(dcap > 0.0)) throw std::invalid_argument("capacity times must increase");
    cells[k] = {drv.w[k], dcap};
  }
  TraceCurve out;
  out.t = drv.t;
  out.z.resize(n);
  out.z[0] = cplx(drv.w[0], 0.0);
  for (size_t k = 1; k < n; ++k) {
    // tip of cell k, pulled back through the earlier cells
    cplx z = cplx(cells[k].x, 2.0 * std::sqrt(cells[k].dcap));
    for (size_t j = k; j-- > 1;) z = slit_map_inverse(z, cells[j]);
    out.z[k] = z;
  }
  return out;
}

DrivingFunction sample_sle4_driving(double T, double dt, uint64_t seed, double kappa) {
  if (!(dt > 0.0) || !(dt < T))
    throw std::invalid_argument("need 0 < dt < T");
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  size_t steps = static_cast<size_t>(std::floor(T / dt + 1e-9));
  PhiloxRng rng(seed);
  DrivingFunction out;
  out.t.reserve(steps + 1);
  out.w.reserve(steps + 1);
  out.t.push_back(0.0);
  out.w.push_back(0.0);
  double sd = std::sqrt(kappa * dt);
  for (size_t k = 1; k <= steps; ++k) {
    out.t.push_back(static_cast<double>(k) * dt);
    out.w.push_back(out.w.back() + sd * rng.gaussian());
  }
  return out;
}

ResampledCurve resample_polyline(const std::vector<cplx>& curve, double max_spacing) {
  if (!(max_spacing > 0.0)) throw std::invalid_argument("spacing must be positive");
  ResampledCurve out;
  if (curve.empty()) return out;
  out.points.push_back(curve.front());
  out.index_of_original.push_back(0);
  for (size_t i = 1; i < curve.size(); ++i) {
    cplx a = curve[i - 1], b = curve[i];
    double len = std::abs(b - a);
    int pieces = std::max(1, static_cast<int>(std::ceil(len / max_spacing - 1e-12)));
    for (int p = 1; p < pieces; ++p)
      out.points.push_back(a + (b - a) * (static_cast<double>(p) / pieces));
    out.points.push_back(b);
    out.index_of_original.push_back(static_cast<int>(out.points.size()) - 1);
  }
  return out;
}

std::string driving_csv_string(const DrivingFunction& d) {
  std::ostringstream os;
  os << "t,W\n";
  char buf[96];
  for (size_t i = 0; i < d.t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", d.t[i], d.w[i]);
    os << buf;
  }
  return os.str();
}

void write_driving_csv(const DrivingFunction& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << driving_csv_string(d);
}

std::string trace_csv_string(const TraceCurve& c) {
  std::ostringstream os;
  os << "t,x,y\n";
  char buf[128];
  for (size_t i = 0; i < c.t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", c.t[i], c.z[i].real(),
                  c.z[i].imag());
    os << buf;
  }
  return os.str();
}

void write_trace_csv(const TraceCurve& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << trace_csv_string(c);
}

}  // namespace harmex::loewner
