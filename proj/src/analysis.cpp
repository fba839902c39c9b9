#include "harmex/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace harmex {
namespace analysis {

namespace {

double cubic(double b) {
  return ((8.0 * b - 14.0) * b - 6.0) * b + 11.0;
}

double point_segment_distance(cplx p, cplx a, cplx b) {
  cplx ab = b - a;
  double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double s = ((p.real() - a.real()) * ab.real() + (p.imag() - a.imag()) * ab.imag()) / len2;
  s = std::clamp(s, 0.0, 1.0);
  return std::abs(p - (a + s * ab));
}

double boundary_distance(const lattice::GridDomain& dom, cplx p) {
  double best = std::numeric_limits<double>::infinity();
  for (const lattice::DirectedEdge& e : dom.boundary)
    best = std::min(best, point_segment_distance(p, dom.pos(e.tail), dom.pos(e.head)));
  return best;
}

double cross3(cplx o, cplx a, cplx b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) -
         (a.imag() - o.imag()) * (b.real() - o.real());
}

double hull_diameter(std::vector<cplx> pts) {
  std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  size_t n = pts.size();
  if (n < 2) return 0.0;
  std::vector<cplx> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross3(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross3(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k > 1 ? k - 1 : k);
  double best = 0.0;
  for (size_t i = 0; i < hull.size(); ++i)
    for (size_t j = i + 1; j < hull.size(); ++j)
      best = std::max(best, std::abs(hull[i] - hull[j]));
  return best;
}

double normal_cdf(double x, double sigma) {
  return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0)));
}

// Inverse standard normal CDF: Acklam's rational approximation with one
// Halley refinement against erfc, accurate to full double precision.
double inv_normal_cdf(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("quantile argument must lie in (0, 1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace

RateFunctions exponent_functions(double beta, double r) {
  const double lo = std::sqrt(3.0) / 2.0;
  if (!(beta > lo) || !(beta < 1.0))
    throw std::domain_error("beta must lie in (sqrt(3)/2, 1)");
  if (!(r > 0.0) || !(r < 1.0))
    throw std::domain_error("r must lie in (0, 1)");
  RateFunctions out;
  out.chi = 1.5 * beta + 0.5 + beta * beta / (2.0 * (1.0 + beta));
  out.q = std::min(17.0 * beta / 8.0, out.chi - 2.0);
  out.nu = std::min({r * (1.0 - beta), out.chi - 2.0, 0.5 * (1.0 - r)});
  return out;
}

ExponentTable optimize_exponents() {
  double lo = std::sqrt(3.0) / 2.0, hi = 1.0;
  // cubic is positive at sqrt(3)/2 and negative at 1; bisect the sign change
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    double mid = 0.5 * (lo + hi);
    (cubic(mid) > 0.0 ? lo : hi) = mid;
  }
  ExponentTable t;
  t.beta_star = 0.5 * (lo + hi);
  t.r_star = 1.0 / (3.0 - 2.0 * t.beta_star);
  t.nu_star = exponent_functions(t.beta_star, t.r_star).nu;
  t.m_star = t.nu_star / (2.0 - t.beta_star);
  t.cubic_residual = std::abs(cubic(t.beta_star));
  return t;
}

std::string ExponentTable::to_json() const {
  nlohmann::json j;
  j["beta_star"] = beta_star;
  j["r_star"] = r_star;
  j["nu_star"] = nu_star;
  j["m_star"] = m_star;
  j["cubic_residual"] = cubic_residual;
  return j.dump();
}

double observable_error(const lattice::GridDomain& dom,
                        const explorer::ExplorerState& state,
                        const conformal::HalfPlaneMap& map,
                        const loewner::DrivingFunction& drv,
                        const std::vector<int>& test_vertices) {
  if (state.dom != &dom)
    throw std::invalid_argument("state does not belong to the given domain");
  if (drv.w.empty()) throw std::invalid_argument("driving function is empty");
  if (test_vertices.empty())
    throw std::invalid_argument("no test vertices given");
  const double depth = 0.1 * dom.diameter();
  // interior colored vertices stand in for the traced slit (they track the
  // curve within one lattice spacing)
  std::vector<cplx> slit;
  for (int u = 0; u < dom.vertex_count(); ++u)
    if (state.color[u] >= 0 && !dom.is_boundary[u]) slit.push_back(dom.pos(u));
  double worst = 0.0;
  for (int v : test_vertices) {
    if (v < 0 || v >= dom.vertex_count())
      throw std::invalid_argument("test vertex id out of range");
    cplx p = dom.pos(v);
    if (boundary_distance(dom, p) < depth)
      throw std::invalid_argument("test vertex too close to the boundary");
    for (cplx s : slit)
      if (std::abs(p - s) < depth)
        throw std::invalid_argument("test vertex too close to the traced curve");
    cplx w = map.forward(p);
    for (size_t k = 1; k < drv.t.size(); ++k)
      w = loewner::slit_map(w, {drv.w[k], drv.t[k] - drv.t[k - 1]});
    cplx z = w - drv.w.back();
    double angle_value = 1.0 - std::arg(z) / M_PI;
    worst = std::max(worst, std::abs(state.field.value(v) - angle_value));
  }
  return worst;
}

MomentStats driving_moment_stats(
    const std::vector<loewner::DrivingFunction>& samples, double eps,
    double n_time) {
  if (samples.empty()) throw std::invalid_argument("empty sample set");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const double thr = std::cbrt(eps);
  MomentStats st;
  std::vector<double> incs, defects;
  for (const loewner::DrivingFunction& d : samples) {
    if (d.t.empty() || d.t.back() < n_time)
      throw std::invalid_argument("sample does not reach the requested capacity");
    size_t n = 0;
    while (d.t[n] < n_time) ++n;
    size_t m = n;
    bool hit = false;
    for (size_t k = n + 1; k < d.t.size(); ++k) {
      double dt = d.t[k] - d.t[n];
      double dw = d.w[k] - d.w[n];
      if (dt >= thr || dw * dw >= thr) {
        m = k;
        hit = true;
        break;
      }
    }
    if (!hit) {
      m = d.t.size() - 1;
      ++st.flagged;
    }
    double inc = d.w[m] - d.w[n];
    incs.push_back(inc);
    defects.push_back(inc * inc - 4.0 * (d.t[m] - d.t[n]));
    st.stop_n.push_back(static_cast<int>(n));
    st.stop_m.push_back(static_cast<int>(m));
  }
  st.n_samples = static_cast<int>(samples.size());
  auto mean_of = [](const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / xs.size();
  };
  auto sd_of = [](const std::vector<double>& xs, double mu) {
    if (xs.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : xs) s += (x - mu) * (x - mu);
    return std::sqrt(s / (xs.size() - 1));
  };
  st.mean_inc = mean_of(incs);
  st.var_defect = mean_of(defects);
  st.sd_inc = sd_of(incs, st.mean_inc);
  st.sd_defect = sd_of(defects, st.var_defect);
  return st;
}

std::vector<MarginalRow> marginal_distance(
    const std::vector<loewner::DrivingFunction>& samples,
    const std::vector<double>& t_grid) {
  if (samples.size() < 30)
    throw std::invalid_argument("need at least 30 samples");
  if (t_grid.empty()) throw std::invalid_argument("empty capacity grid");
  for (double t : t_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("grid times must be positive");
    for (const loewner::DrivingFunction& d : samples)
      if (d.t.empty() || d.t.back() < t)
        throw std::invalid_argument("sample does not reach the requested capacity");
  }
  std::vector<MarginalRow> rows;
  const int n = static_cast<int>(samples.size());
  for (double t : t_grid) {
    MarginalRow row;
    row.t = t;
    row.n_samples = n;
    std::vector<double> xs;
    xs.reserve(n);
    for (const loewner::DrivingFunction& d : samples) xs.push_back(d.at(t));
    double mu = 0.0;
    for (double x : xs) mu += x;
    mu /= n;
    double s2 = 0.0;
    for (double x : xs) s2 += (x - mu) * (x - mu);
    row.mean = mu;
    row.variance = n > 1 ? s2 / (n - 1) : 0.0;
    std::sort(xs.begin(), xs.end());
    const double sigma = 2.0 * std::sqrt(t);
    double d_stat = 0.0;
    for (int i = 0; i < n; ++i) {
      double f = normal_cdf(xs[i], sigma);
      d_stat = std::max(d_stat, std::max((i + 1.0) / n - f, f - double(i) / n));
    }
    row.ks_stat = d_stat;
    rows.push_back(row);
  }
  return rows;
}

double ks_critical(double alpha, int n) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1)");
  if (n < 1) throw std::invalid_argument("sample count must be positive");
  return std::sqrt(-std::log(alpha / 2.0) / 2.0) / std::sqrt(double(n));
}

PowerLawFit fit_power_law(
    const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw std::invalid_argument("need at least 3 points");
  std::vector<double> xs, ys;
  for (auto [eps, err] : pairs) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (!(err > 0.0)) throw std::invalid_argument("errors must be positive");
    xs.push_back(std::log(eps));
    ys.push_back(std::log(err));
  }
  {
    std::vector<double> ux(xs);
    std::sort(ux.begin(), ux.end());
    ux.erase(std::unique(ux.begin(), ux.end()), ux.end());
    if (ux.size() < 3)
      throw std::invalid_argument("need at least 3 distinct eps values");
  }
  const size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.log_amplitude = my - fit.exponent * mx;
  double ssr = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double resid = ys[i] - (fit.log_amplitude + fit.exponent * xs[i]);
    ssr += resid * resid;
  }
  fit.stderr_exponent =
      n > 2 ? std::sqrt(std::max(0.0, ssr / double(n - 2)) / sxx) : 0.0;
  return fit;
}

double modulus_exceedance(const std::vector<explorer::ExplorerPath>& samples,
                          double delta, double r) {
  if (samples.empty()) throw std::invalid_argument("empty sample set");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (!(r > 0.0)) throw std::invalid_argument("r must be positive");
  const double threshold = std::pow(delta, r);
  int exceed = 0;
  for (const explorer::ExplorerPath& p : samples) {
    if (!(delta > 2.0 * p.eps))
      throw std::invalid_argument(
          "delta must exceed twice the lattice spacing");
    if (p.points.size() < 2) continue;
    const cplx target = p.points.back();
    const double sigma = 0.1 * hull_diameter(p.points);
    size_t stop = p.points.size() - 1;
    for (size_t i = 0; i < p.points.size(); ++i)
      if (std::abs(p.points[i] - target) <= sigma) {
        stop = i;
        break;
      }
    std::vector<cplx> trunc(p.points.begin(), p.points.begin() + stop + 1);
    std::vector<double> times(trunc.size());
    for (size_t i = 0; i < times.size(); ++i) times[i] = double(i);
    double eta =
        conformal::tip_structure_modulus(times, trunc, delta,
                                         conformal::Metric::kEuclidean, target)
            .eta;
    if (eta > threshold) ++exceed;
  }
  return double(exceed) / double(samples.size());
}

double gaussianized_trace_distance(const loewner::DrivingFunction& drv,
                                   double T, int blocks, int eval_points) {
  if (!(T > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (blocks < 2) throw std::invalid_argument("need at least 2 blocks");
  if (eval_points < 0 || eval_points > blocks)
    throw std::invalid_argument("eval points must lie in [0, blocks]");
  if (drv.t.empty() || drv.t.back() < T)
    throw std::invalid_argument("sample does not reach the requested capacity");
  const double dt = T / blocks;
  const double scale = 2.0 * std::sqrt(dt);
  loewner::DrivingFunction coarse;
  coarse.t.resize(blocks + 1);
  coarse.w.resize(blocks + 1);
  for (int j = 0; j <= blocks; ++j) {
    coarse.t[j] = dt * j;
    coarse.w[j] = drv.at(dt * j);
  }
  std::vector<int> order(blocks);
  for (int j = 0; j < blocks; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return (coarse.w[i + 1] - coarse.w[i]) < (coarse.w[j + 1] - coarse.w[j]);
  });
  // quantile scores recentred to the sample mean: the quantile set sums to
  // zero by symmetry, so without the shift the skeleton would be pinned to
  // W(0) at time T and the distance would saturate at |W(T) - W(0)|
  double mean_u = (coarse.w[blocks] - coarse.w[0]) / (blocks * scale);
  loewner::DrivingFunction skel;
  skel.t = coarse.t;
  skel.w.assign(blocks + 1, coarse.w[0]);
  std::vector<double> score(blocks);
  for (int i = 0; i < blocks; ++i)
    score[order[i]] = inv_normal_cdf((i + 0.5) / blocks) + mean_u;
  for (int j = 0; j < blocks; ++j)
    skel.w[j + 1] = skel.w[j] + scale * score[j];
  loewner::TraceCurve tw = loewner::solve_trace(coarse);
  loewner::TraceCurve tb = loewner::solve_trace(skel);
  double worst = 0.0;
  if (eval_points == 0) {
    for (size_t j = 0; j < tw.z.size(); ++j)
      worst = std::max(worst, std::abs(tw.z[j] - tb.z[j]));
  } else {
    for (int i = 1; i <= eval_points; ++i) {
      size_t j = static_cast<size_t>(
          std::lround(double(i) * blocks / eval_points));
      worst = std::max(worst, std::abs(tw.z[j] - tb.z[j]));
    }
  }
  return worst;
}

}  // namespace analysis
}  // namespace harmex
