#include "harmex/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "harmex/rng.hpp"
#include "harmex/svg.hpp"

namespace harmex::experiment {
namespace {

using nlohmann::json;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// Runs fn(0..n-1) on a shared-counter worker pool.  Workers only fill
// preallocated slots, so the caller's later reduction in index order is
// identical for every thread count.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int i; (i = next.fetch_add(1)) < n;) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (std::thread& t : pool) t.join();
  for (std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

double point_segment_distance(cplx p, cplx a, cplx b) {
  cplx ab = b - a;
  double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double s = ((p.real() - a.real()) * ab.real() +
              (p.imag() - a.imag()) * ab.imag()) /
             len2;
  s = std::clamp(s, 0.0, 1.0);
  return std::abs(p - (a + s * ab));
}

double boundary_distance(const lattice::GridDomain& dom, cplx p) {
  double best = std::numeric_limits<double>::infinity();
  for (const lattice::DirectedEdge& e : dom.boundary)
    best = std::min(best, point_segment_distance(p, dom.pos(e.tail), dom.pos(e.head)));
  return best;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

conformal::HalfPlaneMap make_map(const ExperimentConfig& cfg,
                                 const lattice::JordanPolygon& poly,
                                 const lattice::GridDomain& dom) {
  if (cfg.map == "welded") return conformal::map_to_halfplane(dom);
  double R = 0.0;
  if (!conformal::canonical_halfdisk(poly, &R))
    throw ConfigError(
        "map=closed needs the canonical half-disk (marks at (R,0) and (-R,0), "
        "vertices on the arc or the diameter); use map=welded for general "
        "domains");
  return conformal::halfdisk_closed_form(R);
}

struct SampleOut {
  explorer::ExplorerPath path;
  loewner::DrivingFunction drv;
};

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    if (j.contains("schema") &&
        j.at("schema").get<std::string>() != "explorer-experiment/1")
      throw ConfigError("unknown config schema '" +
                        j.at("schema").get<std::string>() + "'");
    cfg.domain_file = j.at("domain").get<std::string>();
    cfg.map = j.value("map", cfg.map);
    cfg.eps_list = j.at("eps_list").get<std::vector<double>>();
    cfg.samples = j.at("samples").get<int>();
    cfg.capacity_T = j.at("capacity_T").get<double>();
    cfg.t_grid = j.at("t_grid").get<std::vector<double>>();
    cfg.moment_time = j.value("moment_time", cfg.moment_time);
    cfg.observe_time = j.value("observe_time", cfg.observe_time);
    cfg.observable_samples = j.value("observable_samples", cfg.observable_samples);
    cfg.modulus_samples = j.value("modulus_samples", cfg.modulus_samples);
    cfg.trace_samples = j.value("trace_samples", cfg.trace_samples);
    cfg.delta_list = j.value("delta_list", cfg.delta_list);
    cfg.modulus_r = j.value("modulus_r", cfg.modulus_r);
    cfg.seed = j.at("seed").get<uint64_t>();
    cfg.tol = j.value("tol", cfg.tol);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad config field: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json(text);
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["schema"] = "explorer-experiment/1";
  j["domain"] = domain_file;
  j["map"] = map;
  j["eps_list"] = eps_list;
  j["samples"] = samples;
  j["capacity_T"] = capacity_T;
  j["t_grid"] = t_grid;
  j["moment_time"] = moment_time;
  j["observe_time"] = observe_time;
  j["observable_samples"] = observable_samples;
  j["modulus_samples"] = modulus_samples;
  j["trace_samples"] = trace_samples;
  j["delta_list"] = delta_list;
  j["modulus_r"] = modulus_r;
  j["seed"] = seed;
  j["tol"] = tol;
  j["out_dir"] = out_dir;
  return j.dump(2) + "\n";
}

void ExperimentConfig::validate() const {
  if (domain_file.empty()) throw ConfigError("domain file path is empty");
  if (map != "closed" && map != "welded")
    throw ConfigError("map must be 'closed' or 'welded', got '" + map + "'");
  if (eps_list.empty()) throw ConfigError("eps_list is empty");
  for (double e : eps_list)
    if (!(e > 0.0)) throw ConfigError("eps_list entries must be positive");
  for (size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw ConfigError("eps_list must be strictly decreasing");
  if (samples < 30)
    throw ConfigError("samples must be at least 30, got " +
                      std::to_string(samples));
  if (!(capacity_T > 0.0)) throw ConfigError("capacity_T must be positive");
  if (t_grid.empty()) throw ConfigError("t_grid is empty");
  for (double t : t_grid)
    if (!(t > 0.0 && t <= capacity_T))
      throw ConfigError("t_grid entries must lie in (0, capacity_T]");
  for (size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw ConfigError("t_grid must be strictly increasing");
  if (!(moment_time > 0.0 && moment_time < capacity_T))
    throw ConfigError("moment_time must lie in (0, capacity_T)");
  if (!(observe_time > 0.0 && observe_time <= capacity_T))
    throw ConfigError("observe_time must lie in (0, capacity_T]");
  if (observable_samples < 0 || modulus_samples < 0 || trace_samples < 0)
    throw ConfigError("per-statistic sample counts must be >= 0");
  for (size_t i = 0; i < delta_list.size(); ++i) {
    if (!(delta_list[i] > 0.0))
      throw ConfigError("delta_list entries must be positive");
    if (i > 0 && !(delta_list[i] > delta_list[i - 1]))
      throw ConfigError("delta_list must be strictly increasing");
  }
  if (!(modulus_r > 0.0 && modulus_r < 1.0))
    throw ConfigError("modulus_r must lie in (0, 1)");
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (out_dir.empty()) throw ConfigError("out_dir is empty");
}

bool ConvergenceReport::all_pass() const {
  for (const CriterionResult& c : criteria)
    if (c.evaluated && !c.pass) return false;
  return true;
}

ConvergenceReport run_experiment(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  if (threads < 1) threads = 1;
  threads = std::min(threads, 64);

  lattice::JordanPolygon poly;
  try {
    poly = lattice::JordanPolygon::from_json_file(cfg.domain_file);
  } catch (const std::exception& e) {
    throw ConfigError("cannot load domain '" + cfg.domain_file +
                      "': " + e.what());
  }

  ConvergenceReport rep;
  rep.config = cfg;

  for (size_t ei = 0; ei < cfg.eps_list.size(); ++ei) {
    const double eps = cfg.eps_list[ei];
    const lattice::GridDomain dom = lattice::build_domain_approximation(poly, eps);
    const conformal::HalfPlaneMap map = make_map(cfg, poly, dom);
    const double depth = 0.1 * dom.diameter();

    // Interior vertices far enough from the boundary to ever qualify as
    // field-error probes; per-sample curve filtering happens later.
    std::vector<int> deep;
    for (int v = 0; v < dom.vertex_count(); ++v)
      if (!dom.is_boundary[v] && boundary_distance(dom, dom.pos(v)) >= depth)
        deep.push_back(v);

    const int n = cfg.samples;
    std::vector<SampleOut> out(n);
    parallel_for(n, threads, [&](int s) {
      const uint64_t seed =
          stream_seed(cfg.seed, (uint64_t(ei) << 32) | uint64_t(s));
      SampleOut& o = out[s];
      o.path = explorer::sample_path_walk(dom, seed);
      // The end mark maps to infinity, so the final point is dropped; the
      // start point is snapped onto the real axis (the grid mark sits within
      // one mesh of it).
      std::vector<cplx> img(o.path.points.begin(), o.path.points.end() - 1);
      img = conformal::map_curve(map, img);
      img[0] = cplx(img[0].real(), 0.0);
      o.drv = loewner::extract_driving(img, cfg.capacity_T);
      if (o.drv.t.back() < cfg.capacity_T)
        throw std::runtime_error(
            "sample " + std::to_string(s) + " at eps " + fmt("%.4g", eps) +
            " only reached capacity " + fmt("%.4g", o.drv.t.back()) +
            " < capacity_T; lower capacity_T or enlarge the domain");
    });

    EpsBlock blk;
    blk.eps = eps;
    blk.samples = n;

    std::vector<loewner::DrivingFunction> drvs(n);
    double step_sum = 0.0;
    for (int s = 0; s < n; ++s) {
      drvs[s] = out[s].drv;
      step_sum += out[s].path.steps;
    }
    blk.mean_steps = step_sum / n;

    blk.marginals = analysis::marginal_distance(drvs, cfg.t_grid);
    blk.moments = analysis::driving_moment_stats(drvs, eps, cfg.moment_time);

    // Field-error statistic: replay each retained sample to the first step
    // past observe_time and compare the discrete field against the mapped
    // half-plane observable on curve- and boundary-distant vertices.
    const int n_obs =
        cfg.observable_samples == 0 ? n : std::min(cfg.observable_samples, n);
    std::vector<double> errs(n_obs, -1.0);
    parallel_for(n_obs, threads, [&](int s) {
      const explorer::ExplorerPath& path = out[s].path;
      const loewner::DrivingFunction& drv = out[s].drv;
      const int cells = int(drv.t.size()) - 1;
      int j = 0;
      while (2 * j < cells && drv.t[2 * j] < cfg.observe_time) ++j;
      if (2 * j > path.steps * 2 || drv.t[2 * j] < cfg.observe_time) return;
      explorer::ExplorerState st =
          explorer::replay_prefix(dom, path, j, cfg.tol);
      std::vector<int> verts;
      for (int v : deep) {
        cplx p = dom.pos(v);
        bool clear = true;
        for (int u = 0; u < dom.vertex_count() && clear; ++u)
          if (st.color[u] >= 0 && !dom.is_boundary[u] &&
              std::abs(p - dom.pos(u)) < depth)
            clear = false;
        if (clear) verts.push_back(v);
      }
      if (verts.empty()) return;
      if (verts.size() > 40) {
        std::vector<int> pick;
        size_t stride = (verts.size() + 39) / 40;
        for (size_t i = 0; i < verts.size(); i += stride) pick.push_back(verts[i]);
        verts.swap(pick);
      }
      loewner::DrivingFunction prefix;
      prefix.t.assign(drv.t.begin(), drv.t.begin() + 2 * j + 1);
      prefix.w.assign(drv.w.begin(), drv.w.begin() + 2 * j + 1);
      errs[s] = analysis::observable_error(dom, st, map, prefix, verts);
    });
    double err_sum = 0.0;
    for (double e : errs)
      if (e >= 0.0) {
        ++blk.observable_count;
        blk.observable_max = std::max(blk.observable_max, e);
        err_sum += e;
      }
    if (blk.observable_count > 0)
      blk.observable_mean = err_sum / blk.observable_count;

    // Trace statistic: coarsening resolution follows the mesh through the
    // median cell count, the comparison grid stays fixed at 16 points.
    {
      std::vector<double> cells(n);
      for (int s = 0; s < n; ++s) cells[s] = double(drvs[s].t.size()) - 1.0;
      const double med = median_of(cells);
      blk.trace_blocks =
          16 * std::max(1, int(std::lround(std::sqrt(med) / 16.0)));
      const int n_tr =
          cfg.trace_samples == 0 ? n : std::min(cfg.trace_samples, n);
      std::vector<double> dist(n_tr);
      parallel_for(n_tr, threads, [&](int s) {
        dist[s] = analysis::gaussianized_trace_distance(
            drvs[s], cfg.capacity_T, blk.trace_blocks, 16);
      });
      blk.trace_count = n_tr;
      double sum = 0.0;
      for (double d : dist) sum += d;
      blk.trace_mean = n_tr > 0 ? sum / n_tr : 0.0;
      blk.trace_median = median_of(dist);
    }

    for (double delta : cfg.delta_list)
      if (delta > 2.0 * eps) blk.qualifying_deltas.push_back(delta);
    if (!blk.qualifying_deltas.empty()) {
      const int n_mod =
          cfg.modulus_samples == 0 ? n : std::min(cfg.modulus_samples, n);
      std::vector<explorer::ExplorerPath> sub;
      sub.reserve(n_mod);
      for (int s = 0; s < n_mod; ++s) sub.push_back(out[s].path);
      for (double delta : blk.qualifying_deltas)
        blk.exceedance.push_back(
            analysis::modulus_exceedance(sub, delta, cfg.modulus_r));
    }

    rep.blocks.push_back(std::move(blk));
  }

  // Power-law fit of the per-mesh max field error.
  {
    std::vector<std::pair<double, double>> pairs;
    for (const EpsBlock& b : rep.blocks)
      if (b.observable_count > 0 && b.observable_max > 0.0)
        pairs.emplace_back(b.eps, b.observable_max);
    if (pairs.size() >= 3) {
      rep.observable_fit = analysis::fit_power_law(pairs);
      rep.have_fit = true;
    }
  }

  // Criteria ------------------------------------------------------------
  const EpsBlock& fine = rep.blocks.back();
  auto add = [&rep](std::string name, bool evaluated, bool pass,
                    std::string detail) {
    rep.criteria.push_back(
        {std::move(name), evaluated, pass, std::move(detail)});
  };

  if (rep.have_fit) {
    bool ok = rep.observable_fit.exponent >= 0.3 &&
              rep.observable_fit.exponent <= 0.7;
    add("observable-slope", true, ok,
        "fitted slope " + fmt("%.4f", rep.observable_fit.exponent) +
            " (stderr " + fmt("%.4f", rep.observable_fit.stderr_exponent) +
            "), amplitude " +
            fmt("%.4g", std::exp(rep.observable_fit.log_amplitude)) +
            ", band [0.3, 0.7]");
  } else {
    add("observable-slope", false, false,
        "needs >= 3 mesh sizes with positive max field error");
  }

  {
    bool ok = true;
    std::string d;
    for (const analysis::MarginalRow& r : fine.marginals) {
      double ratio = r.variance / (4.0 * r.t);
      ok = ok && ratio >= 0.8 && ratio <= 1.2;
      d += (d.empty() ? "" : "; ") + fmt("%.4g", r.t) + ": var/4t " +
           fmt("%.3f", ratio);
    }
    add("variance-band", true, ok, "finest mesh, band [0.8, 1.2] -- " + d);
  }
  {
    bool ok = true;
    std::string d;
    for (const analysis::MarginalRow& r : fine.marginals) {
      double bound = 3.0 * std::sqrt(r.variance / r.n_samples);
      ok = ok && std::abs(r.mean) <= bound;
      d += (d.empty() ? "" : "; ") + fmt("%.4g", r.t) + ": |mean| " +
           fmt("%.4f", std::abs(r.mean)) + " vs " + fmt("%.4f", bound);
    }
    add("mean-band", true, ok, "finest mesh, 3 sigma of the mean -- " + d);
  }
  {
    bool ok = true;
    std::string d;
    for (const analysis::MarginalRow& r : fine.marginals) {
      double crit = analysis::ks_critical(0.01, r.n_samples);
      ok = ok && r.ks_stat < crit;
      d += (d.empty() ? "" : "; ") + fmt("%.4g", r.t) + ": KS " +
           fmt("%.4f", r.ks_stat) + " vs " + fmt("%.4f", crit);
    }
    add("ks-band", true, ok, "finest mesh, 1% critical value -- " + d);
  }
  {
    bool enough = rep.blocks.size() >= 3;
    bool ok = enough;
    std::string d = "KS at t=" + fmt("%.4g", cfg.t_grid.back()) + ":";
    double prev = std::numeric_limits<double>::infinity();
    for (const EpsBlock& b : rep.blocks) {
      double ks = b.marginals.back().ks_stat;
      ok = ok && ks <= prev;
      prev = ks;
      d += " " + fmt("%.4f", ks);
    }
    add("ks-trend", enough, ok,
        enough ? d + " (coarse to fine, non-increasing)"
               : "needs >= 3 mesh sizes");
  }
  {
    double frac = double(fine.moments.flagged) / fine.moments.n_samples;
    add("moment-flagged", true, frac < 0.05,
        "finest mesh: " + std::to_string(fine.moments.flagged) + "/" +
            std::to_string(fine.moments.n_samples) +
            " samples never triggered the stopping rule (" +
            fmt("%.2f", 100.0 * frac) + "%, bound 5%)");
  }
  {
    bool enough = fine.qualifying_deltas.size() >= 2;
    bool ok = enough;
    std::string d = "exceedance:";
    for (size_t i = 0; i < fine.exceedance.size(); ++i) {
      if (i > 0) ok = ok && fine.exceedance[i] <= fine.exceedance[i - 1];
      d += " " + fmt("%.4g", fine.qualifying_deltas[i]) + "->" +
           fmt("%.3f", fine.exceedance[i]);
    }
    add("modulus-monotone", enough, ok,
        enough ? d + " (non-increasing in delta)"
               : "needs >= 2 usable crosscut scales on the finest mesh");
  }
  {
    bool enough = !fine.qualifying_deltas.empty();
    bool ok = enough && fine.exceedance.back() <= 0.3;
    add("modulus-bound", enough, ok,
        enough ? "exceedance " + fmt("%.3f", fine.exceedance.back()) +
                     " at delta " + fmt("%.4g", fine.qualifying_deltas.back()) +
                     ", bound 0.3"
               : "no usable crosscut scale on the finest mesh");
  }
  {
    bool enough = rep.blocks.size() >= 3;
    bool ok = enough;
    std::string d = "mean trace distance:";
    double prev = std::numeric_limits<double>::infinity();
    for (const EpsBlock& b : rep.blocks) {
      ok = ok && b.trace_mean <= prev;
      prev = b.trace_mean;
      d += " " + fmt("%.4f", b.trace_mean);
    }
    add("trace-trend", enough, ok,
        enough ? d + " (coarse to fine, non-increasing)"
               : "needs >= 3 mesh sizes");
  }

  return rep;
}

std::string ConvergenceReport::to_json() const {
  json j;
  j["schema"] = "explorer-convergence/1";
  j["config"] = json::parse(config.to_json());
  j["blocks"] = json::array();
  for (const EpsBlock& b : blocks) {
    json jb;
    jb["eps"] = b.eps;
    jb["samples"] = b.samples;
    jb["mean_steps"] = b.mean_steps;
    jb["marginals"] = json::array();
    for (const analysis::MarginalRow& r : b.marginals)
      jb["marginals"].push_back({{"t", r.t},
                                 {"n", r.n_samples},
                                 {"mean", r.mean},
                                 {"variance", r.variance},
                                 {"ks", r.ks_stat},
                                 {"ks_critical_1pct",
                                  analysis::ks_critical(0.01, r.n_samples)}});
    jb["moments"] = {{"mean_inc", b.moments.mean_inc},
                     {"var_defect", b.moments.var_defect},
                     {"sd_inc", b.moments.sd_inc},
                     {"sd_defect", b.moments.sd_defect},
                     {"n", b.moments.n_samples},
                     {"flagged", b.moments.flagged}};
    jb["observable"] = {{"count", b.observable_count},
                        {"max", b.observable_max},
                        {"mean", b.observable_mean},
                        {"time", config.observe_time}};
    jb["modulus"] = json::array();
    for (size_t i = 0; i < b.qualifying_deltas.size(); ++i)
      jb["modulus"].push_back({{"delta", b.qualifying_deltas[i]},
                               {"exceedance", b.exceedance[i]}});
    jb["trace"] = {{"blocks", b.trace_blocks},
                   {"eval_points", 16},
                   {"count", b.trace_count},
                   {"mean", b.trace_mean},
                   {"median", b.trace_median}};
    j["blocks"].push_back(jb);
  }
  if (have_fit)
    j["observable_fit"] = {{"exponent", observable_fit.exponent},
                           {"stderr", observable_fit.stderr_exponent},
                           {"log_amplitude", observable_fit.log_amplitude}};
  else
    j["observable_fit"] = nullptr;
  j["criteria"] = json::array();
  for (const CriterionResult& c : criteria)
    j["criteria"].push_back({{"name", c.name},
                             {"evaluated", c.evaluated},
                             {"pass", c.pass},
                             {"detail", c.detail}});
  j["pass"] = all_pass();
  return j.dump(2) + "\n";
}

std::string ConvergenceReport::summary_csv() const {
  std::string s =
      "eps,samples,mean_steps,observable_max,observable_mean,moment_mean_inc,"
      "moment_var_defect,moment_flagged,trace_mean,trace_median,trace_blocks\n";
  for (const EpsBlock& b : blocks) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%.17g,%d\n",
                  b.eps, b.samples, b.mean_steps, b.observable_max,
                  b.observable_mean, b.moments.mean_inc, b.moments.var_defect,
                  b.moments.flagged, b.trace_mean, b.trace_median,
                  b.trace_blocks);
    s += buf;
  }
  return s;
}

std::string ConvergenceReport::variance_csv() const {
  std::string s = "eps,t,n_samples,mean,variance,ks_stat,ks_critical_1pct\n";
  for (const EpsBlock& b : blocks)
    for (const analysis::MarginalRow& r : b.marginals) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g\n",
                    b.eps, r.t, r.n_samples, r.mean, r.variance, r.ks_stat,
                    analysis::ks_critical(0.01, r.n_samples));
      s += buf;
    }
  return s;
}

std::string ConvergenceReport::modulus_csv() const {
  std::string s = "eps,delta,exceedance\n";
  for (const EpsBlock& b : blocks)
    for (size_t i = 0; i < b.qualifying_deltas.size(); ++i) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", b.eps,
                    b.qualifying_deltas[i], b.exceedance[i]);
      s += buf;
    }
  return s;
}

void ConvergenceReport::write(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto put = [&dir](const std::string& name, const std::string& text) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + name + " in " + dir);
    out << text;
  };
  put("report.json", to_json());
  put("summary.csv", summary_csv());
  put("variance_profile.csv", variance_csv());
  put("modulus.csv", modulus_csv());

  {
    std::vector<svg::Series> series;
    for (const EpsBlock& b : blocks) {
      svg::Series s;
      s.label = "eps " + fmt("%.4g", b.eps);
      s.markers = true;
      for (const analysis::MarginalRow& r : b.marginals)
        s.pts.emplace_back(r.t, r.variance);
      series.push_back(std::move(s));
    }
    svg::Series ref;
    ref.label = "4t";
    ref.color = "#777777";
    ref.dashed = true;
    for (const analysis::MarginalRow& r : blocks.back().marginals)
      ref.pts.emplace_back(r.t, 4.0 * r.t);
    series.push_back(std::move(ref));
    put("variance_profile.svg",
        svg::line_chart("driving variance by capacity time", "capacity t",
                        "Var W(t)", series));
  }

  {
    std::vector<svg::Series> series;
    svg::Series data;
    data.label = "max field error";
    data.markers = true;
    bool positive = true;
    for (const EpsBlock& b : blocks) {
      if (!(b.eps > 0.0 && b.observable_max > 0.0)) positive = false;
      data.pts.emplace_back(b.eps, b.observable_max);
    }
    series.push_back(std::move(data));
    std::string title = "max field error by mesh size";
    if (have_fit && positive) {
      svg::Series fitline;
      fitline.label = "fit slope " + fmt("%.3f", observable_fit.exponent);
      fitline.dashed = true;
      for (const EpsBlock& b : blocks)
        fitline.pts.emplace_back(
            b.eps, std::exp(observable_fit.log_amplitude +
                            observable_fit.exponent * std::log(b.eps)));
      series.push_back(std::move(fitline));
    }
    put("observable_fit.svg",
        svg::line_chart(title, "mesh eps", "max error", series, positive,
                        positive));
  }
}

}  // namespace harmex::experiment
