#include "harmex/explorer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "harmex/rng.hpp"

namespace harmex::explorer {

namespace {

int third_vertex(const lattice::Triangle& t, int a, int b) {
  if (t.a != a && t.a != b) return t.a;
  if (t.b != a && t.b != b) return t.b;
  return t.c;
}

// Triangle incident to edge {a,b} other than prev (-1 if absent).
int tri_across(const GridDomain& dom, int a, int b, int prev) {
  auto it = dom.edge_tris.find(std::minmax(a, b));
  if (it == dom.edge_tris.end()) return -1;
  const auto& ts = it->second;
  if (ts[0] != prev && ts[0] != -1) return ts[0];
  return ts[1] != prev ? ts[1] : -1;
}

bool is_end_edge(const GridDomain& dom, int a, int b) {
  const auto& e = dom.boundary[dom.ee];
  return (e.tail == a && e.head == b) || (e.tail == b && e.head == a);
}

// The triangle the path is about to cross and its apex.
struct Crossing {
  int tri = -1, apex = -1;
  cplx center;
};

Crossing locate_crossing(const GridDomain& dom, int left, int right, int prev_tri) {
  Crossing c;
  c.tri = tri_across(dom, left, right, prev_tri);
  if (c.tri < 0) throw std::logic_error("no triangle across the current edge");
  const auto& t = dom.tris[c.tri];
  c.apex = third_vertex(t, left, right);
  c.center = (dom.pos(t.a) + dom.pos(t.b) + dom.pos(t.c)) / 3.0;
  return c;
}

// Advances the directed edge past the crossing; returns the new midpoint.
// A left turn crosses edge (apex, old left), so the apex lands on the right;
// a right turn crosses (old right, apex) and the apex lands on the left.
template <typename State>
cplx advance_edge(State& s, const Crossing& c, bool left_turn) {
  if (left_turn) {
    s.edge_right = c.apex;
  } else {
    s.edge_left = c.apex;
  }
  s.prev_tri = c.tri;
  return (s.dom->pos(s.edge_left) + s.dom->pos(s.edge_right)) / 2.0;
}

void check_marks(const GridDomain& dom) {
  if (dom.e0 == dom.ee)
    throw std::invalid_argument("start and end edges coincide");
}

}  // namespace

ExplorerState initial_state(const GridDomain& dom, double tol) {
  check_marks(dom);
  ExplorerState s{.dom = &dom,
                  .n = 0,
                  .v_hat = dom.v0_hat(),
                  .v_hat_prev = dom.v0_hat(),
                  .edge_left = dom.boundary[dom.e0].tail,
                  .edge_right = dom.boundary[dom.e0].head,
                  .prev_tri = -1,
                  .color = std::vector<int8_t>(dom.vertex_count(), int8_t{-1}),
                  .field = Workspace(dom, harmonic::arc_indicator_data(dom), tol),
                  .log = {},
                  .terminated = false};
  for (int v : dom.arc_plus) s.color[v] = 1;
  for (int v : dom.arc_minus) s.color[v] = 0;
  s.field.relax_all();
  return s;
}

void step_inplace(ExplorerState& s, double Z) {
  if (s.terminated) throw AlreadyTerminated("path already reached its end edge");
  const GridDomain& dom = *s.dom;
  Crossing c = locate_crossing(dom, s.edge_left, s.edge_right, s.prev_tri);
  double p = s.field.value(c.apex);
  bool left = (Z <= p);
  int8_t col = left ? int8_t{1} : int8_t{0};
  if (s.color[c.apex] < 0) {
    s.color[c.apex] = col;
    s.field.set_dirichlet(c.apex, static_cast<double>(col));
    s.field.relax_after(c.apex);
  }
  // an already-colored apex forces the turn; the vertex set is unchanged
  s.v_hat_prev = c.center;
  s.v_hat = advance_edge(s, c, left);
  s.log.push_back({Z, left});
  ++s.n;
  if (is_end_edge(dom, s.edge_left, s.edge_right)) s.terminated = true;
}

ExplorerState step(const ExplorerState& s, double Z) {
  ExplorerState next = s;
  step_inplace(next, Z);
  return next;
}

ExplorerPath sample_path(const GridDomain& dom, uint64_t seed, double tol) {
  ExplorerState s = initial_state(dom, tol);
  PhiloxRng rng(seed);
  ExplorerPath out;
  out.eps = dom.eps;
  out.seed = seed;
  out.points.push_back(dom.v0_hat());
  out.kinds.push_back(0);
  const long budget = 10L * dom.triangle_count();
  while (!s.terminated) {
    if (s.n >= budget)
      throw StepBudgetExceeded("step count exceeded 10x the triangle count");
    Crossing c = locate_crossing(dom, s.edge_left, s.edge_right, s.prev_tri);
    step_inplace(s, rng.uniform01());
    const TurnRecord& rec = s.log.back();
    out.absorbed.push_back(c.apex);
    out.absorbed_color.push_back(rec.left ? int8_t{1} : int8_t{0});
    out.log.push_back(rec);
    out.points.push_back(s.v_hat_prev);  // triangle center
    out.kinds.push_back(1);
    out.points.push_back(s.v_hat);
    out.kinds.push_back(0);
    ++out.steps;
  }
  return out;
}

ExplorerPath sample_path_walk(const GridDomain& dom, uint64_t seed) {
  check_marks(dom);
  PhiloxRng rng(seed);
  std::vector<int8_t> color(dom.vertex_count(), int8_t{-1});
  for (int v : dom.arc_plus) color[v] = 1;
  for (int v : dom.arc_minus) color[v] = 0;

  struct Geom {
    const GridDomain* dom;
    int edge_left, edge_right, prev_tri;
  } g{&dom, dom.boundary[dom.e0].tail, dom.boundary[dom.e0].head, -1};

  ExplorerPath out;
  out.eps = dom.eps;
  out.seed = seed;
  out.points.push_back(dom.v0_hat());
  out.kinds.push_back(0);
  const long budget = 10L * dom.triangle_count();
  for (;;) {
    if (out.steps >= budget)
      throw StepBudgetExceeded("step count exceeded 10x the triangle count");
    Crossing c = locate_crossing(dom, g.edge_left, g.edge_right, g.prev_tri);
    TurnRecord rec{-1.0, false};
    if (color[c.apex] >= 0) {
      rec.left = (color[c.apex] == 1);
    } else {
      int cur = c.apex;
      while (color[cur] < 0) cur = dom.adj[cur][rng.uniform_int(6)];
      rec.left = (color[cur] == 1);
      color[c.apex] = rec.left ? int8_t{1} : int8_t{0};
    }
    out.absorbed.push_back(c.apex);
    out.absorbed_color.push_back(rec.left ? int8_t{1} : int8_t{0});
    out.log.push_back(rec);
    out.points.push_back(c.center);
    out.kinds.push_back(1);
    out.points.push_back(advance_edge(g, c, rec.left));
    out.kinds.push_back(0);
    ++out.steps;
    if (is_end_edge(dom, g.edge_left, g.edge_right)) break;
  }
  return out;
}

ExplorerState replay_prefix(const GridDomain& dom, const ExplorerPath& path,
                            int steps, double tol) {
  check_marks(dom);
  if (steps < 0 || steps > path.steps)
    throw std::invalid_argument("replay length outside the recorded path");
  if (static_cast<size_t>(path.steps) != path.absorbed.size() ||
      path.absorbed_color.size() != path.absorbed.size() ||
      path.log.size() != path.absorbed.size() ||
      path.points.size() != 2 * path.absorbed.size() + 1)
    throw std::invalid_argument("path records are inconsistent");

  std::vector<int8_t> color(dom.vertex_count(), int8_t{-1});
  for (int v : dom.arc_plus) color[v] = 1;
  for (int v : dom.arc_minus) color[v] = 0;

  struct Geom {
    const GridDomain* dom;
    int edge_left, edge_right, prev_tri;
  } g{&dom, dom.boundary[dom.e0].tail, dom.boundary[dom.e0].head, -1};

  cplx v_hat = dom.v0_hat();
  cplx v_hat_prev = v_hat;
  for (int i = 0; i < steps; ++i) {
    Crossing c = locate_crossing(dom, g.edge_left, g.edge_right, g.prev_tri);
    if (c.apex != path.absorbed[i])
      throw std::logic_error("replayed geometry diverges from the recorded path");
    color[c.apex] = path.absorbed_color[i];
    v_hat_prev = c.center;
    v_hat = advance_edge(g, c, path.absorbed_color[i] == 1);
  }
  if (std::abs(v_hat - path.points[2 * static_cast<size_t>(steps)]) > 1e-12)
    throw std::logic_error("replayed geometry diverges from the recorded path");

  harmonic::BoundaryData bd = harmonic::arc_indicator_data(dom);
  for (int v = 0; v < dom.vertex_count(); ++v)
    if (color[v] >= 0) bd.values[v] = static_cast<double>(color[v]);

  ExplorerState s{.dom = &dom,
                  .n = steps,
                  .v_hat = v_hat,
                  .v_hat_prev = v_hat_prev,
                  .edge_left = g.edge_left,
                  .edge_right = g.edge_right,
                  .prev_tri = g.prev_tri,
                  .color = std::move(color),
                  .field = Workspace(dom, bd, tol),
                  .log = {path.log.begin(), path.log.begin() + steps},
                  .terminated = is_end_edge(dom, g.edge_left, g.edge_right)};
  s.field.relax_all();
  return s;
}

std::pair<double, double> martingale_audit(const ExplorerState& s, Coord v) {
  const GridDomain& dom = *s.dom;
  auto it = dom.vert_id.find(v);
  if (it == dom.vert_id.end()) throw std::invalid_argument("vertex not in domain");
  int vid = it->second;
  Crossing c = locate_crossing(dom, s.edge_left, s.edge_right, s.prev_tri);
  if (vid == c.apex || s.color[vid] >= 0)
    throw std::invalid_argument("audit vertex must stay free in both children");
  double p = s.field.value(c.apex);
  harmonic::BoundaryData bd;
  for (int i = 0; i < dom.vertex_count(); ++i)
    if (s.color[i] >= 0) bd.values[i] = static_cast<double>(s.color[i]);
  auto child = [&](double apex_value) {
    harmonic::BoundaryData cb = bd;
    cb.values[c.apex] = apex_value;
    return harmonic::solve_dirichlet(dom, cb, s.field.tol()).at(vid);
  };
  double lhs = p * child(1.0) + (1.0 - p) * child(0.0);
  return {lhs, s.field.value(vid)};
}

std::string path_csv_string(const ExplorerPath& p) {
  std::ostringstream os;
  char buf[128];
  std::snprintf(buf, sizeof buf, "# eps=%.17g seed=%llu N=%d\n", p.eps,
                static_cast<unsigned long long>(p.seed), p.steps);
  os << buf << "index,x,y,kind\n";
  for (size_t i = 0; i < p.points.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%s\n", i, p.points[i].real(),
                  p.points[i].imag(), p.kinds[i] ? "center" : "midpoint");
    os << buf;
  }
  return os.str();
}

void write_path_csv(const ExplorerPath& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << path_csv_string(p);
}

}  // namespace harmex::explorer
