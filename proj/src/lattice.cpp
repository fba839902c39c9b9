#include "harmex/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace harmex::lattice {

namespace {
constexpr double kSqrt3Half = 0.8660254037844386;
}

cplx embed(Coord c, double eps) {
  return {eps * (c.m + 0.5 * c.n), eps * (kSqrt3Half * c.n)};
}

std::array<Coord, 6> neighbors(Coord v) {
  std::array<Coord, 6> out;
  for (int i = 0; i < 6; ++i)
    out[i] = {v.m + kNeighborOffsets[i].m, v.n + kNeighborOffsets[i].n};
  return out;
}

double JordanPolygon::boundary_distance(cplx p) const {
  double best = std::numeric_limits<double>::infinity();
  size_t n = vertices.size();
  for (size_t i = 0; i < n; ++i) {
    cplx a = vertices[i], b = vertices[(i + 1) % n];
    cplx ab = b - a, ap = p - a;
    double len2 = std::norm(ab);
    double t = len2 > 0 ? std::clamp((ap.real() * ab.real() + ap.imag() * ab.imag()) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, std::abs(p - (a + t * ab)));
  }
  return best;
}

bool JordanPolygon::contains(cplx p, double slack) const {
  if (boundary_distance(p) <= slack) return true;
  // crossing-number parity
  bool inside = false;
  size_t n = vertices.size();
  for (size_t i = 0; i < n; ++i) {
    cplx a = vertices[i], b = vertices[(i + 1) % n];
    if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
      double x = a.real() + (p.imag() - a.imag()) / (b.imag() - a.imag()) * (b.real() - a.real());
      if (x > p.real()) inside = !inside;
    }
  }
  return inside;
}

JordanPolygon JordanPolygon::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  JordanPolygon poly;
  if (!j.contains("vertices") || !j["vertices"].is_array() || j["vertices"].size() < 3)
    throw std::runtime_error("domain json: \"vertices\" must list at least 3 points");
  for (const auto& v : j["vertices"]) {
    if (!v.is_array() || v.size() != 2)
      throw std::runtime_error("domain json: each vertex must be [x, y]");
    poly.vertices.emplace_back(v[0].get<double>(), v[1].get<double>());
  }
  auto mark = [&j](const char* key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != 2)
      throw std::runtime_error(std::string("domain json: missing mark \"") + key + "\"");
    return cplx(j[key][0].get<double>(), j[key][1].get<double>());
  };
  poly.u0 = mark("u0");
  poly.ue = mark("ue");
  return poly;
}

JordanPolygon JordanPolygon::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open domain file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string JordanPolygon::to_json() const {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : vertices) j["vertices"].push_back({v.real(), v.imag()});
  j["u0"] = {u0.real(), u0.imag()};
  j["ue"] = {ue.real(), ue.imag()};
  return j.dump(2);
}

cplx GridDomain::edge_midpoint(int bidx) const {
  const auto& e = boundary[bidx];
  return 0.5 * (pos(e.tail) + pos(e.head));
}

double GridDomain::diameter() const {
  if (diam_cache > 0) return diam_cache;
  double best = 0;
  std::vector<cplx> pts;
  for (size_t i = 0; i < verts.size(); ++i)
    if (is_boundary[i]) pts.push_back(pos(static_cast<int>(i)));
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      best = std::max(best, std::abs(pts[i] - pts[j]));
  return best;
}

namespace {

// triangle key: (cell m, cell n, 0=up / 1=down)
using TriKey = std::tuple<int, int, int>;

std::array<Coord, 3> tri_coords(const TriKey& k) {
  auto [m, n, t] = k;
  if (t == 0) return {Coord{m, n}, Coord{m + 1, n}, Coord{m, n + 1}};          // up, ccw
  return {Coord{m + 1, n}, Coord{m + 1, n + 1}, Coord{m, n + 1}};             // down, ccw
}

// The wedge triangle at vertex b between neighbor directions i and i+1 (ccw).
TriKey wedge(Coord b, int i) {
  switch (((i % 6) + 6) % 6) {
    case 0: return {b.m, b.n, 0};
    case 1: return {b.m - 1, b.n, 1};
    case 2: return {b.m - 1, b.n, 0};
    case 3: return {b.m - 1, b.n - 1, 1};
    case 4: return {b.m, b.n - 1, 0};
    default: return {b.m, b.n - 1, 1};
  }
}

int offset_index(Coord d) {
  for (int i = 0; i < 6; ++i)
    if (kNeighborOffsets[i].m == d.m && kNeighborOffsets[i].n == d.n) return i;
  return -1;
}

}  // namespace

GridDomain build_domain_approximation(const JordanPolygon& D, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& v : D.vertices) {
    xmin = std::min(xmin, v.real());
    xmax = std::max(xmax, v.real());
    ymin = std::min(ymin, v.imag());
    ymax = std::max(ymax, v.imag());
  }

  std::map<Coord, char> vertex_inside;
  auto vin = [&](Coord c) {
    auto it = vertex_inside.find(c);
    if (it != vertex_inside.end()) return it->second == 1;
    bool in = D.contains(embed(c, eps));
    vertex_inside[c] = in ? 1 : 2;
    return in;
  };

  // enumerate candidate triangles fully inside D (3 vertices + centroid)
  std::vector<TriKey> kept;
  int nlo = static_cast<int>(std::floor(ymin / (eps * kSqrt3Half))) - 2;
  int nhi = static_cast<int>(std::ceil(ymax / (eps * kSqrt3Half))) + 2;
  for (int n = nlo; n <= nhi; ++n) {
    int mlo = static_cast<int>(std::floor(xmin / eps - 0.5 * n)) - 2;
    int mhi = static_cast<int>(std::ceil(xmax / eps - 0.5 * n)) + 2;
    for (int m = mlo; m <= mhi; ++m) {
      for (int t = 0; t < 2; ++t) {
        TriKey key{m, n, t};
        auto cs = tri_coords(key);
        if (!vin(cs[0]) || !vin(cs[1]) || !vin(cs[2])) continue;
        cplx cen = (embed(cs[0], eps) + embed(cs[1], eps) + embed(cs[2], eps)) / 3.0;
        if (!D.contains(cen)) continue;
        kept.push_back(key);
      }
    }
  }
  if (kept.empty()) throw EmptyApproximation("no lattice triangle fits inside the domain at this mesh");

  // edge-connected components; keep the largest (ties: smallest lexicographic vertex)
  std::map<TriKey, int> tri_index;
  for (size_t i = 0; i < kept.size(); ++i) tri_index[kept[i]] = static_cast<int>(i);
  std::map<std::pair<Coord, Coord>, std::vector<int>> edge_map;
  for (size_t i = 0; i < kept.size(); ++i) {
    auto cs = tri_coords(kept[i]);
    for (int e = 0; e < 3; ++e) {
      Coord a = cs[e], b = cs[(e + 1) % 3];
      if (b < a) std::swap(a, b);
      edge_map[{a, b}].push_back(static_cast<int>(i));
    }
  }
  std::vector<int> comp(kept.size(), -1);
  int ncomp = 0;
  for (size_t s = 0; s < kept.size(); ++s) {
    if (comp[s] != -1) continue;
    std::vector<int> stack{static_cast<int>(s)};
    comp[s] = ncomp;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      auto cs = tri_coords(kept[cur]);
      for (int e = 0; e < 3; ++e) {
        Coord a = cs[e], b = cs[(e + 1) % 3];
        if (b < a) std::swap(a, b);
        for (int nb : edge_map[{a, b}]) {
          if (comp[nb] == -1) {
            comp[nb] = ncomp;
            stack.push_back(nb);
          }
        }
      }
    }
    ++ncomp;
  }
  std::vector<int> comp_size(ncomp, 0);
  std::vector<Coord> comp_min(ncomp, Coord{INT32_MAX, INT32_MAX});
  for (size_t i = 0; i < kept.size(); ++i) {
    comp_size[comp[i]]++;
    auto cs = tri_coords(kept[i]);
    for (const auto& c : cs) comp_min[comp[i]] = std::min(comp_min[comp[i]], c);
  }
  int best = 0;
  for (int c = 1; c < ncomp; ++c) {
    if (comp_size[c] > comp_size[best] ||
        (comp_size[c] == comp_size[best] && comp_min[c] < comp_min[best]))
      best = c;
  }

  GridDomain dom;
  dom.eps = eps;
  std::set<TriKey> chosen;
  std::set<Coord> coords;
  for (size_t i = 0; i < kept.size(); ++i) {
    if (comp[i] != best) continue;
    chosen.insert(kept[i]);
    for (const auto& c : tri_coords(kept[i])) coords.insert(c);
  }
  dom.verts.assign(coords.begin(), coords.end());  // lexicographic (set order)
  for (size_t i = 0; i < dom.verts.size(); ++i) dom.vert_id[dom.verts[i]] = static_cast<int>(i);

  dom.adj.assign(dom.verts.size(), {-1, -1, -1, -1, -1, -1});
  std::set<std::pair<int, int>> directed;  // ccw triangle edges by vertex id
  for (const auto& key : chosen) {
    auto cs = tri_coords(key);
    Triangle tr{dom.vert_id[cs[0]], dom.vert_id[cs[1]], dom.vert_id[cs[2]]};
    int tid = static_cast<int>(dom.tris.size());
    dom.tris.push_back(tr);
    int ids[3] = {tr.a, tr.b, tr.c};
    for (int e = 0; e < 3; ++e) {
      int u = ids[e], v = ids[(e + 1) % 3];
      directed.insert({u, v});
      auto uk = std::minmax(u, v);
      auto [it, fresh] = dom.edge_tris.try_emplace({uk.first, uk.second},
                                                   std::array<int, 2>{-1, -1});
      if (fresh)
        it->second[0] = tid;
      else
        it->second[1] = tid;
      // register adjacency in both directions
      Coord d{dom.verts[v].m - dom.verts[u].m, dom.verts[v].n - dom.verts[u].n};
      int di = offset_index(d);
      dom.adj[u][di] = v;
      dom.adj[v][(di + 3) % 6] = u;
    }
  }

  // oriented boundary cycle: directed triangle edges whose reverse is absent
  std::set<std::pair<int, int>> bedges;
  for (const auto& e : directed)
    if (!directed.count({e.second, e.first})) bedges.insert(e);
  if (bedges.empty()) throw EmptyApproximation("domain has no boundary edge");
  auto edge_less = [&](const std::pair<int, int>& x, const std::pair<int, int>& y) {
    return std::make_pair(dom.verts[x.first], dom.verts[x.second]) <
           std::make_pair(dom.verts[y.first], dom.verts[y.second]);
  };
  std::pair<int, int> start = *bedges.begin();
  for (const auto& e : bedges)
    if (edge_less(e, start)) start = e;

  std::pair<int, int> cur = start;
  do {
    dom.boundary.push_back({cur.first, cur.second});
    Coord b = dom.verts[cur.second];
    Coord a = dom.verts[cur.first];
    int d0 = offset_index({a.m - b.m, a.n - b.n});
    int next_dir = -1;
    for (int k = 2; k <= 6; ++k) {
      if (!chosen.count(wedge(b, ((d0 - k) % 6 + 6) % 6))) {
        next_dir = ((d0 - k + 1) % 6 + 6) % 6;
        break;
      }
    }
    Coord nb{b.m + kNeighborOffsets[next_dir].m, b.n + kNeighborOffsets[next_dir].n};
    auto it = dom.vert_id.find(nb);
    if (it == dom.vert_id.end())
      throw std::runtime_error("boundary walk left the vertex set");
    cur = {cur.second, it->second};
    if (!bedges.count(cur)) throw std::runtime_error("boundary walk hit a non-boundary edge");
  } while (cur != start);
  if (dom.boundary.size() != bedges.size())
    throw std::runtime_error("boundary is not a single cycle");

  dom.is_boundary.assign(dom.verts.size(), 0);
  for (const auto& e : dom.boundary) dom.is_boundary[e.tail] = 1;

  // snap marks to closest boundary-edge midpoints (ties: smallest cycle index)
  int B = static_cast<int>(dom.boundary.size());
  double d0best = 1e300, debest = 1e300;
  for (int i = 0; i < B; ++i) {
    cplx mid = dom.edge_midpoint(i);
    double du0 = std::abs(mid - D.u0), due = std::abs(mid - D.ue);
    if (du0 < d0best) {
      d0best = du0;
      dom.e0 = i;
    }
    if (due < debest) {
      debest = due;
      dom.ee = i;
    }
  }
  if (dom.e0 == dom.ee)
    throw AmbiguousMarks("u0 and ue snap to the same boundary edge");

  for (int i = dom.e0; i != dom.ee; i = (i + 1) % B) dom.arc_plus.push_back(dom.boundary[i].head);
  for (int i = dom.ee; i != dom.e0; i = (i + 1) % B) dom.arc_minus.push_back(dom.boundary[i].head);
  dom.diam_cache = -1.0;
  dom.diam_cache = dom.diameter();
  return dom;
}

std::pair<std::vector<int>, std::vector<int>> boundary_arcs(const GridDomain& dom) {
  return {dom.arc_plus, dom.arc_minus};
}

}  // namespace harmex::lattice
