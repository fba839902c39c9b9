#pragma once
#include <array>
#include <compare>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace harmex {

using cplx = std::complex<double>;

namespace lattice {

// Axial coordinate on the triangular lattice; embeds as eps*(m + n*e^{i pi/3}).
struct Coord {
  int m = 0, n = 0;
  auto operator<=>(const Coord&) const = default;
};

cplx embed(Coord c, double eps);

// The six neighbor offsets in counterclockwise order starting from (m+1, n).
inline constexpr std::array<Coord, 6> kNeighborOffsets = {
    {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};

std::array<Coord, 6> neighbors(Coord v);

// Simple closed polygon with the two boundary marks for the explorer.
struct JordanPolygon {
  std::vector<cplx> vertices;  // implicitly closed
  cplx u0, ue;

  // Interior test; points within `slack` of the boundary count as inside.
  bool contains(cplx p, double slack = 1e-12) const;
  double boundary_distance(cplx p) const;

  static JordanPolygon from_json(const std::string& text);
  static JordanPolygon from_json_file(const std::string& path);
  std::string to_json() const;
};

struct EmptyApproximation : std::runtime_error {
  explicit EmptyApproximation(const std::string& what) : std::runtime_error(what) {}
};
struct AmbiguousMarks : std::runtime_error {
  explicit AmbiguousMarks(const std::string& what) : std::runtime_error(what) {}
};

struct Triangle {
  int a, b, c;  // vertex ids, counterclockwise
};

struct DirectedEdge {
  int tail, head;
};

// Largest edge-connected set of lattice triangles inside a Jordan polygon,
// with its oriented boundary cycle, snapped marks and the two boundary arcs.
struct GridDomain {
  double eps = 1.0;
  std::vector<Coord> verts;                      // id -> coordinate (lexicographic order)
  std::map<Coord, int> vert_id;                  // coordinate -> id
  std::vector<Triangle> tris;                    // counterclockwise triples
  std::vector<std::array<int, 6>> adj;           // id -> ccw neighbor ids, -1 if edge absent
  std::map<std::pair<int, int>, std::array<int, 2>> edge_tris;  // (lo,hi) -> incident tris
  std::vector<DirectedEdge> boundary;            // ccw cycle, interior on the left
  std::vector<char> is_boundary;                 // id -> lies on the boundary cycle
  int e0 = -1, ee = -1;                          // marked edge indices into `boundary`
  std::vector<int> arc_plus, arc_minus;          // boundary vertex ids, ccw order
  double diam_cache = -1.0;                      // filled by build_domain_approximation

  cplx pos(int id) const { return embed(verts[id], eps); }
  cplx edge_midpoint(int bidx) const;
  cplx v0_hat() const { return edge_midpoint(e0); }
  cplx ve_hat() const { return edge_midpoint(ee); }
  int triangle_count() const { return static_cast<int>(tris.size()); }
  int vertex_count() const { return static_cast<int>(verts.size()); }
  double diameter() const;
};

GridDomain build_domain_approximation(const JordanPolygon& D, double eps);

// The two boundary arcs (vertex ids, ccw): first = from v0_hat to ve_hat.
std::pair<std::vector<int>, std::vector<int>> boundary_arcs(const GridDomain& dom);

}  // namespace lattice
}  // namespace harmex
