#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "harmex/lattice.hpp"

using namespace harmex;
using namespace harmex::lattice;

static JordanPolygon disk_polygon(double radius, int sides, cplx u0, cplx ue) {
  JordanPolygon poly;
  for (int k = 0; k < sides; ++k) {
    double a = 2.0 * M_PI * k / sides;
    poly.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a));
  }
  poly.u0 = u0;
  poly.ue = ue;
  return poly;
}

TEST_CASE("embedding and neighbor ring") {
  Coord v{3, -2};
  double eps = 0.25;
  cplx z = embed(v, eps);
  CHECK(z.real() == doctest::Approx(eps * (3 - 1.0)).epsilon(1e-14));
  CHECK(z.imag() == doctest::Approx(eps * (-2) * std::sqrt(3.0) / 2).epsilon(1e-14));

  auto nb = neighbors(v);
  // ccw ring starting at (m+1, n): successive angles rise by 60 degrees
  for (int k = 0; k < 6; ++k) {
    cplx d = embed(nb[k], eps) - z;
    CHECK(std::abs(d) == doctest::Approx(eps).epsilon(1e-12));
    double want = k * M_PI / 3.0;
    double got = std::arg(d);
    double diff = std::remainder(got - want, 2.0 * M_PI);
    CHECK(std::abs(diff) < 1e-12);
  }
  CHECK(nb[0].m == v.m + 1);
  CHECK(nb[0].n == v.n);
}

TEST_CASE("offset sums vanish for first three frequencies") {
  // sum_k e^{i j k pi/3} = 0 for j = 1, 2, 3 realized through the embedding
  cplx s1 = 0, s2 = 0, s3 = 0;
  double sq = 0;
  for (const auto& d : kNeighborOffsets) {
    cplx w = embed(d, 1.0);
    s1 += w;
    s2 += w * w;
    s3 += w * w * w;
    sq += std::norm(w);
  }
  CHECK(std::abs(s1) < 1e-14);
  CHECK(std::abs(s2) < 1e-14);
  CHECK(std::abs(s3) < 1e-13);
  CHECK(sq == doctest::Approx(6.0).epsilon(1e-14));  // mean growth of |z|^2 is eps^2
}

TEST_CASE("unit hexagonal star inside a small disk") {
  auto poly = disk_polygon(1.05, 64, {0.76, 0.44}, {-0.76, -0.44});
  auto dom = build_domain_approximation(poly, 1.0);
  CHECK(dom.triangle_count() == 6);
  CHECK(dom.vertex_count() == 7);
  CHECK(dom.boundary.size() == 6);
  // center vertex is the only interior one
  int interior = 0;
  for (int i = 0; i < dom.vertex_count(); ++i)
    if (!dom.is_boundary[i]) ++interior;
  CHECK(interior == 1);
  // marks on opposite sides: arcs split 3 + 3
  CHECK(dom.arc_plus.size() == 3);
  CHECK(dom.arc_minus.size() == 3);
  // boundary cycle is ccw: signed area positive
  double area2 = 0;
  for (const auto& e : dom.boundary) {
    cplx a = dom.pos(e.tail), b = dom.pos(e.head);
    area2 += a.real() * b.imag() - b.real() * a.imag();
  }
  CHECK(area2 > 0);
}

TEST_CASE("marks two edges apart give a 4+2 arc split") {
  // u0 near the midpoint of edge ((1,0),(0,1)); ue two boundary edges further ccw
  cplx m0 = 0.5 * (embed({1, 0}, 1.0) + embed({0, 1}, 1.0));
  cplx m2 = 0.5 * (embed({-1, 1}, 1.0) + embed({-1, 0}, 1.0));
  auto poly = disk_polygon(1.05, 64, m0 * 1.02, m2 * 1.02);
  auto dom = build_domain_approximation(poly, 1.0);
  CHECK(dom.arc_plus.size() == 2);
  CHECK(dom.arc_minus.size() == 4);
  // arcs list boundary vertices in ccw cyclic order starting after each mark
  CHECK(dom.arc_plus.front() == dom.boundary[dom.e0].head);
}

TEST_CASE("exact-fit triangle survives the boundary slack") {
  JordanPolygon poly;
  poly.vertices = {cplx(0, 0), cplx(1, 0), cplx(0.5, std::sqrt(3.0) / 2)};
  poly.u0 = cplx(0.5, 0.0);
  poly.ue = cplx(0.75, std::sqrt(3.0) / 4);
  auto dom = build_domain_approximation(poly, 1.0);
  CHECK(dom.triangle_count() == 1);
  CHECK(dom.vertex_count() == 3);
  CHECK(dom.arc_plus.size() + dom.arc_minus.size() == 3);
}

TEST_CASE("largest component wins in a pinched dumbbell") {
  // two rooms joined by a corridor too flat for any triangle
  JordanPolygon poly;
  poly.vertices = {cplx(0, 0),    cplx(3.2, 0),   cplx(3.2, 1.0), cplx(5.0, 1.0),
                   cplx(5.0, 0),  cplx(7.1, 0),   cplx(7.1, 2.1), cplx(5.0, 2.1),
                   cplx(5.0, 1.2), cplx(3.2, 1.2), cplx(3.2, 3.2), cplx(0, 3.2)};
  poly.u0 = cplx(1.0, 0.0);
  poly.ue = cplx(1.0, 3.2);
  auto dom = build_domain_approximation(poly, 1.0);
  CHECK(dom.triangle_count() > 0);
  for (int i = 0; i < dom.vertex_count(); ++i)
    CHECK(dom.pos(i).real() < 4.0);  // everything from the larger left room
}

TEST_CASE("empty approximation raises") {
  auto poly = disk_polygon(0.2, 16, {0.2, 0}, {-0.2, 0});
  CHECK_THROWS_AS(build_domain_approximation(poly, 1.0), EmptyApproximation);
}

TEST_CASE("coincident marks raise") {
  auto poly = disk_polygon(1.05, 64, {0.76, 0.44}, {0.76, 0.44});
  CHECK_THROWS_AS(build_domain_approximation(poly, 1.0), AmbiguousMarks);
}

TEST_CASE("domain json round trip") {
  auto poly = disk_polygon(1.05, 8, {0.76, 0.44}, {-0.76, -0.44});
  auto back = JordanPolygon::from_json(poly.to_json());
  REQUIRE(back.vertices.size() == poly.vertices.size());
  for (size_t i = 0; i < poly.vertices.size(); ++i)
    CHECK(std::abs(back.vertices[i] - poly.vertices[i]) < 1e-15);
  CHECK(std::abs(back.u0 - poly.u0) < 1e-15);
  CHECK(std::abs(back.ue - poly.ue) < 1e-15);
  CHECK_THROWS(JordanPolygon::from_json("{\"vertices\": []}"));
}

TEST_CASE("edge incidence: boundary edges touch one triangle, interior two") {
  auto poly = disk_polygon(3.05, 64, {3.0, 0.4}, {-3.0, -0.4});
  auto dom = build_domain_approximation(poly, 1.0);
  std::set<std::pair<int, int>> bset;
  for (const auto& e : dom.boundary) {
    auto k = std::minmax(e.tail, e.head);
    bset.insert({k.first, k.second});
  }
  for (const auto& [key, tris] : dom.edge_tris) {
    int cnt = (tris[0] >= 0) + (tris[1] >= 0);
    if (bset.count(key))
      CHECK(cnt == 1);
    else
      CHECK(cnt == 2);
  }
  // adjacency table is symmetric and direction-consistent
  for (int v = 0; v < dom.vertex_count(); ++v) {
    for (int d = 0; d < 6; ++d) {
      int w = dom.adj[v][d];
      if (w >= 0) CHECK(dom.adj[w][(d + 3) % 6] == v);
    }
  }
}
