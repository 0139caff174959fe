#include <doctest.h>

#include "conebound/errors.hpp"
#include "conebound/geometry.hpp"
#include "oracles.hpp"

using namespace conebound;

namespace {

Polytope random_polygon(std::mt19937_64& rng, int n, int spread, int center) {
  std::uniform_int_distribution<int> d(-spread, spread), c(-center, center);
  IntVec o{c(rng), c(rng)};
  std::vector<IntVec> pts;
  for (int i = 0; i < n; ++i) pts.push_back({o[0] + d(rng), o[1] + d(rng)});
  return make_polytope(pts, 2);
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("convex hulls") {
  CHECK(convex_hull({{3}, {-2}, {5}, {0}}, 1) == std::vector<IntVec>{{-2}, {5}});
  CHECK(convex_hull({{4}, {4}}, 1) == std::vector<IntVec>{{4}});
  auto h = convex_hull({{0, 0}, {2, 0}, {1, 0}, {2, 2}, {0, 2}, {1, 1}}, 2);
  CHECK(h == std::vector<IntVec>{{0, 0}, {2, 0}, {2, 2}, {0, 2}});
  CHECK(convex_hull({{0, 0}, {1, 1}, {2, 2}}, 2) == std::vector<IntVec>{{0, 0}, {2, 2}});
  CHECK_THROWS_AS(convex_hull({{0, 0, 0}}, 3), CapabilityError);
}

TEST_CASE("dilation and distances") {
  Polytope p = make_polytope({{0}, {3}}, 1);
  CHECK(dilate(p, 1).vertices == std::vector<IntVec>{{-1}, {4}});
  CHECK(squared_distance({7}, p) == 16);
  CHECK(squared_distance({2}, p) == 0);

  Polytope sq = dilate(make_polytope({{0, 0}}, 2), 1);
  CHECK(sq.vertices.size() == 4);
  CHECK(squared_distance({3, 0}, sq) == 4);
  CHECK(squared_distance({3, 3}, sq) == 8);
  CHECK(contains(sq, {1, -1}));
  Polytope seg = make_polytope({{0, 0}, {4, 2}}, 2);
  CHECK(squared_distance({0, 5}, seg) == 20);  // cross^2 / |d|^2 = 20^2 / 20
  CHECK(squared_distance({5, 0}, seg) == 5);
}

TEST_CASE("intersection test agrees with the crossing oracle") {
  std::mt19937_64 rng(555);
  int disagreements = 0, hits = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    Polytope a = random_polygon(rng, 1 + trial % 6, 4, 6);
    Polytope b = random_polygon(rng, 1 + (trial / 6) % 6, 4, 6);
    bool x = intersects(a, b), y = oracle::polygons_intersect(a, b);
    disagreements += x != y;
    hits += x;
  }
  CHECK(disagreements == 0);
  CHECK(hits > 100);
}

TEST_CASE("distance is zero exactly on the polytope") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    Polytope a = random_polygon(rng, 1 + trial % 7, 5, 2);
    for (int x = -8; x <= 8; ++x)
      for (int y = -8; y <= 8; ++y) {
        Polytope pt = make_polytope({{x, y}}, 2);
        CHECK((squared_distance(IntVec{x, y}, a) == 0) == oracle::polygons_intersect(a, pt));
      }
  }
}

TEST_CASE("halfspace intersection") {
  std::vector<Halfspace> hs{{{1, 0}, 1}, {{-1, 0}, 1}, {{0, 1}, 1}, {{0, -1}, 1}, {{1, 1}, 1}};
  auto v = halfspace_vertices(hs, 2);
  CHECK(v.size() == 5);
  CHECK(contains(v, RatVec{Rational(1, 2), Rational(1, 2)}));
  CHECK(!contains(v, RatVec{Rational(3, 4), Rational(1, 2)}));
  CHECK_THROWS_AS(halfspace_vertices({{{1, 0}, 1}, {{0, 1}, 1}}, 2), ValidationError);
  auto iv = halfspace_vertices({{{2}, 3}, {{-1}, 1}}, 1);
  CHECK(iv == std::vector<RatVec>{{-1}, {Rational(3, 2)}});
}

TEST_CASE("Hausdorff distance") {
  Polytope a = make_polytope({{0, 0}, {2, 0}, {0, 2}}, 2);
  Polytope b = make_polytope({{0, 0}, {2, 0}, {2, 2}, {0, 2}}, 2);
  CHECK(hausdorff2(a, b) == 2);
  CHECK(hausdorff2(a, a) == 0);
  auto q = [](long x, long y) { return RatVec{Rational(x), Rational(y)}; };
  std::vector<RatVec> rb{q(0, 0), q(2, 0), q(2, 2), q(0, 2)};
  CHECK(hausdorff2(a, rb) == 2);
}

}  // TEST_SUITE
