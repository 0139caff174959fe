#include <doctest.h>

#include "conebound/errors.hpp"
#include "conebound/support.hpp"
#include "oracles.hpp"

using namespace conebound;

namespace {

std::set<IntVec> as_set(const std::vector<IntVec>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_SUITE("cover_dynamics") {

TEST_CASE("support_of_power basics") {
  auto ds = oracle::load("braid_r1.json");
  auto s0 = support_of_power(ds.map, 0);
  CHECK(s0.points == std::vector<IntVec>{{0}});

  TrackMap t;
  t.rank = 1;
  t.vertices = {"v"};
  t.edges = {Edge{"e", 0, 0, {1}}};
  t.images = {{{0, {1}, 1}}};
  LiftedGraphMap rose(t, std::nullopt, std::nullopt, {});
  CHECK(support_of_power(rose, 4).points == std::vector<IntVec>{{4}});
}

TEST_CASE("matrix supports equal literal substitution and naive powers") {
  for (const char* name : {"braid_r1.json", "synthetic_r2.json"}) {
    auto ds = oracle::load(name);
    SupportEngine engine(ds.map.transition());
    for (std::uint64_t p = 0; p <= 8; ++p) {
      auto pts = engine.points(p);
      CHECK(as_set(pts) == oracle_iterate_points(ds.map.forward(), p, 10'000'000));
      CHECK(std::is_sorted(pts.begin(), pts.end()));
      if (p <= 5) CHECK(as_set(pts) == oracle::naive_support(ds.map.transition(), static_cast<unsigned>(p)));
      auto hull = engine.hull(p);
      CHECK(hull == make_polytope(pts, ds.map.rank()));
      for (const auto& v : hull.vertices) CHECK(std::binary_search(pts.begin(), pts.end(), v));
    }
  }
}

TEST_CASE("subadditivity of supports") {
  for (const char* name : {"braid_r1.json", "synthetic_r2.json"}) {
    auto ds = oracle::load(name);
    SupportEngine engine(ds.map.transition());
    for (std::uint64_t p = 1; p <= 4; ++p)
      for (std::uint64_t q = 1; q <= 4; ++q) {
        auto sum = oracle::minkowski(engine.points(p), engine.points(q));
        for (const auto& x : engine.points(p + q)) CHECK(sum.count(x) == 1);
      }
  }
}

TEST_CASE("bundled rank-1 supports are symmetric intervals") {
  auto ds = oracle::load("braid_r1.json");
  SupportEngine engine(ds.map.transition());
  for (std::int64_t p = 1; p <= 40; ++p) {
    auto h = engine.hull(static_cast<std::uint64_t>(p));
    CHECK(h.vertices == std::vector<IntVec>{{-p}, {p}});
  }
}

TEST_CASE("omega_of_word modes") {
  auto ds = oracle::load("braid_r1.json");
  OmegaProvider plain(ds.map, {false, false});
  CHECK(omega_of_word(plain, {3}, 0).hull.vertices == std::vector<IntVec>{{3}});
  CHECK_THROWS_AS(omega_of_word(plain, {0}, -2), ValidationError);

  OmegaProvider mirror(ds.map, {false, true});
  auto m = omega_of_word(mirror, {0}, -4);
  CHECK(m.source == OmegaSource::mirror);
  CHECK(m.hull == negate(plain.forward().hull(4)));

  auto r2 = oracle::load("synthetic_r2.json");
  OmegaProvider mr2(r2.map, {true, true});
  auto w = omega_of_word(mr2, {5, -1}, -3);
  CHECK(w.source == OmegaSource::mirror);
  CHECK(w.hull == translate(negate(mr2.forward().hull(3)), {5, -1}));

  OmegaProvider inv(ds.map, {true, true});
  auto i = omega_of_word(inv, {0}, -3);
  CHECK(i.source == OmegaSource::inverse_data);
  // C0: largest Hausdorff distance between inverse-data and mirror supports for p <= 6.
  Rational c0 = 0;
  for (std::uint64_t p = 0; p <= 6; ++p)
    c0 = std::max(c0, hausdorff2(inv.inverse()->hull(p), negate(inv.forward().hull(p))));
  CHECK(c0 == 0);
  CHECK(hausdorff2(i.hull, omega_of_word(mirror, {0}, -3).hull) <= c0);
}

TEST_CASE("the inverse dataset undoes the forward map on supports") {
  // Composite psi~^-1 psi~ covers domain 0 again: 0 lies in Omega_inv(1) + Omega(1).
  auto ds = oracle::load("braid_r1.json");
  OmegaProvider inv(ds.map, {true, false});
  auto f = inv.forward().points(1), b = inv.inverse()->points(1);
  CHECK(oracle::minkowski(f, b).count({0}) == 1);
}

}  // TEST_SUITE
