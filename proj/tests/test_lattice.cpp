#include <doctest.h>

#include <numeric>
#include <random>
#include <set>

#include "conebound/errors.hpp"
#include "conebound/lattice.hpp"
#include "oracles.hpp"

using namespace conebound;

namespace {

IntVec combine(const IntVec& c, const std::vector<IntVec>& basis) {
  IntVec v(basis.front().size(), 0);
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += c[i] * basis[i][k];
  return v;
}

// Integer coefficients of v in a basis of rank 1 or 2 spanning a saturated lattice, if any.
bool in_span(const IntVec& v, const std::vector<IntVec>& basis, std::int64_t box) {
  IntVec c(basis.size(), -box);
  while (true) {
    if (combine(c, basis) == v) return true;
    std::size_t k = 0;
    while (k < c.size() && ++c[k] > box) c[k++] = -box;
    if (k == c.size()) return false;
  }
}

std::vector<IntVec> random_unimodular(std::mt19937_64& rng, std::size_t r) {
  std::vector<IntVec> U(r, IntVec(r, 0));
  for (std::size_t i = 0; i < r; ++i) U[i][i] = 1;
  std::uniform_int_distribution<std::size_t> pick(0, r - 1);
  std::uniform_int_distribution<int> q(-3, 3);
  for (int step = 0; step < 6 && r > 1; ++step) {
    std::size_t a = pick(rng), b = pick(rng);
    if (a == b) continue;
    int f = q(rng);
    for (std::size_t k = 0; k < r; ++k) U[a][k] += f * U[b][k];
  }
  if (rng() % 2) std::swap(U[0], U[r - 1]);
  return U;
}

Polytope random_polytope(std::mt19937_64& rng, std::size_t r, int spread, int size) {
  std::uniform_int_distribution<int> c(-spread, spread), s(0, size);
  IntVec base(r);
  for (auto& b : base) b = c(rng);
  std::vector<IntVec> pts;
  for (int k = 0; k < 4; ++k) {
    IntVec p = base;
    for (auto& x : p) x += s(rng);
    pts.push_back(p);
  }
  return make_polytope(pts, r);
}

}  // namespace

TEST_SUITE("lattice_geometry") {

TEST_CASE("determinant agrees with rational elimination") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> c(-9, 9);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + trial % 5;
    IntMatrix m(n, std::vector<Integer>(n));
    std::vector<std::vector<Rational>> q(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        int v = trial % 7 == 0 && j == 0 ? 0 : c(rng);
        m[i][j] = v;
        q[i][j] = v;
      }
    CHECK(Rational(determinant(m)) == oracle::gauss_det(q));
  }
}

TEST_CASE("Hermite normal form") {
  CHECK(hermite_normal_form({{2, -1}}) == std::vector<IntVec>{{2, -1}});
  CHECK(hermite_normal_form({{-2, 1}}) == std::vector<IntVec>{{2, -1}});
  CHECK(hermite_normal_form({{4, 6}, {6, 9}}) == std::vector<IntVec>{{2, 3}});
  CHECK(hermite_normal_form({{3, 1, 0}, {1, 0, 5}}) == std::vector<IntVec>{{1, 0, 5}, {0, 1, -15}});
  // Canonical: any unimodular change of basis gives the same form.
  std::mt19937_64 rng(8);
  std::vector<IntVec> b{{3, -2, 7}, {1, 4, -1}};
  auto h = hermite_normal_form(b);
  for (int t = 0; t < 50; ++t) {
    auto U = random_unimodular(rng, 2);
    CHECK(hermite_normal_form({combine(U[0], b), combine(U[1], b)}) == h);
  }
}

TEST_CASE("perp_basis examples") {
  CHECK(perp_basis({0, 1}).basis == std::vector<IntVec>{{1, 0}});
  CHECK(perp_basis({1, 2}).basis == std::vector<IntVec>{{2, -1}});
  auto L = perp_basis({1, 1, 3});
  REQUIRE(L.rank() == 2);
  for (const auto& b : L.basis) CHECK(dot(b, {1, 1, 3}) == 0);
  CHECK(is_saturated_kernel(L.basis, {1, 1, 3}));
  for (const auto& v : oracle::kernel_points({1, 1, 3}, 5)) CHECK(in_span(v, L.basis, 12));
  CHECK_FALSE(is_saturated_kernel({{2, 0, 0}, {0, 3, -1}}, {0, 1, 3}));

  CHECK_THROWS_AS(perp_basis({0, 0}), ValidationError);
  try {
    perp_basis({2, 4});
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("gcd 2") != std::string::npos);
  }
}

TEST_CASE("perp_basis on random primitive classes") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> c(-40, 40), n(1, 60);
  for (int trial = 0; trial < 300; ++trial) {
    IntVec a = trial % 2 ? IntVec{c(rng), n(rng)} : IntVec{c(rng), c(rng), n(rng)};
    std::int64_t g = gcd_of(a);
    for (auto& x : a) x /= g;
    auto L = perp_basis(a);
    for (const auto& b : L.basis) CHECK(dot(b, a) == 0);
    CHECK(is_saturated_kernel(L.basis, a));
    CHECK(L.basis == hermite_normal_form(L.basis));
  }
}

TEST_CASE("covolume of the projected lattice") {
  for (std::int64_t n = 1; n <= 20; ++n)
    for (std::int64_t p = -25; p <= 25; ++p) {
      if (std::gcd(p, n) != 1) continue;
      CHECK(covolume(perp_basis({p, n})) == n * n);
    }
  // Unimodular re-basing leaves the Gram determinant unchanged.
  std::mt19937_64 rng(4);
  auto L = perp_basis({3, -5, 7});
  for (int t = 0; t < 30; ++t) {
    auto U = random_unimodular(rng, 2);
    auto M = with_basis(L.alpha, {combine(U[0], L.basis), combine(U[1], L.basis)});
    CHECK(covolume(M) == covolume(L));
  }
  // Rank 2 classes in a subcone around (0, 0, 1): the coordinate projection gives
  // covolume exactly n, so covolume >= n holds with equality.
  for (std::int64_t n = 1; n <= 30; ++n)
    for (std::int64_t p = -n / 2; p <= n / 2; p += 3)
      for (std::int64_t q = -n / 2; q <= n / 2; q += 5) {
        IntVec a{p, q, n};
        if (gcd_of(a) != 1) continue;
        CHECK(covolume(perp_basis(a)) == n * n);
      }
}

TEST_CASE("systole examples") {
  CHECK(systole(std::vector<IntVec>{{5}}).length2 == 25);
  CHECK(systole(std::vector<IntVec>{{3, 0}, {0, 3}}).length2 == 9);
  auto s = systole(std::vector<IntVec>{{7, 1}, {3, 5}});
  CHECK(s.length2 == oracle::brute_systole({{7, 1}, {3, 5}}, 10));
  CHECK(norm2(combine(s.coefficients, {{7, 1}, {3, 5}})) == s.length2);
  CHECK_THROWS_AS(systole(std::vector<IntVec>{{1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, 0, 1, 0, 0},
                                              {0, 0, 0, 1, 0}, {0, 0, 0, 0, 1}}),
                  CapabilityError);
}

TEST_CASE("systole and ball enumeration against brute force") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> c(-30, 30);
  for (int trial = 0; trial < 150; ++trial) {
    std::vector<IntVec> b{{c(rng), c(rng)}, {c(rng), c(rng)}};
    if (b[0][0] * b[1][1] - b[0][1] * b[1][0] == 0) continue;
    auto s = systole(b);
    Integer brute = oracle::brute_systole(b, 40);
    CHECK(s.length2 == brute);
    CHECK(norm2(combine(s.coefficients, b)) == s.length2);

    Integer R2 = 400;
    auto pts = enumerate_ball(b, R2);
    std::set<IntVec> got(pts.begin(), pts.end());
    std::size_t expected = 0;
    IntVec cc(2, -40);
    for (cc[0] = -40; cc[0] <= 40; ++cc[0])
      for (cc[1] = -40; cc[1] <= 40; ++cc[1])
        if (norm2(combine(cc, b)) <= R2) {
          ++expected;
          CHECK(got.count(cc) == 1);
        }
    CHECK(pts.size() >= expected);
    for (const auto& p : pts) CHECK(norm2(combine(p, b)) <= R2);
  }
}

TEST_CASE("r = 1 systole is n^2") {
  for (std::int64_t n : {1, 7, 12, 99}) CHECK(systole(perp_basis({1, n})).length2 == n * n);
}

TEST_CASE("deep point examples") {
  auto pt = [](std::int64_t v) { return make_polytope({{v}}, 1); };
  auto d = deep_point({pt(0), pt(5), pt(-5)}, 5);
  CHECK(d.y == IntVec{-3});
  CHECK(d.dist2 == Fraction{4, 1});

  auto full = make_polytope({{-10, -10}, {10, 10}, {-10, 10}, {10, -10}}, 2);
  auto z = deep_point({make_polytope({{0, 0}}, 2), full}, 4);
  CHECK(z.dist2 == Fraction{0, 1});
  CHECK(z.y == IntVec{-4, -4});

  CHECK_THROWS_AS(deep_point({}, 3), ValidationError);
  CHECK_THROWS_AS(deep_point({pt(1)}, 3), ValidationError);
}

TEST_CASE("deep point equals the exhaustive scan") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t r = trial % 3 == 0 ? 1 : 2;
    std::int64_t R = 3 + trial % 9;
    std::vector<Polytope> obs{make_polytope({IntVec(r, 0)}, r)};
    int count = 1 + trial % 7;
    for (int k = 0; k < count; ++k) obs.push_back(random_polytope(rng, r, static_cast<int>(2 * R), 3));
    auto [y, v] = oracle::scan_deep_point(obs, R);
    auto d1 = deep_point(obs, R);
    CHECK(d1.y == y);
    CHECK(d1.dist2.to_rational() == v);
    auto d4 = deep_point(obs, R, {}, 4);
    CHECK(d4.y == y);
    // Seeds change speed only.
    std::vector<IntVec> seeds{IntVec(r, 1), IntVec(r, -R), y};
    auto ds = deep_point(obs, R, seeds, 3);
    CHECK(ds.y == y);
    CHECK(ds.dist2 == d1.dist2);

    std::uniform_int_distribution<std::int64_t> c(-R, R);
    for (int k = 0; k < 20; ++k) {
      IntVec cand(r);
      for (auto& x : cand) x = c(rng);
      CHECK(min_distance2(cand, obs) <= d1.dist2);
    }
  }
}

TEST_CASE("dichotomy seeds stay in the box") {
  for (IntVec a : {IntVec{1, 9}, IntVec{2, 3, 17}, IntVec{1, 40, 41}}) {
    auto L = perp_basis(a);
    for (const auto& s : dichotomy_seeds(L, 3)) {
      CHECK(s.size() == L.rank());
      for (auto x : s) CHECK(std::abs(x) <= 3);
    }
  }
}

}  // TEST_SUITE
