#include <doctest.h>

#include <random>

#include "conebound/errors.hpp"
#include "conebound/io.hpp"
#include "conebound/pipeline.hpp"
#include "oracles.hpp"

using namespace conebound;

namespace {

struct Setup {
  Dataset ds;
  DualConeModel model;
  FiberedConeModel cone;
  Subcone P;
  std::unique_ptr<OmegaProvider> omega;
};

Setup make_setup(const std::string& file, OmegaOptions o = {}) {
  Setup s{oracle::load(file), {}, {}, {}, nullptr};
  s.model = estimate_dual_cone(s.ds.map, 12);
  s.cone = fibered_cone(s.model);
  s.P = shrunken_subcone(s.cone, Rational(1, 4));
  s.omega = std::make_unique<OmegaProvider>(s.ds.map, o);
  return s;
}

Setup& braid() {
  static Setup s = make_setup("braid_r1.json");
  return s;
}

Setup& synthetic() {
  static Setup s = make_setup("synthetic_r2.json", {true, true});
  return s;
}

CertifyOptions opts(std::uint64_t p_max) {
  CertifyOptions o;
  o.p_max = p_max;
  return o;
}

const BoundCertificate& braid_cert() {
  static BoundCertificate c = certify({11, 35}, *braid().omega, braid().ds.hash, braid().model, braid().P, opts(512));
  return c;
}

const BoundCertificate& synthetic_cert() {
  static BoundCertificate c =
      certify({13, 13, 201}, *synthetic().omega, synthetic().ds.hash, synthetic().model, synthetic().P, opts(64));
  return c;
}

LiftedGraphMap rose_t() {
  TrackMap t;
  t.rank = 1;
  t.vertices = {"v"};
  t.edges = {Edge{"e", 0, 0, {1}}};
  t.images = {{{0, {1}, 1}}};
  return LiftedGraphMap(t, std::nullopt, std::nullopt, {});
}

}  // namespace

TEST_SUITE("bound_pipeline") {

TEST_CASE("decompose") {
  auto& b = braid();
  auto d = decompose({0, 1}, b.cone);
  CHECK(d.n == 1);
  CHECK(d.lattice.basis == std::vector<IntVec>{{1, 0}});

  auto d2 = decompose({1, 2}, b.cone);
  CHECK(d2.n == 2);
  CHECK(d2.lattice.basis == std::vector<IntVec>{{2, -1}});
  auto words = enumerate_words(d2.lattice, 4);
  REQUIRE(words.size() == 3);
  CHECK(words[2].x == IntVec{2});
  CHECK(words[2].y == -1);
  CHECK(words[2].action == 1);

  for (IntVec a : {IntVec{3, 10}, IntVec{-7, 30}, IntVec{2, 9}}) {
    auto L = decompose(a, b.cone).lattice;
    for (const auto& v : oracle::kernel_points(a, 40)) {
      bool found = false;
      for (std::int64_t c = -40; c <= 40 && !found; ++c) found = IntVec{c * L.basis[0][0], c * L.basis[0][1]} == v;
      CHECK(found);
    }
  }
  CHECK_THROWS_AS(decompose({2, 4}, b.cone), ValidationError);
  CHECK_THROWS_AS(decompose({5, 1}, b.cone), ValidationError);
  CHECK_THROWS_AS(decompose({1, 1}, b.cone), ValidationError);

  auto& s = synthetic();
  auto d3 = decompose({0, 0, 1}, s.cone);
  CHECK(d3.n == 1);
  CHECK(d3.lattice.basis == std::vector<IntVec>{{1, 0, 0}, {0, 1, 0}});
}

TEST_CASE("enumerate_words") {
  auto L = perp_basis({1, 2});
  auto w = enumerate_words(L, 25);
  REQUIRE(w.size() == 5);
  for (std::int64_t c = -2; c <= 2; ++c) CHECK(w[static_cast<std::size_t>(c + 2)].coefficients == IntVec{c});

  auto M = perp_basis({3, 5, 40});
  Integer sys = systole(M).length2;
  auto only = enumerate_words(M, sys - 1);
  REQUIRE(only.size() == 1);
  CHECK(only[0].x == IntVec{0, 0});
  CHECK(enumerate_words(M, sys).size() >= 3);
}

TEST_CASE("cone approximation contains the exact obstacle") {
  auto& b = braid();
  ConeBound cb{b.model.facets, b.model.C, b.model.C};
  for (std::int64_t k = -30; k <= 30; ++k) {
    Polytope approx = cone_approximation(cb, {7}, k);
    Polytope exact = omega_of_word(*b.omega, {7}, k).hull;
    for (const auto& v : exact.vertices) CHECK(contains(approx, v));
  }
  auto& s = synthetic();
  ConeBound cs{s.model.facets, s.model.C, s.model.C};
  for (std::int64_t k = -12; k <= 12; ++k) {
    Polytope approx = cone_approximation(cs, {3, -2}, k);
    for (const auto& v : omega_of_word(*s.omega, {3, -2}, k).hull.vertices) CHECK(contains(approx, v));
  }
}

TEST_CASE("one-edge rose with alpha = (0, 1) is inconclusive") {
  auto map = rose_t();
  auto model = estimate_dual_cone(map, 8);
  auto cone = fibered_cone(model);
  OmegaProvider omega(map, {});
  auto cert = certify({0, 1}, omega, dataset_hash(map), model, subcone_from_rays({{0, 1}}), opts(16));
  CHECK(cert.status == "inconclusive");
  CHECK(cert.K == 0);
  REQUIRE_FALSE(cert.diagnostics.empty());
  CHECK(cert.diagnostics.front().find("too small") != std::string::npos);
  CHECK(verify_certificate(cert, map, dataset_hash(map)).predicate == "status");
  CHECK(cone.dual_rays.size() == 1);
}

TEST_CASE("bundled rank-1 certificate") {
  const auto& c = braid_cert();
  REQUIRE(c.status == "ok");
  CHECK(c.mode == "certified");
  CHECK(c.n == 35);
  CHECK(c.K == 9);
  CHECK(c.bound == Rational(2, 315));
  CHECK(c.deep_point == IntVec{-12});
  CHECK(c.deep_dist2 == 121);
  CHECK(c.epsilon == Rational(1, 4));
  auto v = verify_certificate(c, braid().ds.map, braid().ds.hash);
  CHECK(v.status == VerifyStatus::pass);
  CHECK(v.predicate == "");
}

TEST_CASE("halving p_max never lowers the bound") {
  auto& b = braid();
  for (IntVec a : {IntVec{11, 35}, IntVec{-9, 50}, IntVec{20, 71}}) {
    Rational prev = 0;
    for (std::uint64_t pm : {512, 256, 64, 16, 8, 4}) {
      auto c = certify(a, *b.omega, b.ds.hash, b.model, b.P, opts(pm));
      if (c.status != "ok") break;
      CHECK(c.bound >= prev);
      prev = c.bound;
    }
  }
}

TEST_CASE("soundness chain on the stored polytopes") {
  for (const BoundCertificate* c : {&braid_cert(), &synthetic_cert()}) {
    REQUIRE(c->status == "ok");
    Setup& s = c->n == 35 ? braid() : synthetic();
    std::vector<Polytope> obs;
    for (const auto& w : c->words) obs.push_back(dilate(w.obstacle, c->safety));
    for (const auto& o : obs) CHECK_FALSE(contains(o, c->deep_point));
    Polytope image = dilate(translate(s.omega->power(static_cast<std::int64_t>(c->K)).hull, c->deep_point), c->safety);
    for (const auto& o : obs) CHECK_FALSE(intersects(image, o));
    CHECK(inside_box(image, c->box_radius));
    // y is not a zeta-image of a word.
    auto L = perp_basis(c->alpha);
    auto with_y = L.projected;
    with_y.push_back(c->deep_point);
    CHECK(hermite_normal_form(with_y) != hermite_normal_form(L.projected));
  }
}

TEST_CASE("omitted words miss the box") {
  for (const BoundCertificate* c : {&braid_cert(), &synthetic_cert()}) {
    Setup& s = c->n == 35 ? braid() : synthetic();
    auto L = perp_basis(c->alpha);
    const std::size_t r = L.rank();
    // Words in a shell just beyond the truncation radius.
    Integer outer = c->truncation_radius2 * 2;
    auto shell = enumerate_words(L, outer);
    std::mt19937_64 rng(7);
    std::shuffle(shell.begin(), shell.end(), rng);
    int checked = 0;
    const std::int64_t R = c->box_radius + c->safety;
    for (const auto& w : shell) {
      if (norm2(w.x) <= c->truncation_radius2) continue;
      Polytope o = omega_of_word(*s.omega, w.x, w.action).hull;
      auto [lo, hi] = bounding_box(o);
      bool misses = false;
      for (std::size_t i = 0; i < r; ++i) misses |= lo[i] > R || hi[i] < -R;
      CHECK(misses);
      if (++checked == 100) break;
    }
    CHECK(checked >= 4);
  }
}

TEST_CASE("mutated certificates fail with the named predicate") {
  for (const BoundCertificate* base : {&braid_cert(), &synthetic_cert()}) {
    Setup& s = base->n == 35 ? braid() : synthetic();
    auto run = [&](const BoundCertificate& c) { return verify_certificate(c, s.ds.map, s.ds.hash); };

    BoundCertificate y = *base;
    y.deep_point = IntVec(y.deep_point.size(), 0);
    CHECK(run(y).predicate == "deep_point_outside_obstacles");

    BoundCertificate k = *base;
    k.K += 1;
    k.bound = Rational(2) / (Rational(static_cast<long>(k.n)) * Rational(static_cast<long>(k.K)));
    auto rk = run(k);
    CHECK(rk.status == VerifyStatus::fail);
    CHECK((rk.predicate == "image_disjoint_from_obstacles" || rk.predicate == "image_inside_box" ||
           rk.predicate == "power_within_p_max"));

    BoundCertificate stale = *base;
    stale.K += 1;
    CHECK(run(stale).status == VerifyStatus::fail);

    BoundCertificate drop = *base;
    drop.words.erase(drop.words.begin() + static_cast<std::ptrdiff_t>(drop.words.size() / 2));
    CHECK(run(drop).predicate == "word_list_complete");

    BoundCertificate h = *base;
    h.dataset_hash[0] = h.dataset_hash[0] == 'a' ? 'b' : 'a';
    CHECK(run(h).predicate == "hash");

    BoundCertificate ob = *base;
    ob.words.front().obstacle = translate(ob.words.front().obstacle, IntVec(ob.words.front().x.size(), 1));
    CHECK(run(ob).predicate == "obstacle_matches");

    BoundCertificate bv = *base;
    bv.bound *= 2;
    CHECK(run(bv).predicate == "bound_value");

    BoundCertificate ml = *base;
    ml.mode = "approximate";
    CHECK(run(ml).predicate == "mode_label");

    BoundCertificate tr = *base;
    tr.truncation_radius2 = 1;
    CHECK(run(tr).predicate == "word_list_complete");

    BoundCertificate cn = *base;
    cn.cone.C = -1;
    CHECK(run(cn).predicate == "cone_model_contains_supports");

    BoundCertificate dd = *base;
    dd.deep_dist2 += 1;
    CHECK(run(dd).predicate == "deep_point_outside_obstacles");
  }
}

TEST_CASE("a smaller feasible K still verifies") {
  auto& b = braid();
  const auto& c = braid_cert();
  // Lower powers whose images stay clear are valid, weaker certificates.
  int passed = 0;
  for (std::uint64_t k = 1; k < c.K; ++k) {
    BoundCertificate w = c;
    w.K = k;
    w.bound = Rational(2) / (Rational(static_cast<long>(w.n)) * Rational(static_cast<long>(k)));
    passed += verify_certificate(w, b.ds.map, b.ds.hash).status == VerifyStatus::pass;
  }
  CHECK(passed >= 1);
}

TEST_CASE("verification budget") {
  VerifyOptions tight;
  tight.max_power = 3;
  auto v = verify_certificate(braid_cert(), braid().ds.map, braid().ds.hash, tight);
  CHECK(v.status == VerifyStatus::unverifiable);
  CHECK(to_string(v.status) == "unverifiable at budget");
}

TEST_CASE("inverse-data and mirror certificates agree") {
  auto& b = braid();
  // Measured mirror offset: Omega of the inverse data equals -Omega for this dataset.
  std::int64_t C0 = 0;
  for (std::int64_t k = 1; k <= 40; ++k) {
    auto inv = b.omega->power(-k).hull;
    auto mir = negate(b.omega->power(k).hull);
    while (!(std::all_of(inv.vertices.begin(), inv.vertices.end(), [&](const IntVec& v) { return contains(dilate(mir, C0), v); }) &&
             std::all_of(mir.vertices.begin(), mir.vertices.end(), [&](const IntVec& v) { return contains(dilate(inv, C0), v); })))
      ++C0;
  }
  CHECK(C0 == 0);
  OmegaProvider mirror(b.ds.map, {false, true});
  for (IntVec a : {IntVec{11, 35}, IntVec{-9, 50}, IntVec{3, 10}, IntVec{20, 71}}) {
    auto ci = certify(a, *b.omega, b.ds.hash, b.model, b.P, opts(256));
    CertifyOptions om = opts(256);
    om.safety += C0;
    auto cm = certify(a, mirror, b.ds.hash, b.model, b.P, om);
    auto vi = verify_certificate(ci, b.ds.map, b.ds.hash).status;
    auto vm = verify_certificate(cm, b.ds.map, b.ds.hash).status;
    CHECK(vi == vm);
    CHECK(ci.K == cm.K);
  }
}

TEST_CASE("rank-2 certificate verifies") {
  const auto& c = synthetic_cert();
  REQUIRE(c.status == "ok");
  CHECK(c.mode == "certified");
  CHECK(c.K == 20);
  CHECK(c.deep_dist2 == 968);
  CHECK(verify_certificate(c, synthetic().ds.map, synthetic().ds.hash).status == VerifyStatus::pass);
  // Without inverse data or mirror mode the negative powers are unavailable.
  OmegaProvider forward_only(synthetic().ds.map, {true, false});
  CHECK_THROWS_AS(certify({13, 13, 201}, forward_only, synthetic().ds.hash, synthetic().model, synthetic().P, opts(64)),
                  ValidationError);
}

TEST_CASE("word power cap forces the asymptotic label") {
  auto& b = braid();
  CertifyOptions o = opts(256);
  o.word_power_cap = 5;
  auto strict = certify({20, 71}, *b.omega, b.ds.hash, b.model, b.P, o);
  CHECK(strict.status == "inconclusive");
  CHECK(strict.diagnostics.front().find("asymptotic") != std::string::npos);
  o.asymptotic = true;
  auto loose = certify({20, 71}, *b.omega, b.ds.hash, b.model, b.P, o);
  REQUIRE(loose.status == "ok");
  {
    CHECK(loose.mode == "asymptotic");
    auto v = verify_certificate(loose, b.ds.map, b.ds.hash);
    CHECK(v.status == VerifyStatus::pass);
    BoundCertificate relabel = loose;
    relabel.mode = "certified";
    CHECK(verify_certificate(relabel, b.ds.map, b.ds.hash).predicate == "mode_label");
  }
}

TEST_CASE("sweeps") {
  auto& b = braid();
  CertifyOptions o = opts(128);
  auto same = sweep({{11, 35}, {0, 0}, 0, 2}, *b.omega, b.ds.hash, b.model, b.P, o);
  REQUIRE(same.size() == 3);
  for (const auto& row : same) {
    CHECK(row.status == same[0].status);
    CHECK(row.K == same[0].K);
    CHECK(row.bound == same[0].bound);
    CHECK(row.normalized == same[0].normalized);
  }
  // (2, 8) + j (0, 2): index 1 gives (2, 10) -> (1, 5).
  auto red = sweep({{2, 8}, {0, 2}, 0, 1}, *b.omega, b.ds.hash, b.model, b.P, o);
  CHECK(red[1].requested == IntVec{2, 10});
  CHECK(red[1].alpha == IntVec{1, 5});
  CHECK(red[1].n == 5);
  auto ext = sweep({{5, 1}, {1, 0}, 0, 0}, *b.omega, b.ds.hash, b.model, b.P, o);
  CHECK(ext[0].status == "exterior");

  SweepSpec spec{{1, 4}, {10, 31}, 1, 6};
  auto one = sweep(spec, *b.omega, b.ds.hash, b.model, b.P, o);
  o.threads = 4;
  auto four = sweep(spec, *b.omega, b.ds.hash, b.model, b.P, o);
  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].alpha == four[i].alpha);
    CHECK(one[i].K == four[i].K);
    CHECK(one[i].deep_dist2 == four[i].deep_dist2);
    CHECK(one[i].normalized == four[i].normalized);
    CHECK(one[i].covol2 == Integer(one[i].n) * Integer(one[i].n));
  }
}

TEST_CASE("normalized bound rendering") {
  CHECK(normalized_bound(Rational(2, 315), 35, 1) == "7.77777777778");
  CHECK(normalized_bound(Rational(1, 8), 16, 2) == "8");
  CHECK(normalized_bound(Rational(1, 2), 2, 2) == "1.41421356237");
}

}  // TEST_SUITE
