#include "conebound/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <thread>

#include "conebound/errors.hpp"
#include "conebound/io.hpp"

namespace conebound {

namespace {

RatVec sigma_of(const IntVec& alpha) {
  RatVec s;
  for (std::size_t i = 0; i + 1 < alpha.size(); ++i) s.push_back(make_rational(alpha[i], alpha.back()));
  return s;
}

Polytope box_polytope(std::int64_t R, std::size_t rank) {
  if (rank == 1) return make_polytope({{-R}, {R}}, 1);
  return make_polytope({{-R, -R}, {R, -R}, {R, R}, {-R, R}}, 2);
}

Integer lcm_of_dens(const RatVec& v) {
  Integer l = 1;
  for (const auto& c : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  return l;
}

IntVec scaled_integer(const RatVec& v, const Integer& by) {
  IntVec out;
  for (const auto& c : v) {
    Rational t = c * Rational(by);
    out.push_back(to_int64(t.get_num()));
  }
  return out;
}

Rational from_int(std::int64_t v) { return Rational(Integer(std::to_string(v))); }

// Largest slack <u, sign w> - A k over the hull of a support at power k.
std::int64_t slack_of(const ConeBound& cone, const Polytope& hull, std::uint64_t k, int sign) {
  Rational worst = 0;
  for (const auto& f : cone.facets)
    for (const auto& v : hull.vertices) {
      Rational s = from_int(sign * dot(f.normal, v)) - f.slope * Rational(static_cast<unsigned long>(k));
      if (s > worst) worst = s;
    }
  return to_int64(ceil_of(worst));
}

bool is_zero(const IntVec& v) {
  return std::all_of(v.begin(), v.end(), [](auto x) { return x == 0; });
}

}  // namespace

Decomposition decompose(const IntVec& alpha, const FiberedConeModel& cone) {
  if (alpha.size() != cone.rank + 1)
    throw ValidationError("alpha: " + to_string(alpha) + " has length " + std::to_string(alpha.size()) +
                          ", expected " + std::to_string(cone.rank + 1));
  Decomposition d;
  d.lattice = perp_basis(alpha);
  d.n = alpha.back();
  d.membership = cone_membership(alpha, cone);
  if (d.membership.verdict != Verdict::interior || d.n < 1)
    throw ValidationError("alpha: " + to_string(alpha) + " is " + to_string(d.membership.verdict) +
                          " (margin " + to_string(d.membership.margin) + ", threshold " +
                          to_string(d.membership.threshold) + ")");
  return d;
}

std::vector<GammaWord> enumerate_words(const PerpLattice& L, const Integer& radius2) {
  std::vector<GammaWord> out;
  const std::size_t r = L.rank();
  for (auto& c : enumerate_ball(L.projected, radius2)) {
    GammaWord w;
    IntVec full(r + 1, 0);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j <= r; ++j) full[j] += c[i] * L.basis[i][j];
    w.coefficients = std::move(c);
    w.x.assign(full.begin(), full.end() - 1);
    w.y = full.back();
    w.action = -w.y;
    out.push_back(std::move(w));
  }
  return out;
}

Integer truncation_radius2(const ConeBound& cone, const RatVec& sigma, std::int64_t R, std::int64_t s) {
  const std::size_t r = sigma.size();
  Integer best = Integer(r) * Integer(R) * Integer(R);
  for (std::int64_t C : {cone.C, cone.C_negative}) {
    // Words with <sigma, x> >= 0 whose obstacle can reach the (R + s)-box; the other sign
    // is the mirror image of the same region.
    std::vector<Halfspace> hs;
    if (!std::all_of(sigma.begin(), sigma.end(), [](const Rational& c) { return c == 0; })) {
      IntVec n = scaled_integer(sigma, lcm_of_dens(sigma));
      for (auto& c : n) c = -c;
      hs.push_back({n, Rational(0)});
    }
    for (const auto& f : cone.facets) {
      RatVec v;
      for (std::size_t i = 0; i < r; ++i) v.push_back(from_int(f.normal[i]) + f.slope * sigma[i]);
      Integer D = lcm_of_dens(v);
      IntVec n = scaled_integer(v, D);
      for (auto& c : n) c = -c;
      hs.push_back({n, Rational(D) * from_int((R + s) * norm1(f.normal) + C)});
    }
    for (const auto& v : halfspace_vertices(hs, r)) {
      Rational n2 = 0;
      for (const auto& c : v) n2 += c * c;
      Integer up = ceil_of(n2);
      if (up > best) best = up;
    }
  }
  return best;
}

std::int64_t search_radius(std::int64_t R, std::size_t rank) {
  Rational root = sqrt_upper(Rational(static_cast<unsigned long>(rank)), 32);
  return std::max<std::int64_t>(1, to_int64(floor_of(from_int(R) / (1 + root))));
}

Polytope cone_approximation(const ConeBound& cone, const IntVec& x, std::int64_t action) {
  const std::size_t r = x.size();
  const int sign = action < 0 ? -1 : 1;
  const Rational k = from_int(action < 0 ? -action : action);
  std::vector<Halfspace> hs;
  for (const auto& f : cone.facets)
    hs.push_back({f.normal, f.slope * k + from_int(sign > 0 ? cone.C : cone.C_negative)});
  auto verts = halfspace_vertices(hs, r);
  IntVec lo(r), hi(r);
  for (std::size_t i = 0; i < r; ++i) {
    Rational mn = verts.front()[i], mx = verts.front()[i];
    for (const auto& v : verts) {
      mn = std::min(mn, v[i]);
      mx = std::max(mx, v[i]);
    }
    if (sign < 0) std::swap(mn, mx), mn = -mn, mx = -mx;
    lo[i] = to_int64(floor_of(mn)) + x[i];
    hi[i] = to_int64(ceil_of(mx)) + x[i];
  }
  if (r == 1) return make_polytope({lo, hi}, 1);
  return make_polytope({lo, hi, {lo[0], hi[1]}, {hi[0], lo[1]}}, 2);
}

namespace {

struct Attempt {
  std::vector<GammaWord> words;
  Integer radius2;
  bool approximated = false;
  std::int64_t max_forward = 0, max_negative = 0;
};

Attempt collect_words(const PerpLattice& L, OmegaProvider& omega, const ConeBound& cone, const RatVec& sigma,
                      std::int64_t R, const CertifyOptions& opt) {
  Attempt a;
  a.radius2 = truncation_radius2(cone, sigma, R, opt.safety);
  const Polytope reach = box_polytope(R + opt.safety, L.rank());
  for (auto& w : enumerate_words(L, a.radius2)) {
    std::uint64_t k = static_cast<std::uint64_t>(w.action < 0 ? -w.action : w.action);
    if (k > opt.word_power_cap) {
      w.obstacle = cone_approximation(cone, w.x, w.action);
      w.source = OmegaSource::cone_approximation;
    } else {
      SupportPolytope s = omega_of_word(omega, w.x, w.action);
      w.obstacle = std::move(s.hull);
      w.source = s.source;
      if (w.action >= 0) a.max_forward = std::max<std::int64_t>(a.max_forward, w.action);
      else a.max_negative = std::max<std::int64_t>(a.max_negative, -w.action);
    }
    if (!intersects(w.obstacle, reach)) continue;
    a.approximated |= w.source == OmegaSource::cone_approximation;
    a.words.push_back(std::move(w));
  }
  return a;
}

std::uint64_t largest_power(OmegaProvider& omega, const IntVec& y, const std::vector<Polytope>& obstacles,
                            std::int64_t R, std::int64_t s, std::uint64_t p_max) {
  std::uint64_t K = 0;
  for (std::uint64_t k = 1; k <= p_max; ++k) {
    Polytope image = dilate(translate(omega.power(static_cast<std::int64_t>(k)).hull, y), s);
    if (!inside_box(image, R)) continue;
    bool clear = std::none_of(obstacles.begin(), obstacles.end(),
                              [&](const Polytope& o) { return intersects(image, o); });
    if (clear) K = k;
  }
  return K;
}

std::int64_t default_radius(std::int64_t n, std::size_t r, const Rational& kappa) {
  Rational root = r == 1 ? from_int(n) : sqrt_upper(from_int(n), 32);
  if (r > 2) throw CapabilityError("box radius defaults support rank 1 and 2 only");
  return std::max<std::int64_t>(1, to_int64(ceil_of(kappa * root)));
}

}  // namespace

BoundCertificate certify(const IntVec& alpha, OmegaProvider& omega, const std::string& dataset_hash,
                         const DualConeModel& model, const Subcone& P, const CertifyOptions& opt) {
  if (opt.p_max < 1) throw ValidationError("--p-max: must be at least 1");
  if (opt.safety < 0) throw ValidationError("--safety: must be nonnegative");
  if (opt.box_radius && *opt.box_radius < 1) throw ValidationError("--box-radius: must be at least 1");
  FiberedConeModel fc = fibered_cone(model);
  Decomposition d = decompose(alpha, fc);
  if (!subcone_contains(P, alpha))
    throw ValidationError("alpha: " + to_string(alpha) + " is not in subcone " + P.id);
  EpsilonResult eps = epsilon_of_subcone(P, model, fc);
  const std::size_t r = model.rank;
  const RatVec sigma = sigma_of(alpha);

  BoundCertificate cert;
  cert.format_version = kFormatVersion;
  cert.tool_version = kToolVersion;
  cert.dataset_hash = dataset_hash;
  cert.alpha = alpha;
  cert.n = d.n;
  cert.subcone_id = P.id;
  cert.p_max = opt.p_max;
  cert.safety = opt.safety;
  cert.epsilon = eps.epsilon;
  cert.word_power_cap = opt.word_power_cap;
  cert.use_inverse = omega.options().use_inverse;
  cert.allow_mirror = omega.options().allow_mirror;
  cert.cone_p_max = model.p_max;
  cert.basis = d.lattice.basis;
  cert.mode = opt.asymptotic ? "asymptotic" : "certified";

  // Fattening constants measured over every power the certificate will rely on.
  ConeBound cone{model.facets, model.C, 0};
  std::uint64_t fwd_seen = 0, neg_seen = 0;
  auto absorb = [&](std::uint64_t fwd_to, std::uint64_t neg_to) {
    bool changed = false;
    for (std::uint64_t k = fwd_seen; k <= fwd_to; ++k) {
      std::int64_t c = slack_of(cone, omega.power(static_cast<std::int64_t>(k)).hull, k, 1);
      if (c > cone.C) cone.C = c, changed = true;
    }
    fwd_seen = std::max(fwd_seen, fwd_to + 1);
    for (std::uint64_t k = std::max<std::uint64_t>(neg_seen, 1); k <= neg_to; ++k) {
      std::int64_t c = slack_of(cone, omega.power(-static_cast<std::int64_t>(k)).hull, k, -1);
      if (c > cone.C_negative) cone.C_negative = c, changed = true;
    }
    neg_seen = std::max(neg_seen, neg_to + 1);
    return changed;
  };
  absorb(std::max(model.p_max, opt.p_max), 0);

  std::int64_t R = opt.box_radius ? *opt.box_radius : default_radius(d.n, r, opt.kappa);
  const unsigned tries = opt.box_radius ? 1 : opt.max_doublings + 1;
  for (unsigned attempt = 0; attempt < tries; ++attempt, R *= 2) {
    Attempt a;
    do {
      a = collect_words(d.lattice, omega, cone, sigma, R, opt);
    } while (absorb(static_cast<std::uint64_t>(a.max_forward),
                    a.max_negative > 0 ? std::max<std::uint64_t>(a.max_negative, model.p_max) : 0));

    cert.box_radius = R;
    cert.truncation_radius2 = a.radius2;
    cert.cone = cone;
    cert.words = std::move(a.words);
    cert.diagnostics.clear();
    cert.deep_point.assign(r, 0);
    cert.deep_dist2 = 0;
    cert.K = 0;
    cert.bound = 0;
    cert.status = "inconclusive";
    if (a.approximated && !opt.asymptotic) {
      cert.diagnostics.push_back("a word near the box needs a power above the word power cap " +
                                 std::to_string(opt.word_power_cap) + "; rerun in asymptotic mode");
      return cert;
    }
    std::vector<Polytope> obstacles;
    for (const auto& w : cert.words) obstacles.push_back(dilate(w.obstacle, opt.safety));
    const std::int64_t Ry = search_radius(R, r);
    cert.search_radius = Ry;
    DeepPoint dp = deep_point(obstacles, Ry, dichotomy_seeds(d.lattice, Ry), opt.threads);
    cert.deep_point = dp.y;
    cert.deep_dist2 = dp.dist2.to_rational();
    if (cert.deep_dist2 == 0) {
      cert.diagnostics.push_back("box radius " + std::to_string(R) + " too small: every searched point meets an obstacle");
      continue;
    }
    cert.K = largest_power(omega, dp.y, obstacles, R, opt.safety, opt.p_max);
    if (cert.K == 0) {
      cert.diagnostics.push_back("no power up to p_max " + std::to_string(opt.p_max) +
                                 " keeps the image of the deep point inside box radius " + std::to_string(R) +
                                 " and clear of the obstacles");
      continue;
    }
    cert.bound = Rational(2) / (from_int(d.n) * Rational(static_cast<unsigned long>(cert.K)));
    cert.status = "ok";
    if (!a.approximated) cert.mode = "certified";
    return cert;
  }
  return cert;
}

std::string to_string(VerifyStatus s) {
  switch (s) {
    case VerifyStatus::pass: return "pass";
    case VerifyStatus::fail: return "fail";
    case VerifyStatus::unverifiable: return "unverifiable at budget";
  }
  return "fail";
}

namespace {

// Supports recomputed from the dataset only: literal substitution while it fits the budget,
// then a fresh propagation engine.
class FreshOmega {
 public:
  FreshOmega(const LiftedGraphMap& map, const BoundCertificate& cert, const VerifyOptions& opt)
      : map_(map), cert_(cert), opt_(opt) {}

  OmegaSource source_for(std::int64_t action) const {
    if (action >= 0) return OmegaSource::forward;
    if (cert_.use_inverse && map_.inverse_transition()) return OmegaSource::inverse_data;
    if (cert_.allow_mirror) return OmegaSource::mirror;
    throw ValidationError("negative power needs inverse data or mirror mode");
  }

  Polytope power(std::int64_t action) {
    std::uint64_t k = static_cast<std::uint64_t>(action < 0 ? -action : action);
    if (k > opt_.max_power) throw ResourceError("power " + std::to_string(k) + " above verification limit");
    switch (source_for(action)) {
      case OmegaSource::forward: return forward(k);
      case OmegaSource::mirror: return negate(forward(k));
      default: {
        if (!inverse_) inverse_ = std::make_unique<SupportEngine>(*map_.inverse_transition());
        return inverse_->hull(k);
      }
    }
  }

 private:
  Polytope forward(std::uint64_t k) {
    auto it = cache_.find(k);
    if (it != cache_.end()) return it->second;
    Polytope h;
    bool done = false;
    if (use_oracle_) {
      try {
        h = oracle_iterate(map_, k, opt_.oracle_budget).hull;
        done = true;
      } catch (const ResourceError&) {
        use_oracle_ = false;
      }
    }
    if (!done) {
      if (!engine_) engine_ = std::make_unique<SupportEngine>(map_.transition());
      h = engine_->hull(k);
    }
    return cache_.emplace(k, std::move(h)).first->second;
  }

  const LiftedGraphMap& map_;
  const BoundCertificate& cert_;
  VerifyOptions opt_;
  bool use_oracle_ = true;
  std::map<std::uint64_t, Polytope> cache_;
  std::unique_ptr<SupportEngine> engine_, inverse_;
};

VerifyResult fail(const std::string& predicate, const std::string& detail) {
  return {VerifyStatus::fail, predicate, detail};
}

VerifyResult check(const BoundCertificate& cert, const LiftedGraphMap& map, const std::string& hash,
                   const VerifyOptions& opt) {
  if (cert.dataset_hash != hash) return fail("hash", "certificate hash " + cert.dataset_hash + " != dataset " + hash);
  const std::size_t r = map.rank();
  if (cert.status != "ok") return fail("status", "certificate is " + cert.status + " and carries no bound");
  if (cert.alpha.size() != r + 1 || cert.n != cert.alpha.back() || cert.n < 1 || gcd_of(cert.alpha) != 1)
    return fail("basis", "alpha " + to_string(cert.alpha) + " is not a primitive class with n = last coordinate");
  if (cert.basis.size() != r || !is_saturated_kernel(cert.basis, cert.alpha))
    return fail("basis", "basis does not generate the kernel of alpha");
  PerpLattice L = with_basis(cert.alpha, cert.basis);
  const RatVec sigma = sigma_of(cert.alpha);
  const std::int64_t R = cert.box_radius, s = cert.safety;
  if (R < 1 || s < 0) return fail("box", "box radius or safety margin out of range");

  FreshOmega omega(map, cert, opt);

  // Ball words and the powers they need.
  auto ball = enumerate_words(L, cert.truncation_radius2);
  std::uint64_t fwd_to = std::max(cert.cone_p_max, cert.K), neg_to = 0;
  bool any_negative = false;
  for (const auto& w : ball) {
    std::uint64_t k = static_cast<std::uint64_t>(w.action < 0 ? -w.action : w.action);
    if (k > cert.word_power_cap) continue;
    if (w.action >= 0) fwd_to = std::max(fwd_to, k);
    else neg_to = std::max(neg_to, k), any_negative = true;
  }
  if (any_negative) neg_to = std::max(neg_to, cert.cone_p_max);

  for (std::uint64_t k = 0; k <= fwd_to; ++k)
    if (slack_of(cert.cone, omega.power(static_cast<std::int64_t>(k)), k, 1) > cert.cone.C)
      return fail("cone_model_contains_supports", "Omega at power " + std::to_string(k) + " leaves the C-fattened cone");
  for (std::uint64_t k = 1; k <= neg_to; ++k)
    if (slack_of(cert.cone, omega.power(-static_cast<std::int64_t>(k)), k, -1) > cert.cone.C_negative)
      return fail("cone_model_contains_supports",
                  "Omega at power -" + std::to_string(k) + " leaves the C-fattened cone");

  Integer needed = truncation_radius2(cert.cone, sigma, R, s);
  if (cert.truncation_radius2 < needed)
    return fail("word_list_complete", "truncation radius^2 " + to_string(cert.truncation_radius2) +
                                          " below required " + to_string(needed));
  std::set<IntVec> listed;
  for (const auto& w : cert.words) {
    if (!listed.insert(w.coefficients).second)
      return fail("word_list_complete", "word " + to_string(w.coefficients) + " listed twice");
  }
  const Polytope reach = box_polytope(R + s, r);
  bool approximated = false;
  std::map<IntVec, const GammaWord*> by_coeff;
  for (const auto& w : cert.words) by_coeff[w.coefficients] = &w;
  std::set<IntVec> in_ball;
  for (const auto& w : ball) {
    in_ball.insert(w.coefficients);
    std::uint64_t k = static_cast<std::uint64_t>(w.action < 0 ? -w.action : w.action);
    Polytope obstacle;
    OmegaSource src;
    if (k > cert.word_power_cap) {
      obstacle = cone_approximation(cert.cone, w.x, w.action);
      src = OmegaSource::cone_approximation;
    } else {
      obstacle = translate(omega.power(w.action), w.x);
      src = omega.source_for(w.action);
    }
    auto it = by_coeff.find(w.coefficients);
    if (it == by_coeff.end()) {
      if (intersects(obstacle, reach))
        return fail("word_list_complete", "omitted word " + to_string(w.coefficients) + " has an obstacle meeting the box");
      continue;
    }
    const GammaWord& c = *it->second;
    if (c.x != w.x || c.y != w.y || c.action != w.action || c.source != src || !(c.obstacle == obstacle))
      return fail("obstacle_matches", "word " + to_string(w.coefficients) + " does not match its recomputed obstacle");
    approximated |= src == OmegaSource::cone_approximation;
  }
  for (const auto& w : cert.words)
    if (!in_ball.count(w.coefficients))
      return fail("word_list_complete", "word " + to_string(w.coefficients) + " lies outside the truncation radius");

  std::vector<Polytope> obstacles;
  for (const auto& w : cert.words) obstacles.push_back(dilate(w.obstacle, s));
  const IntVec& y = cert.deep_point;
  if (y.size() != r || std::any_of(y.begin(), y.end(), [&](auto v) { return v < -R || v > R; }))
    return fail("deep_point_inside_box", "deep point " + to_string(y) + " outside [-R, R]^r");
  if (obstacles.empty())
    return fail("deep_point_outside_obstacles", "no obstacles listed; the identity word is missing");
  Fraction dist = min_distance2(y, obstacles);
  if (dist.num == 0)
    return fail("deep_point_outside_obstacles", "deep point " + to_string(y) + " meets an obstacle");
  if (dist.to_rational() != cert.deep_dist2)
    return fail("deep_point_outside_obstacles", "recorded distance^2 " + to_string(cert.deep_dist2) +
                                                    " != recomputed " + to_string(dist.to_rational()));
  {
    auto with_y = L.projected;
    with_y.push_back(y);
    if (hermite_normal_form(with_y) == hermite_normal_form(L.projected))
      return fail("deep_point_not_in_projected_lattice", "deep point " + to_string(y) + " lies in zeta(Gamma)");
  }
  if (cert.K < 1 || cert.K > cert.p_max)
    return fail("power_within_p_max", "K = " + std::to_string(cert.K) + " outside [1, p_max]");
  Polytope image = dilate(translate(omega.power(static_cast<std::int64_t>(cert.K)), y), s);
  if (!inside_box(image, R)) return fail("image_inside_box", "image at power K leaves the box");
  for (std::size_t i = 0; i < obstacles.size(); ++i)
    if (intersects(image, obstacles[i]))
      return fail("image_disjoint_from_obstacles",
                  "image at power K meets the obstacle of word " + to_string(cert.words[i].coefficients));
  Rational expect = Rational(2) / (from_int(cert.n) * Rational(static_cast<unsigned long>(cert.K)));
  if (cert.bound != expect)
    return fail("bound_value", "bound " + to_string(cert.bound) + " != 2/(nK) = " + to_string(expect));
  if (cert.mode != "certified" && cert.mode != "asymptotic")
    return fail("mode_label", "unknown mode " + cert.mode);
  if (approximated && cert.mode == "certified")
    return fail("mode_label", "certified certificate uses a cone approximation");
  return {};
}

}  // namespace

VerifyResult verify_certificate(const BoundCertificate& cert, const LiftedGraphMap& map,
                                const std::string& dataset_hash, const VerifyOptions& options) {
  try {
    return check(cert, map, dataset_hash, options);
  } catch (const ResourceError& e) {
    return {VerifyStatus::unverifiable, "budget", e.what()};
  } catch (const ValidationError& e) {
    return fail("certificate", e.what());
  }
}

std::string normalized_bound(const Rational& bound, std::int64_t n, std::size_t rank, int digits) {
  Rational v = bound * from_int(n);
  if (rank == 1) v *= from_int(n);
  else if (rank == 2) v *= sqrt_lower(from_int(n), 200);
  else throw CapabilityError("normalized bound supports rank 1 and 2 only");
  return to_decimal(v, digits);
}

std::vector<SweepRow> sweep(const SweepSpec& spec, OmegaProvider& omega, const std::string& dataset_hash,
                            const DualConeModel& model, const Subcone& P, const CertifyOptions& options) {
  const std::size_t r = model.rank;
  if (spec.base.size() != r + 1 || spec.direction.size() != r + 1)
    throw ValidationError("sweep: base and direction need length " + std::to_string(r + 1));
  if (spec.last < spec.first) throw ValidationError("sweep: empty index range");
  FiberedConeModel fc = fibered_cone(model);
  std::vector<SweepRow> rows(static_cast<std::size_t>(spec.last - spec.first + 1));
  CertifyOptions inner = options;
  inner.threads = 1;

  auto run = [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.index = spec.first + static_cast<std::int64_t>(i);
    for (std::size_t c = 0; c <= r; ++c) row.requested.push_back(spec.base[c] + row.index * spec.direction[c]);
    if (is_zero(row.requested)) {
      row.status = "error: zero class";
      return;
    }
    std::int64_t g = gcd_of(row.requested);
    for (auto v : row.requested) row.alpha.push_back(v / g);
    row.n = row.alpha.back();
    try {
      Membership m = cone_membership(row.alpha, fc);
      if (m.verdict != Verdict::interior || row.n < 1) {
        row.status = to_string(m.verdict == Verdict::interior ? Verdict::exterior : m.verdict);
        return;
      }
      if (!subcone_contains(P, row.alpha)) {
        row.status = "outside-subcone";
        return;
      }
      PerpLattice L = perp_basis(row.alpha);
      row.covol2 = L.covol2;
      row.systole2 = systole(L).length2;
      BoundCertificate cert = certify(row.alpha, omega, dataset_hash, model, P, inner);
      row.deep_dist2 = cert.deep_dist2;
      row.K = cert.K;
      row.bound = cert.bound;
      row.status = cert.status;
      row.truncation_limited = cert.K == options.p_max;
      if (cert.status == "ok") row.normalized = normalized_bound(cert.bound, row.n, r);
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
  };

  unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(rows.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < rows.size();) run(i);
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

}  // namespace conebound
