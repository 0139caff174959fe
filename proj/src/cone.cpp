#include "conebound/cone.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "conebound/errors.hpp"

namespace conebound {

namespace {

IntVec primitive(IntVec v) {
  std::int64_t g = gcd_of(v);
  if (g > 1)
    for (auto& x : v) x /= g;
  return v;
}

// Smallest positive integer multiple of a rational vector, made primitive.
IntVec integer_ray(const RatVec& v) {
  Integer l = 1;
  for (const auto& c : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  IntVec out;
  for (const auto& c : v) out.push_back(to_int64(c.get_num() * (l / c.get_den())));
  return primitive(out);
}

std::vector<IntVec> candidate_normals(const std::vector<IntVec>& hull, std::size_t rank) {
  if (rank == 1) return {{1}, {-1}};
  std::vector<IntVec> out;
  if (hull.size() == 1) return {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  if (hull.size() == 2) {
    IntVec d = primitive({hull[1][0] - hull[0][0], hull[1][1] - hull[0][1]});
    return {{d[1], -d[0]}, {-d[1], d[0]}, d, {-d[0], -d[1]}};
  }
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const IntVec& a = hull[i];
    const IntVec& b = hull[(i + 1) % hull.size()];
    out.push_back(primitive({b[1] - a[1], -(b[0] - a[0])}));
  }
  return out;
}

std::vector<Halfspace> slice_halfspaces(const std::vector<Facet>& facets) {
  std::vector<Halfspace> hs;
  for (const auto& f : facets) hs.push_back({f.normal, f.slope});
  return hs;
}

Rational l1(const IntVec& v) { return Rational(static_cast<long>(norm1(v))); }

Rational norm_upper(const RatVec& v) {
  Rational s = 0;
  for (const auto& c : v) s += c * c;
  return sqrt_upper(s);
}

}  // namespace

DualConeModel estimate_dual_cone(const LiftedGraphMap& map, std::uint64_t p_max) {
  SupportEngine engine(map.transition());
  return estimate_dual_cone(map, engine, p_max);
}

DualConeModel estimate_dual_cone(const LiftedGraphMap& map, SupportEngine& engine, std::uint64_t p_max) {
  return estimate_dual_cone(map.transition(), map.report().k0, engine, p_max);
}

DualConeModel estimate_dual_cone(const LaurentMatrix& M, std::optional<std::uint64_t> k0,
                                 SupportEngine& engine, std::uint64_t p_max) {
  if (p_max < 1) throw ValidationError("--p-max: must be at least 1");
  DualConeModel model;
  model.rank = M.rank();
  model.p_max = p_max;
  model.k0 = k0;

  // Every elementary cycle has length <= m, so at a multiple of lcm(1..m) the trace
  // support spans exactly p Q.
  std::uint64_t L = 1;
  for (std::uint64_t k = 2; k <= M.dim(); ++k) L = std::lcm(L, k);
  model.facet_power = p_max >= L ? (p_max / L) * L : p_max;
  model.low_confidence = p_max < L || !model.k0 || p_max < *model.k0;

  CharPolySeries series(M, p_max);
  const LaurentMatrix& power = series.power(model.facet_power);
  LaurentPoly trace(M.rank());
  for (std::size_t i = 0; i < M.dim(); ++i) trace += power.at(i, i);
  if (trace.is_zero()) throw InternalError("trace of the transition power is zero");
  auto normals = candidate_normals(convex_hull(trace.support(), model.rank), model.rank);

  for (const auto& u : normals) {
    SlopeEstimate s = series.slope(u);
    model.facets.push_back({u, s.upper, s.lower});
  }
  model.slice = halfspace_vertices(slice_halfspaces(model.facets), model.rank);
  model.degenerate = model.slice.size() < model.rank + 1;

  if (model.rank == 2 && !model.degenerate) {
    std::vector<Facet> kept;
    for (const auto& f : model.facets) {
      int on = 0;
      for (const auto& v : model.slice) on += dot(v, f.normal) == f.slope;
      if (on >= 2) kept.push_back(f);
    }
    model.facets = std::move(kept);
  }

  model.axis_interior = !model.degenerate;
  for (const auto& f : model.facets) model.axis_interior &= f.slope > 0;

  std::uint64_t window = model.k0.value_or(1);
  Polytope hk = engine.hull(window);
  for (const auto& f : model.facets) {
    std::int64_t hi = dot(f.normal, hk.vertices.front()), lo = hi;
    for (const auto& v : hk.vertices) {
      hi = std::max(hi, dot(f.normal, v));
      lo = std::min(lo, dot(f.normal, v));
    }
    model.C = std::max(model.C, hi - lo);
  }
  for (std::uint64_t p = 0; p <= p_max; ++p) model.support_hulls.push_back(engine.hull(p));
  return model;
}

bool within_fattened_cone(const DualConeModel& model, const Polytope& support, std::uint64_t p) {
  for (const auto& f : model.facets)
    for (const auto& v : support.vertices)
      if (Rational(static_cast<long>(dot(f.normal, v))) > f.slope * static_cast<long>(p) + model.C) return false;
  return true;
}

std::vector<RatVec> scaled_slice(const DualConeModel& model, const Rational& p) {
  std::vector<RatVec> out = model.slice;
  for (auto& v : out)
    for (auto& c : v) c *= p;
  return out;
}

FiberedConeModel fibered_cone(const DualConeModel& model, Rational tolerance) {
  FiberedConeModel cone;
  cone.rank = model.rank;
  cone.tolerance = tolerance;
  cone.C = model.C;
  for (const auto& v : model.slice) {
    RatVec w = v;
    w.emplace_back(1);
    cone.dual_rays.push_back(integer_ray(w));
  }
  return cone;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::interior: return "interior";
    case Verdict::exterior: return "exterior";
    case Verdict::near_boundary: return "near-boundary";
  }
  return "interior";
}

Membership cone_membership(const IntVec& alpha, const FiberedConeModel& cone) {
  if (alpha.size() != cone.rank + 1)
    throw ValidationError("class " + to_string(alpha) + " has length " + std::to_string(alpha.size()) +
                          ", expected rank + 1 = " + std::to_string(cone.rank + 1));
  Membership m;
  m.C = cone.C;
  bool first = true;
  for (const auto& w : cone.dual_rays) {
    Rational s = Rational(static_cast<long>(dot(alpha, w))) / l1(w);
    if (first || s < m.margin) m.margin = s;
    first = false;
  }
  m.threshold = cone.tolerance * l1(alpha);
  if (m.margin >= m.threshold && m.margin > 0) m.verdict = Verdict::interior;
  else if (m.margin <= -m.threshold && m.margin < 0) m.verdict = Verdict::exterior;
  else m.verdict = Verdict::near_boundary;
  return m;
}

Subcone shrunken_subcone(const FiberedConeModel& cone, const Rational& mu) {
  if (mu <= 0 || mu >= 1) throw ValidationError("--margin: shrinkage must lie strictly between 0 and 1");
  std::vector<Halfspace> hs;
  for (const auto& w : cone.dual_rays) {
    IntVec n(w.begin(), w.end() - 1);
    for (auto& c : n) c = -c;
    hs.push_back({n, Rational(static_cast<long>(w.back()))});
  }
  Subcone P;
  P.rank = cone.rank;
  P.id = "shrink:" + to_string(mu);
  P.slice = halfspace_vertices(hs, cone.rank);
  for (auto& v : P.slice)
    for (auto& c : v) c *= (1 - mu);
  return P;
}

Subcone subcone_from_rays(const std::vector<IntVec>& rays) {
  if (rays.empty()) throw ValidationError("--subcone: no rays given");
  Subcone P;
  P.rank = rays.front().size() - 1;
  std::ostringstream id;
  id << "rays:";
  std::vector<RatVec> sig;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const auto& r = rays[i];
    if (r.size() != P.rank + 1) throw ValidationError("--subcone: rays have inconsistent length");
    if (r.back() <= 0) throw ValidationError("--subcone: ray " + to_string(r) + " needs positive last coordinate");
    RatVec s;
    for (std::size_t k = 0; k < P.rank; ++k) s.push_back(make_rational(r[k], r.back()));
    sig.push_back(std::move(s));
    id << (i ? ";" : "") << to_string(r);
  }
  P.id = id.str();
  P.slice = rational_hull(std::move(sig), P.rank);
  return P;
}

bool subcone_contains(const Subcone& P, const IntVec& alpha) {
  if (alpha.size() != P.rank + 1 || alpha.back() <= 0) return false;
  RatVec s;
  for (std::size_t k = 0; k < P.rank; ++k) s.push_back(make_rational(alpha[k], alpha.back()));
  return contains(P.slice, s);
}

Rational subcone_margin(const Subcone& P, const FiberedConeModel& cone) {
  std::optional<Rational> worst;
  for (const auto& s : P.slice) {
    RatVec g = s;
    g.emplace_back(1);
    IntVec gi = integer_ray(g);
    Membership m = cone_membership(gi, cone);
    Rational v = m.margin / l1(gi);
    if (!worst || v < *worst) worst = v;
  }
  return *worst;
}

EpsilonResult epsilon_of_subcone(const Subcone& P, const DualConeModel& model,
                                 const FiberedConeModel& cone) {
  Rational margin = subcone_margin(P, cone);
  if (margin <= 0)
    throw ValidationError("subcone is not strictly inside the fibered cone (margin " + to_string(margin) + ")");
  EpsilonResult res;
  res.degenerate = P.slice.size() == 1;
  const auto& Q = model.slice;

  if (model.rank == 1) {
    std::optional<Rational> lo, hi;
    for (const auto& s : P.slice)
      for (const auto& z : Q) {
        Rational v = 1 + s[0] * z[0];
        if (!lo || v < *lo) lo = v;
        if (!hi || v > *hi) hi = v;
      }
    res.epsilon = std::min<Rational>({*lo, Rational(1 / *hi), Rational(1)});
    return res;
  }
  if (model.rank != 2) throw CapabilityError("epsilon_of_subcone supports rank 1 and 2 only");

  Rational S = 0, Z = 0;
  for (const auto& s : P.slice) S = std::max(S, norm_upper(s));
  for (const auto& z : Q) Z = std::max(Z, norm_upper(z));
  const Rational lip = 1 + S * Z;

  // Unit vectors w(t) = ((1-t^2)/(1+t^2), 2t/(1+t^2)), t = k/K, and their negatives,
  // ordered around the circle.
  const long K = 1024;
  std::vector<RatVec> circle;
  for (long k = -K; k <= K; ++k) {
    Rational t(k, K), d = 1 + t * t;
    circle.push_back({(1 - t * t) / d, 2 * t / d});
  }
  for (long k = -K; k <= K; ++k) circle.push_back({-circle[static_cast<std::size_t>(k + K)][0], -circle[static_cast<std::size_t>(k + K)][1]});

  auto g_lower = [&](const RatVec& w) -> Rational {
    Rational tmin, tmax;
    bool first = true;
    for (const auto& s : P.slice) {
      Rational t = s[0] * w[0] + s[1] * w[1];
      if (first || t < tmin) tmin = t;
      if (first || t > tmax) tmax = t;
      first = false;
    }
    std::vector<RatVec> pts;
    for (const auto& z : Q) {
      pts.push_back({w[0] + tmin * z[0], w[1] + tmin * z[1]});
      pts.push_back({w[0] + tmax * z[0], w[1] + tmax * z[1]});
    }
    return sqrt_lower(squared_distance(RatVec{Rational(0), Rational(0)}, rational_hull(pts, 2)));
  };

  std::vector<Rational> g;
  for (const auto& w : circle) g.push_back(g_lower(w));
  std::optional<Rational> low;
  for (std::size_t i = 0; i + 1 < circle.size(); ++i) {
    Rational dx = circle[i + 1][0] - circle[i][0], dy = circle[i + 1][1] - circle[i][1];
    Rational b = std::max(g[i], g[i + 1]) - lip * sqrt_upper(dx * dx + dy * dy);
    if (!low || b < *low) low = b;
  }
  if (*low <= 0)
    throw ValidationError("subcone too close to the fibered cone boundary for a certified epsilon");
  // Round down to a short fraction; still a lower bound.
  Rational eps = std::min<Rational>({*low, Rational(1 / lip), Rational(1)});
  Rational rounded = make_rational(floor_of(eps * 1000000), Integer(1000000));
  res.epsilon = rounded > 0 ? rounded : eps;
  return res;
}

}  // namespace conebound
