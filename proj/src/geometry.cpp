#include "conebound/geometry.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include "conebound/errors.hpp"

namespace conebound {

namespace {

using i128 = __int128;

i128 cross(const IntVec& o, const IntVec& a, const IntVec& b) {
  return static_cast<i128>(a[0] - o[0]) * (b[1] - o[1]) -
         static_cast<i128>(a[1] - o[1]) * (b[0] - o[0]);
}

Rational rcross(const RatVec& o, const RatVec& a, const RatVec& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

void require_rank(std::size_t rank) {
  if (rank > 2)
    throw CapabilityError("convex geometry is implemented for rank 1 and 2 only (rank " +
                          std::to_string(rank) + " requested)");
}

template <class P, class Cross>
std::vector<P> monotone_chain(std::vector<P> pts, Cross cr) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 1) return pts;
  std::vector<P> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && !(cr(h[k - 2], h[k - 1], pts[i]) > 0)) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && !(cr(h[k - 2], h[k - 1], pts[i]) > 0)) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

std::vector<IntVec> axes_of(const Polytope& p) {
  std::vector<IntVec> axes;
  const auto& v = p.vertices;
  if (p.rank != 2) return axes;
  for (std::size_t i = 0; i < v.size() && v.size() > 1; ++i) {
    const IntVec& a = v[i];
    const IntVec& b = v[(i + 1) % v.size()];
    std::int64_t dx = b[0] - a[0], dy = b[1] - a[1];
    axes.push_back({dy, -dx});
    axes.push_back({dx, dy});
  }
  return axes;
}

std::pair<i128, i128> project(const Polytope& p, const IntVec& u) {
  i128 lo = std::numeric_limits<i128>::max(), hi = std::numeric_limits<i128>::min();
  for (const auto& v : p.vertices) {
    i128 d = 0;
    for (std::size_t k = 0; k < v.size(); ++k) d += static_cast<i128>(u[k]) * v[k];
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

Integer to_integer(i128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  Integer hi(static_cast<unsigned long>(u >> 64)), lo(static_cast<unsigned long>(u & ~0ULL));
  Integer r = (hi << 64) + lo;
  return neg ? Integer(-r) : r;
}

}  // namespace

std::vector<IntVec> convex_hull(std::vector<IntVec> points, std::size_t rank) {
  require_rank(rank);
  if (points.empty()) return {};
  for (const auto& p : points)
    if (p.size() != rank) throw ValidationError("point of wrong dimension in convex hull");
  if (rank == 1) {
    auto [mn, mx] = std::minmax_element(points.begin(), points.end());
    if (*mn == *mx) return {*mn};
    return {*mn, *mx};
  }
  return monotone_chain(std::move(points), [](const IntVec& o, const IntVec& a, const IntVec& b) {
    return cross(o, a, b);
  });
}

Polytope make_polytope(std::vector<IntVec> points, std::size_t rank) {
  Polytope p;
  p.rank = rank;
  p.vertices = convex_hull(std::move(points), rank);
  if (p.vertices.empty()) throw InternalError("empty polytope");
  return p;
}

Polytope translate(const Polytope& p, const IntVec& x) {
  Polytope q = p;
  for (auto& v : q.vertices)
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += x[k];
  return q;
}

Polytope negate(const Polytope& p) {
  std::vector<IntVec> pts = p.vertices;
  for (auto& v : pts)
    for (auto& c : v) c = -c;
  return make_polytope(std::move(pts), p.rank);
}

Polytope dilate(const Polytope& p, std::int64_t s) {
  if (s == 0) return p;
  std::vector<IntVec> pts;
  const std::size_t r = p.rank;
  for (const auto& v : p.vertices)
    for (std::size_t mask = 0; mask < (std::size_t{1} << r); ++mask) {
      IntVec w = v;
      for (std::size_t k = 0; k < r; ++k) w[k] += (mask >> k & 1) ? s : -s;
      pts.push_back(std::move(w));
    }
  return make_polytope(std::move(pts), r);
}

std::pair<IntVec, IntVec> bounding_box(const Polytope& p) {
  IntVec lo = p.vertices.front(), hi = lo;
  for (const auto& v : p.vertices)
    for (std::size_t k = 0; k < v.size(); ++k) {
      lo[k] = std::min(lo[k], v[k]);
      hi[k] = std::max(hi[k], v[k]);
    }
  return {lo, hi};
}

bool inside_box(const Polytope& p, std::int64_t radius) {
  auto [lo, hi] = bounding_box(p);
  for (std::size_t k = 0; k < lo.size(); ++k)
    if (lo[k] < -radius || hi[k] > radius) return false;
  return true;
}

bool contains(const Polytope& p, const IntVec& y) {
  return squared_distance_fraction(y, p).num == 0;
}

Rational Fraction::to_rational() const { return make_rational(to_integer(num), to_integer(den)); }

Fraction squared_distance_fraction(const IntVec& y, const Polytope& p) {
  const auto& v = p.vertices;
  if (p.rank == 1) {
    std::int64_t lo = v.front()[0], hi = v.back()[0];
    i128 d = y[0] < lo ? lo - y[0] : (y[0] > hi ? y[0] - hi : 0);
    return {d * d, 1};
  }
  require_rank(p.rank);
  auto point2 = [&](const IntVec& a) {
    i128 dx = y[0] - a[0], dy = y[1] - a[1];
    return dx * dx + dy * dy;
  };
  if (v.size() == 1) return {point2(v[0]), 1};
  if (v.size() >= 3) {
    bool inside = true;
    for (std::size_t i = 0; i < v.size() && inside; ++i)
      if (cross(v[i], v[(i + 1) % v.size()], y) < 0) inside = false;
    if (inside) return {0, 1};
  }
  Fraction best{-1, 1};
  std::size_t n_edges = v.size() == 2 ? 1 : v.size();
  for (std::size_t i = 0; i < n_edges; ++i) {
    const IntVec& a = v[i];
    const IntVec& b = v[(i + 1) % v.size()];
    i128 dx = b[0] - a[0], dy = b[1] - a[1];
    i128 wx = y[0] - a[0], wy = y[1] - a[1];
    i128 t = wx * dx + wy * dy, len2 = dx * dx + dy * dy;
    Fraction d;
    if (t <= 0) d = {wx * wx + wy * wy, 1};
    else if (t >= len2) d = {point2(b), 1};
    else {
      i128 c = wx * dy - wy * dx;
      d = {c * c, len2};
    }
    if (best.num < 0 || d < best) best = d;
  }
  return best;
}

Rational squared_distance(const IntVec& y, const Polytope& p) {
  return squared_distance_fraction(y, p).to_rational();
}

bool intersects(const Polytope& a, const Polytope& b) {
  if (a.rank != b.rank) throw ValidationError("rank mismatch in intersection test");
  require_rank(a.rank);
  std::vector<IntVec> axes = axes_of(a);
  auto more = axes_of(b);
  axes.insert(axes.end(), more.begin(), more.end());
  for (std::size_t k = 0; k < a.rank; ++k) {
    IntVec e(a.rank, 0);
    e[k] = 1;
    axes.push_back(std::move(e));
  }
  if (a.rank == 2 && a.vertices.size() == 1 && b.vertices.size() == 1)
    axes.push_back({b.vertices[0][0] - a.vertices[0][0], b.vertices[0][1] - a.vertices[0][1]});
  for (const auto& u : axes) {
    auto [alo, ahi] = project(a, u);
    auto [blo, bhi] = project(b, u);
    if (ahi < blo || bhi < alo) return false;
  }
  return true;
}

Rational hausdorff2(const Polytope& a, const Polytope& b) {
  Rational h = 0;
  for (const auto& v : a.vertices) h = std::max(h, squared_distance(v, b));
  for (const auto& v : b.vertices) h = std::max(h, squared_distance(v, a));
  return h;
}

std::vector<RatVec> rational_hull(std::vector<RatVec> points, std::size_t rank) {
  require_rank(rank);
  if (points.empty()) return {};
  if (rank == 1) {
    auto [mn, mx] = std::minmax_element(points.begin(), points.end());
    if (*mn == *mx) return {*mn};
    return {*mn, *mx};
  }
  return monotone_chain(std::move(points), rcross);
}

std::vector<RatVec> halfspace_vertices(const std::vector<Halfspace>& hs, std::size_t rank) {
  require_rank(rank);
  auto feasible = [&](const RatVec& x) {
    for (const auto& h : hs)
      if (dot(x, h.normal) > h.offset) return false;
    return true;
  };
  if (rank == 1) {
    std::optional<Rational> lo, hi;
    for (const auto& h : hs) {
      std::int64_t n = h.normal[0];
      if (n == 0) {
        if (h.offset < 0) throw ValidationError("empty halfspace intersection");
        continue;
      }
      Rational b = h.offset / Rational(n);
      if (n > 0) hi = hi ? std::min(*hi, b) : b;
      else lo = lo ? std::max(*lo, b) : b;
    }
    if (!lo || !hi) throw ValidationError("unbounded halfspace intersection");
    if (*lo > *hi) throw ValidationError("empty halfspace intersection");
    return rational_hull({{*lo}, {*hi}}, 1);
  }
  for (const auto& h : hs) {
    for (int sgn : {1, -1}) {
      IntVec d{-sgn * h.normal[1], sgn * h.normal[0]};
      if (d[0] == 0 && d[1] == 0) continue;
      bool recedes = true;
      for (const auto& g : hs) recedes &= dot(g.normal, d) <= 0;
      if (recedes) throw ValidationError("unbounded halfspace intersection");
    }
  }
  std::vector<RatVec> cand;
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (std::size_t j = i + 1; j < hs.size(); ++j) {
      const auto &a = hs[i].normal, &b = hs[j].normal;
      std::int64_t det = a[0] * b[1] - a[1] * b[0];
      if (det == 0) continue;
      RatVec x{(hs[i].offset * b[1] - hs[j].offset * a[1]) / Rational(det),
               (a[0] * hs[j].offset - b[0] * hs[i].offset) / Rational(det)};
      if (feasible(x)) cand.push_back(std::move(x));
    }
  if (cand.empty()) throw ValidationError("empty or unbounded halfspace intersection");
  return rational_hull(std::move(cand), 2);
}

Rational squared_distance(const RatVec& y, const std::vector<RatVec>& v) {
  if (v.empty()) throw InternalError("distance to empty polytope");
  if (y.size() == 1) {
    Rational lo = v.front()[0], hi = v.back()[0];
    Rational d = y[0] < lo ? lo - y[0] : (y[0] > hi ? y[0] - hi : Rational(0));
    return d * d;
  }
  auto point2 = [&](const RatVec& a) -> Rational {
    Rational dx = y[0] - a[0], dy = y[1] - a[1];
    return dx * dx + dy * dy;
  };
  if (v.size() == 1) return point2(v[0]);
  if (v.size() >= 3 && contains(v, y)) return 0;
  std::optional<Rational> best;
  std::size_t n_edges = v.size() == 2 ? 1 : v.size();
  for (std::size_t i = 0; i < n_edges; ++i) {
    const RatVec& a = v[i];
    const RatVec& b = v[(i + 1) % v.size()];
    Rational dx = b[0] - a[0], dy = b[1] - a[1], wx = y[0] - a[0], wy = y[1] - a[1];
    Rational t = wx * dx + wy * dy, len2 = dx * dx + dy * dy;
    Rational d;
    if (t <= 0) d = wx * wx + wy * wy;
    else if (t >= len2) d = point2(b);
    else {
      Rational c = wx * dy - wy * dx;
      d = c * c / len2;
    }
    if (!best || d < *best) best = d;
  }
  return *best;
}

bool contains(const std::vector<RatVec>& v, const RatVec& y) {
  if (y.size() == 1) return v.front()[0] <= y[0] && y[0] <= v.back()[0];
  if (v.size() < 3) return squared_distance(y, v) == 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (rcross(v[i], v[(i + 1) % v.size()], y) < 0) return false;
  return true;
}

Rational hausdorff2(const Polytope& a, const std::vector<RatVec>& b) {
  Rational h = 0;
  std::vector<RatVec> av;
  for (const auto& v : a.vertices) {
    RatVec rv;
    for (auto c : v) rv.emplace_back(static_cast<long>(c));
    h = std::max(h, squared_distance(rv, b));
    av.push_back(std::move(rv));
  }
  for (const auto& v : b) h = std::max(h, squared_distance(v, av));
  return h;
}

}  // namespace conebound
