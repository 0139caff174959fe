#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>

namespace oracle {

std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(CONEBOUND_DATA_DIR) / name;
}

Dataset load(const std::string& name) { return load_dataset(data_path(name)); }

LaurentPoly naive_mul(const LaurentPoly& a, const LaurentPoly& b) {
  std::map<IntVec, Integer> acc;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      IntVec e = a.exponent(i);
      IntVec f = b.exponent(j);
      for (std::size_t k = 0; k < e.size(); ++k) e[k] += f[k];
      acc[e] += a.coeff(i) * b.coeff(j);
    }
  std::vector<std::pair<IntVec, Integer>> terms(acc.begin(), acc.end());
  return LaurentPoly::from_terms(a.rank(), terms);
}

LaurentMatrix naive_power(const LaurentMatrix& m, unsigned p) {
  LaurentMatrix r = LaurentMatrix::identity(m.dim(), m.rank());
  for (unsigned s = 0; s < p; ++s) {
    LaurentMatrix n(m.dim(), m.rank());
    for (std::size_t i = 0; i < m.dim(); ++i)
      for (std::size_t j = 0; j < m.dim(); ++j)
        for (std::size_t k = 0; k < m.dim(); ++k)
          n.at(i, j) = n.at(i, j) + naive_mul(r.at(i, k), m.at(k, j));
    r = n;
  }
  return r;
}

namespace {

using XPoly = std::vector<LaurentPoly>;  // ascending powers of x

XPoly xmul(const XPoly& a, const XPoly& b, std::size_t rank) {
  XPoly c(a.size() + b.size() - 1, LaurentPoly(rank));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = c[i + j] + naive_mul(a[i], b[j]);
  return c;
}

XPoly xadd(XPoly a, const XPoly& b, int sign, std::size_t rank) {
  if (a.size() < b.size()) a.resize(b.size(), LaurentPoly(rank));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = sign > 0 ? a[i] + b[i] : a[i] - b[i];
  return a;
}

XPoly cofactor(const std::vector<std::vector<XPoly>>& a, std::size_t rank) {
  std::size_t n = a.size();
  if (n == 1) return a[0][0];
  XPoly total{LaurentPoly(rank)};
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<XPoly>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<XPoly> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(a[i][k]);
      minor.push_back(row);
    }
    total = xadd(total, xmul(a[0][j], cofactor(minor, rank), rank), j % 2 == 0 ? 1 : -1, rank);
  }
  return total;
}

}  // namespace

std::vector<LaurentPoly> cofactor_charpoly(const LaurentMatrix& m) {
  std::size_t n = m.dim(), r = m.rank();
  std::vector<std::vector<XPoly>> a(n, std::vector<XPoly>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      a[i][j] = {m.at(i, j)};
      if (i == j) a[i][j].push_back(LaurentPoly::constant(r, -1));
    }
  XPoly d = cofactor(a, r);
  d.resize(n + 1, LaurentPoly(r));
  return d;
}

Rational gauss_det(std::vector<std::vector<Rational>> a) {
  std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      Rational f = a[i][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  return det;
}

std::set<IntVec> naive_support(const LaurentMatrix& m, unsigned p) {
  LaurentMatrix mp = naive_power(m, p);
  std::set<IntVec> out;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j)
      for (const auto& e : mp.at(i, j).support()) out.insert(e);
  return out;
}

LaurentPoly random_poly(std::mt19937_64& rng, std::size_t rank, int max_terms, int exp_range,
                        int coeff_range) {
  std::uniform_int_distribution<int> nt(0, max_terms), ex(-exp_range, exp_range),
      co(-coeff_range, coeff_range);
  std::vector<std::pair<IntVec, Integer>> terms;
  int n = nt(rng);
  for (int i = 0; i < n; ++i) {
    IntVec e(rank);
    for (auto& x : e) x = ex(rng);
    terms.emplace_back(e, co(rng));
  }
  return LaurentPoly::from_terms(rank, terms);
}

LaurentMatrix random_matrix(std::mt19937_64& rng, std::size_t dim, std::size_t rank) {
  LaurentMatrix m(dim, rank);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) m.at(i, j) = random_poly(rng, rank, 3, 2, 3);
  return m;
}

Rational max_cycle_mean(const LaurentMatrix& m, const IntVec& u) {
  std::size_t n = m.dim();
  const long kNone = std::numeric_limits<long>::min();
  // best[v][w] = max weight of a walk of the current length from v to w.
  std::vector<std::vector<long>> step(n, std::vector<long>(n, kNone));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (const auto& e : m.at(i, j).support()) step[i][j] = std::max(step[i][j], static_cast<long>(dot(u, e)));
  auto best = step;
  Rational answer;
  bool have = false;
  for (std::size_t len = 1; len <= n; ++len) {
    for (std::size_t v = 0; v < n; ++v)
      if (best[v][v] != kNone) {
        Rational mean(best[v][v], static_cast<long>(len));
        mean.canonicalize();
        if (!have || mean > answer) answer = mean;
        have = true;
      }
    std::vector<std::vector<long>> next(n, std::vector<long>(n, kNone));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (best[a][b] != kNone)
          for (std::size_t c = 0; c < n; ++c)
            if (step[b][c] != kNone) next[a][c] = std::max(next[a][c], best[a][b] + step[b][c]);
    best = next;
  }
  return answer;
}

std::vector<IntVec> kernel_points(const IntVec& alpha, std::int64_t box) {
  std::vector<IntVec> out;
  IntVec x(alpha.size(), -box);
  while (true) {
    if (dot(alpha, x) == 0) out.push_back(x);
    std::size_t k = 0;
    while (k < x.size() && ++x[k] > box) x[k++] = -box;
    if (k == x.size()) break;
  }
  return out;
}

Integer brute_systole(const std::vector<IntVec>& basis, std::int64_t radius) {
  std::size_t r = basis.size(), d = basis[0].size();
  IntVec c(r, -radius);
  Integer best = -1;
  while (true) {
    bool zero = std::all_of(c.begin(), c.end(), [](std::int64_t v) { return v == 0; });
    if (!zero) {
      IntVec v(d, 0);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t k = 0; k < d; ++k) v[k] += c[i] * basis[i][k];
      Integer n2 = norm2(v);
      if (best < 0 || n2 < best) best = n2;
    }
    std::size_t k = 0;
    while (k < r && ++c[k] > radius) c[k++] = -radius;
    if (k == r) break;
  }
  return best;
}

std::pair<IntVec, Rational> scan_deep_point(const std::vector<Polytope>& obstacles, std::int64_t R) {
  std::size_t r = obstacles.front().rank;
  IntVec y(r, -R), best_y;
  Rational best = -1;
  while (true) {
    Rational d = -1;
    for (const auto& o : obstacles) {
      Rational q = squared_distance(y, o);
      if (d < 0 || q < d) d = q;
    }
    if (d > best) {
      best = d;
      best_y = y;
    }
    // lexicographic order: last coordinate varies fastest
    std::size_t k = r;
    while (k > 0 && ++y[k - 1] > R) y[--k] = -R;
    if (k == 0) break;
  }
  return {best_y, best};
}

namespace {

__int128 orient(const IntVec& a, const IntVec& b, const IntVec& c) {
  return static_cast<__int128>(b[0] - a[0]) * (c[1] - a[1]) - static_cast<__int128>(b[1] - a[1]) * (c[0] - a[0]);
}

bool on_segment(const IntVec& a, const IntVec& b, const IntVec& p) {
  return orient(a, b, p) == 0 && std::min(a[0], b[0]) <= p[0] && p[0] <= std::max(a[0], b[0]) &&
         std::min(a[1], b[1]) <= p[1] && p[1] <= std::max(a[1], b[1]);
}

bool segments_meet(const IntVec& a, const IntVec& b, const IntVec& c, const IntVec& d) {
  __int128 o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) return true;
  return on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b);
}

bool inside(const Polytope& p, const IntVec& y) {
  const auto& v = p.vertices;
  if (v.size() == 1) return v[0] == y;
  if (v.size() == 2) return on_segment(v[0], v[1], y);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (orient(v[i], v[(i + 1) % v.size()], y) < 0) return false;
  return true;
}

}  // namespace

bool polygons_intersect(const Polytope& a, const Polytope& b) {
  if (a.rank == 1)
    return !(a.vertices.back()[0] < b.vertices.front()[0] || b.vertices.back()[0] < a.vertices.front()[0]);
  for (const auto& v : a.vertices)
    if (inside(b, v)) return true;
  for (const auto& v : b.vertices)
    if (inside(a, v)) return true;
  for (std::size_t i = 0; i < a.vertices.size(); ++i)
    for (std::size_t j = 0; j < b.vertices.size(); ++j)
      if (segments_meet(a.vertices[i], a.vertices[(i + 1) % a.vertices.size()], b.vertices[j],
                        b.vertices[(j + 1) % b.vertices.size()]))
        return true;
  return false;
}

std::set<IntVec> minkowski(const std::vector<IntVec>& a, const std::vector<IntVec>& b) {
  std::set<IntVec> out;
  for (const auto& x : a)
    for (const auto& y : b) {
      IntVec s = x;
      for (std::size_t k = 0; k < s.size(); ++k) s[k] += y[k];
      out.insert(s);
    }
  return out;
}

}  // namespace oracle
