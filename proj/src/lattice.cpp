#include "conebound/lattice.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <thread>

#include "conebound/errors.hpp"

namespace conebound {

namespace {

Integer big(std::int64_t v) { return Integer(std::to_string(v)); }

IntVec small(const std::vector<Integer>& v) {
  IntVec out;
  for (const auto& x : v) out.push_back(to_int64(x));
  return out;
}

std::vector<Integer> widen(const IntVec& v) {
  std::vector<Integer> out;
  for (auto x : v) out.push_back(big(x));
  return out;
}

Rational rdot(const RatVec& a, const RatVec& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Gram-Schmidt data of integer rows: mu[i][j] for j < i and squared norms B[i].
struct GramSchmidt {
  std::vector<std::vector<Rational>> mu;
  std::vector<Rational> B;
};

GramSchmidt gram_schmidt(const std::vector<IntVec>& b) {
  std::size_t k = b.size();
  GramSchmidt gs;
  gs.mu.assign(k, std::vector<Rational>(k));
  gs.B.assign(k, 0);
  std::vector<RatVec> star;
  for (std::size_t i = 0; i < k; ++i) {
    RatVec v;
    for (auto x : b[i]) v.emplace_back(big(x));
    RatVec bi = v;
    for (std::size_t j = 0; j < i; ++j) {
      gs.mu[i][j] = rdot(bi, star[j]) / gs.B[j];
      for (std::size_t c = 0; c < v.size(); ++c) v[c] -= gs.mu[i][j] * star[j][c];
    }
    gs.B[i] = rdot(v, v);
    if (gs.B[i] == 0) throw ValidationError("lattice basis vectors are linearly dependent");
    star.push_back(std::move(v));
  }
  return gs;
}

void check_rank(std::size_t r) {
  if (r == 0) throw ValidationError("lattice basis is empty");
  if (r > 4) throw CapabilityError("lattice enumeration supports rank <= 4, got " + std::to_string(r));
}

}  // namespace

Integer determinant(IntMatrix m) {
  std::size_t n = m.size();
  if (n == 0) return 1;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t s = k + 1;
      while (s < n && m[s][k] == 0) ++s;
      if (s == n) return 0;
      std::swap(m[k], m[s]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer v = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        m[i][j] = v;
      }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

IntMatrix gram_matrix(const std::vector<IntVec>& v) {
  IntMatrix g(v.size(), std::vector<Integer>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) {
      Integer s = 0;
      for (std::size_t c = 0; c < v[i].size(); ++c) s += big(v[i][c]) * big(v[j][c]);
      g[i][j] = s;
    }
  return g;
}

std::vector<IntVec> hermite_normal_form(const std::vector<IntVec>& input) {
  std::vector<std::vector<Integer>> m;
  for (const auto& r : input) m.push_back(widen(r));
  if (m.empty()) return {};
  std::size_t cols = m.front().size(), row = 0;
  for (std::size_t j = 0; j < cols && row < m.size(); ++j) {
    while (true) {
      std::size_t best = m.size();
      for (std::size_t i = row; i < m.size(); ++i)
        if (m[i][j] != 0 && (best == m.size() || abs(m[i][j]) < abs(m[best][j]))) best = i;
      if (best == m.size()) break;
      std::swap(m[row], m[best]);
      bool done = true;
      for (std::size_t i = row + 1; i < m.size(); ++i) {
        if (m[i][j] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), m[i][j].get_mpz_t(), m[row][j].get_mpz_t());
        for (std::size_t c = j; c < cols; ++c) m[i][c] -= q * m[row][c];
        if (m[i][j] != 0) done = false;
      }
      if (done) break;
    }
    if (row < m.size() && m[row][j] != 0) {
      if (m[row][j] < 0)
        for (auto& x : m[row]) x = -x;
      for (std::size_t i = 0; i < row; ++i) {
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), m[i][j].get_mpz_t(), m[row][j].get_mpz_t());
        for (std::size_t c = j; c < cols; ++c) m[i][c] -= q * m[row][c];
      }
      ++row;
    }
  }
  std::vector<IntVec> out;
  for (std::size_t i = 0; i < row; ++i) out.push_back(small(m[i]));
  return out;
}

std::vector<Integer> maximal_minors(const std::vector<IntVec>& rows) {
  std::size_t r = rows.size();
  std::vector<Integer> out;
  for (std::size_t skip = 0; skip <= r; ++skip) {
    IntMatrix sub;
    for (const auto& row : rows) {
      std::vector<Integer> s;
      for (std::size_t c = 0; c <= r; ++c)
        if (c != skip) s.push_back(big(row[c]));
      sub.push_back(std::move(s));
    }
    Integer d = determinant(sub);
    out.push_back(skip % 2 ? Integer(-d) : d);
  }
  return out;
}

bool is_saturated_kernel(const std::vector<IntVec>& basis, const IntVec& alpha) {
  if (basis.size() + 1 != alpha.size()) return false;
  for (const auto& b : basis)
    if (b.size() != alpha.size() || dot(b, alpha) != 0) return false;
  auto minors = maximal_minors(basis);
  bool plus = true, minus = true;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    plus &= minors[i] == big(alpha[i]);
    minus &= minors[i] == -big(alpha[i]);
  }
  return plus || minus;
}

PerpLattice perp_basis(const IntVec& alpha) {
  if (alpha.size() < 2) throw ValidationError("alpha: needs at least 2 coordinates");
  if (std::all_of(alpha.begin(), alpha.end(), [](auto x) { return x == 0; }))
    throw ValidationError("alpha: class is zero");
  if (gcd_of(alpha) != 1)
    throw ValidationError("alpha: " + to_string(alpha) + " is not primitive; divide by gcd " +
                          std::to_string(gcd_of(alpha)));
  std::size_t d = alpha.size();
  // Column operations on the row alpha, mirrored on U, until alpha U = (g, 0, ..., 0).
  std::vector<Integer> a = widen(alpha);
  IntMatrix U(d, std::vector<Integer>(d, 0));
  for (std::size_t i = 0; i < d; ++i) U[i][i] = 1;
  auto col_sub = [&](std::size_t dst, std::size_t src, const Integer& q) {
    a[dst] -= q * a[src];
    for (std::size_t i = 0; i < d; ++i) U[i][dst] -= q * U[i][src];
  };
  auto col_swap = [&](std::size_t x, std::size_t y) {
    std::swap(a[x], a[y]);
    for (std::size_t i = 0; i < d; ++i) std::swap(U[i][x], U[i][y]);
  };
  while (true) {
    std::size_t best = d;
    for (std::size_t j = 0; j < d; ++j)
      if (a[j] != 0 && (best == d || abs(a[j]) < abs(a[best]))) best = j;
    col_swap(0, best);
    bool done = true;
    for (std::size_t j = 1; j < d; ++j) {
      if (a[j] == 0) continue;
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), a[j].get_mpz_t(), a[0].get_mpz_t());
      col_sub(j, 0, q);
      if (a[j] != 0) done = false;
    }
    if (done) break;
  }
  std::vector<IntVec> kernel;
  for (std::size_t j = 1; j < d; ++j) {
    std::vector<Integer> col;
    for (std::size_t i = 0; i < d; ++i) col.push_back(U[i][j]);
    kernel.push_back(small(col));
  }
  return with_basis(alpha, hermite_normal_form(kernel));
}

PerpLattice with_basis(const IntVec& alpha, std::vector<IntVec> basis) {
  PerpLattice L;
  L.alpha = alpha;
  L.basis = std::move(basis);
  if (!is_saturated_kernel(L.basis, alpha))
    throw InternalError("basis does not generate the kernel of " + to_string(alpha));
  for (const auto& b : L.basis) L.projected.emplace_back(b.begin(), b.end() - 1);
  L.gram = gram_matrix(L.projected);
  L.covol2 = determinant(L.gram);
  return L;
}

Integer covolume(const PerpLattice& L) { return L.covol2; }

std::vector<IntVec> lll_reduce(std::vector<IntVec> b, std::vector<IntVec>* transform) {
  std::size_t k = b.size();
  std::vector<IntVec> U(k, IntVec(k, 0));
  for (std::size_t i = 0; i < k; ++i) U[i][i] = 1;
  const Rational delta(3, 4);
  GramSchmidt gs = gram_schmidt(b);
  std::size_t i = 1;
  while (i < k) {
    for (std::size_t j = i; j-- > 0;) {
      Integer q = floor_of(gs.mu[i][j] + Rational(1, 2));
      if (q == 0) continue;
      std::int64_t qi = to_int64(q);
      for (std::size_t c = 0; c < b[i].size(); ++c) b[i][c] -= qi * b[j][c];
      for (std::size_t c = 0; c < k; ++c) U[i][c] -= qi * U[j][c];
      gs = gram_schmidt(b);
    }
    if (gs.B[i] >= (delta - gs.mu[i][i - 1] * gs.mu[i][i - 1]) * gs.B[i - 1]) {
      ++i;
    } else {
      std::swap(b[i], b[i - 1]);
      std::swap(U[i], U[i - 1]);
      gs = gram_schmidt(b);
      i = std::max<std::size_t>(i - 1, 1);
    }
  }
  if (transform) *transform = std::move(U);
  return b;
}

std::vector<IntVec> enumerate_ball(const std::vector<IntVec>& basis, const Integer& radius2,
                                   std::size_t cap) {
  std::size_t k = basis.size();
  check_rank(k);
  std::vector<IntVec> U;
  std::vector<IntVec> red = lll_reduce(basis, &U);
  GramSchmidt gs = gram_schmidt(red);
  const Rational R2(radius2);

  std::vector<IntVec> out;
  IntVec x(k, 0);
  std::function<void(std::size_t, const Rational&)> rec = [&](std::size_t level, const Rational& used) {
    Rational c = 0;
    for (std::size_t j = level + 1; j < k; ++j) c -= gs.mu[j][level] * Rational(big(x[j]));
    Rational room = (R2 - used) / gs.B[level];
    if (room < 0) return;
    Rational w = sqrt_upper(room);
    std::int64_t lo = to_int64(ceil_of(c - w)), hi = to_int64(floor_of(c + w));
    for (std::int64_t v = lo; v <= hi; ++v) {
      x[level] = v;
      Rational d = Rational(big(v)) - c;
      Rational next = used + d * d * gs.B[level];
      if (next > R2) continue;
      if (level == 0) {
        IntVec coeff(k, 0);
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) coeff[j] += x[i] * U[i][j];
        out.push_back(std::move(coeff));
        if (out.size() > cap)
          throw ResourceError("lattice ball enumeration exceeds " + std::to_string(cap) + " points");
      } else {
        rec(level - 1, next);
      }
    }
    x[level] = 0;
  };
  rec(k - 1, Rational(0));
  std::sort(out.begin(), out.end());
  return out;
}

Systole systole(const std::vector<IntVec>& basis) {
  check_rank(basis.size());
  std::vector<IntVec> red = lll_reduce(basis);
  Integer bound = norm2(red.front());
  Systole best;
  bool have = false;
  for (const auto& c : enumerate_ball(basis, bound)) {
    if (std::all_of(c.begin(), c.end(), [](auto v) { return v == 0; })) continue;
    IntVec v(basis.front().size(), 0);
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) v[j] += c[i] * basis[i][j];
    Integer l = norm2(v);
    if (!have || l < best.length2 || (l == best.length2 && v < best.vector)) {
      best = {l, v, c};
      have = true;
    }
  }
  if (!have) throw InternalError("systole enumeration found no vector");
  return best;
}

Systole systole(const PerpLattice& L) { return systole(L.projected); }

Fraction min_distance2(const IntVec& y, const std::vector<Polytope>& obstacles) {
  if (obstacles.empty()) throw ValidationError("obstacles: list is empty");
  Fraction best = squared_distance_fraction(y, obstacles.front());
  for (std::size_t i = 1; i < obstacles.size(); ++i) {
    Fraction d = squared_distance_fraction(y, obstacles[i]);
    if (d < best) best = d;
  }
  return best;
}

namespace {

// Uniform grid over [lo, lo + cells * B)^r listing the obstacles whose bounding box meets
// each cell.
struct ObstacleGrid {
  std::size_t rank;
  std::int64_t lo, B, cells;
  std::vector<std::vector<std::uint32_t>> buckets;

  std::int64_t cell_of(std::int64_t x) const {
    return std::clamp<std::int64_t>((x - lo) / B, 0, cells - 1);
  }
  std::size_t index(std::int64_t cx, std::int64_t cy) const {
    return static_cast<std::size_t>(cx * (rank == 2 ? cells : 1) + cy);
  }
};

ObstacleGrid build_grid(const std::vector<Polytope>& obstacles, std::int64_t R, std::size_t rank) {
  ObstacleGrid g;
  g.rank = rank;
  std::int64_t G = (rank == 2 ? (3 * R) / 2 : R) + 2;  // beyond sqrt(r) R no obstacle can matter
  g.lo = -R - G;
  std::int64_t span = 2 * (R + G) + 1;
  g.B = std::max<std::int64_t>(2, span / (rank == 2 ? 64 : 4096));
  g.cells = (span + g.B - 1) / g.B;
  g.buckets.resize(static_cast<std::size_t>(rank == 2 ? g.cells * g.cells : g.cells));
  const std::int64_t hi = g.lo + span - 1;
  for (std::uint32_t id = 0; id < obstacles.size(); ++id) {
    auto [mn, mx] = bounding_box(obstacles[id]);
    bool out = false;
    for (std::size_t c = 0; c < rank; ++c) out |= mx[c] < g.lo || mn[c] > hi;
    if (out) continue;
    std::int64_t x0 = g.cell_of(mn[0]), x1 = g.cell_of(mx[0]);
    if (rank == 1) {
      for (std::int64_t cx = x0; cx <= x1; ++cx) g.buckets[g.index(cx, 0)].push_back(id);
    } else {
      std::int64_t y0 = g.cell_of(mn[1]), y1 = g.cell_of(mx[1]);
      for (std::int64_t cx = x0; cx <= x1; ++cx)
        for (std::int64_t cy = y0; cy <= y1; ++cy) g.buckets[g.index(cx, cy)].push_back(id);
    }
  }
  return g;
}

struct ScanResult {
  bool found = false;
  IntVec y;
  Fraction value;
  std::uint64_t scanned = 0;
};

// Scans first coordinates [a, b] in lexicographic order.
ScanResult scan_slab(const std::vector<Polytope>& obstacles, const ObstacleGrid& grid,
                     std::int64_t R, std::int64_t a, std::int64_t b, const Fraction& floor_value,
                     bool have_floor) {
  ScanResult res;
  std::vector<std::uint32_t> stamp(obstacles.size(), 0);
  std::uint32_t tick = 0;
  const std::size_t r = grid.rank;
  IntVec y(r, 0);

  auto evaluate = [&](const IntVec& p) -> std::optional<Fraction> {
    ++tick;
    std::optional<Fraction> best;
    std::int64_t cx = grid.cell_of(p[0]), cy = r == 2 ? grid.cell_of(p[1]) : 0;
    auto consider = [&](std::int64_t ix, std::int64_t iy) -> bool {
      for (auto id : grid.buckets[grid.index(ix, iy)]) {
        if (stamp[id] == tick) continue;
        stamp[id] = tick;
        Fraction d = squared_distance_fraction(p, obstacles[id]);
        if (!best || d < *best) {
          best = d;
          if (have_floor && d < floor_value) return false;
          if (res.found && d <= res.value) return false;
        }
      }
      return true;
    };
    for (std::int64_t k = 0;; ++k) {
      if (best) {
        __int128 bound = static_cast<__int128>(k > 0 ? k - 1 : 0) * grid.B;
        if (!(Fraction{bound * bound, 1} < *best)) break;
      }
      bool any = false;
      if (r == 1) {
        for (std::int64_t ix : {cx - k, cx + k}) {
          if (ix < 0 || ix >= grid.cells) continue;
          any = true;
          if (!consider(ix, 0)) return std::nullopt;
          if (k == 0) break;
        }
      } else {
        for (std::int64_t ix = cx - k; ix <= cx + k; ++ix) {
          if (ix < 0 || ix >= grid.cells) continue;
          bool edge = ix == cx - k || ix == cx + k;
          for (std::int64_t iy = cy - k; iy <= cy + k; iy += (edge || k == 0) ? 1 : 2 * k) {
            if (iy < 0 || iy >= grid.cells) continue;
            any = true;
            if (!consider(ix, iy)) return std::nullopt;
          }
        }
      }
      if (!any) break;
    }
    if (!best) throw InternalError("deep point search saw no obstacle");
    return best;
  };

  for (std::int64_t x0 = a; x0 <= b; ++x0) {
    y[0] = x0;
    std::int64_t lo1 = r == 2 ? -R : 0, hi1 = r == 2 ? R : 0;
    for (std::int64_t x1 = lo1; x1 <= hi1; ++x1) {
      if (r == 2) y[1] = x1;
      ++res.scanned;
      auto v = evaluate(y);
      if (!v) continue;
      if (have_floor && *v < floor_value) continue;
      if (res.found && *v <= res.value) continue;
      res.found = true;
      res.y = y;
      res.value = *v;
    }
  }
  return res;
}

}  // namespace

DeepPoint deep_point(const std::vector<Polytope>& obstacles, std::int64_t R,
                     const std::vector<IntVec>& seeds, unsigned threads) {
  if (obstacles.empty()) throw ValidationError("obstacles: list is empty");
  if (R < 1) throw ValidationError("--box-radius: must be at least 1");
  const std::size_t r = obstacles.front().rank;
  if (r > 2) throw CapabilityError("deep point search supports rank 1 and 2 only");
  const IntVec origin(r, 0);
  if (std::none_of(obstacles.begin(), obstacles.end(), [&](const Polytope& p) { return contains(p, origin); }))
    throw ValidationError("obstacles: none contains the origin");
  ObstacleGrid grid = build_grid(obstacles, R, r);

  // The ring search stops once its lower bound passes the best distance seen, so an exact
  // value from a seed lets most points abort after a few cells.
  bool have_floor = false;
  Fraction floor_value;
  for (const auto& s : seeds) {
    if (s.size() != r) continue;
    bool inside = std::all_of(s.begin(), s.end(), [&](auto v) { return v >= -R && v <= R; });
    if (!inside) continue;
    Fraction d = min_distance2(s, obstacles);
    if (!have_floor || floor_value < d) floor_value = d;
    have_floor = true;
  }

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(2 * R + 1)));
  std::vector<ScanResult> parts(threads);
  std::vector<std::thread> pool;
  std::int64_t total = 2 * R + 1;
  for (unsigned t = 0; t < threads; ++t) {
    std::int64_t a = -R + total * t / threads, b = -R + total * (t + 1) / threads - 1;
    auto job = [&, t, a, b] { parts[t] = scan_slab(obstacles, grid, R, a, b, floor_value, have_floor); };
    if (threads == 1) job();
    else pool.emplace_back(job);
  }
  for (auto& th : pool) th.join();

  DeepPoint out;
  bool found = false;
  for (const auto& p : parts) {
    out.scanned += p.scanned;
    if (!p.found) continue;
    // Slabs are in increasing first coordinate, so only a strictly larger value wins.
    if (!found || out.dist2 < p.value) {
      out.y = p.y;
      out.dist2 = p.value;
      found = true;
    }
  }
  if (!found) throw InternalError("deep point scan found no candidate");
  return out;
}

std::vector<IntVec> dichotomy_seeds(const PerpLattice& L, std::int64_t R) {
  std::vector<IntVec> red = lll_reduce(L.projected);
  const std::size_t r = red.size();
  std::set<IntVec> out;
  auto add = [&](IntVec v) {
    for (auto& c : v) c = std::clamp(c, -R, R);
    out.insert(std::move(v));
  };
  auto half = [](std::int64_t v) { return v >= 0 ? v / 2 : -((-v) / 2); };
  if (r == 1) {
    add({half(red[0][0])});
    add({-half(red[0][0])});
  } else if (r == 2) {
    const IntVec& a = red[0];
    const IntVec& b = red[1];
    for (int s : {1, -1}) {
      add({half(a[0] + s * b[0]), half(a[1] + s * b[1])});
      add({half(s * a[0]), half(s * a[1])});
      add({half(s * b[0]), half(s * b[1])});
    }
    // Degenerate lattice: short vector a, cosets of Z a spaced covol / |a| apart.
    if (norm2(b) > 16 * norm2(a)) {
      for (std::int64_t k = -2; k <= 2; ++k)
        add({half(b[0]) + k * a[0] / 2, half(b[1]) + k * a[1] / 2});
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace conebound
