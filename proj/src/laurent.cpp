#include "conebound/laurent.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "conebound/errors.hpp"

namespace conebound {

namespace {

void require_same_rank(std::size_t a, std::size_t b) {
  if (a != b)
    throw ValidationError("rank mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

int lex_cmp(const std::int64_t* a, const std::int64_t* b, std::size_t r) {
  for (std::size_t i = 0; i < r; ++i) {
    if (a[i] < b[i]) return -1;
    if (a[i] > b[i]) return 1;
  }
  return 0;
}

// Merge two sorted term lists; sign = +1 or -1 applied to b.
LaurentPoly merge(const LaurentPoly& a, const LaurentPoly& b, int sign) {
  require_same_rank(a.rank(), b.rank());
  std::size_t r = a.rank();
  std::vector<std::pair<IntVec, Integer>> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int c;
    if (i == a.size()) c = 1;
    else if (j == b.size()) c = -1;
    else c = lex_cmp(a.exponent_data(i), b.exponent_data(j), r);
    if (c < 0) {
      out.emplace_back(a.exponent(i), a.coeff(i));
      ++i;
    } else if (c > 0) {
      out.emplace_back(b.exponent(j), sign > 0 ? Integer(b.coeff(j)) : Integer(-b.coeff(j)));
      ++j;
    } else {
      Integer s = sign > 0 ? Integer(a.coeff(i) + b.coeff(j)) : Integer(a.coeff(i) - b.coeff(j));
      if (s != 0) out.emplace_back(a.exponent(i), std::move(s));
      ++i;
      ++j;
    }
  }
  return LaurentPoly::from_terms(r, std::move(out));
}

}  // namespace

LaurentPoly::LaurentPoly(std::size_t rank) : rank_(rank) {
  if (rank == 0) throw ValidationError("rank must be at least 1");
}

LaurentPoly LaurentPoly::constant(std::size_t rank, const Integer& c) {
  return monomial(IntVec(rank, 0), c);
}

LaurentPoly LaurentPoly::monomial(const IntVec& exponent, const Integer& c) {
  LaurentPoly p(exponent.size());
  if (c != 0) {
    p.exps_ = exponent;
    p.coeffs_.push_back(c);
  }
  return p;
}

LaurentPoly LaurentPoly::from_terms(std::size_t rank,
                                    std::vector<std::pair<IntVec, Integer>> terms) {
  LaurentPoly p(rank);
  for (const auto& t : terms) require_same_rank(rank, t.first.size());
  std::sort(terms.begin(), terms.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  for (std::size_t i = 0; i < terms.size();) {
    std::size_t j = i;
    Integer s = 0;
    while (j < terms.size() && terms[j].first == terms[i].first) s += terms[j++].second;
    if (s != 0) {
      p.exps_.insert(p.exps_.end(), terms[i].first.begin(), terms[i].first.end());
      p.coeffs_.push_back(std::move(s));
    }
    i = j;
  }
  return p;
}

bool LaurentPoly::is_constant() const {
  if (coeffs_.empty()) return true;
  if (coeffs_.size() > 1) return false;
  return std::all_of(exps_.begin(), exps_.end(), [](std::int64_t e) { return e == 0; });
}

IntVec LaurentPoly::exponent(std::size_t i) const {
  return IntVec(exps_.begin() + static_cast<std::ptrdiff_t>(i * rank_),
                exps_.begin() + static_cast<std::ptrdiff_t>((i + 1) * rank_));
}

Integer LaurentPoly::coeff_of(const IntVec& e) const {
  require_same_rank(rank_, e.size());
  std::size_t lo = 0, hi = coeffs_.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    int c = lex_cmp(exponent_data(mid), e.data(), rank_);
    if (c == 0) return coeffs_[mid];
    if (c < 0) lo = mid + 1;
    else hi = mid;
  }
  return 0;
}

std::vector<IntVec> LaurentPoly::support() const {
  std::vector<IntVec> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back(exponent(i));
  return out;
}

std::optional<std::int64_t> LaurentPoly::max_dot(const IntVec& u) const {
  require_same_rank(rank_, u.size());
  std::optional<std::int64_t> best;
  for (std::size_t i = 0; i < size(); ++i) {
    std::int64_t d = 0;
    for (std::size_t k = 0; k < rank_; ++k) d += u[k] * exponent_data(i)[k];
    if (!best || d > *best) best = d;
  }
  return best;
}

std::optional<std::int64_t> LaurentPoly::min_dot(const IntVec& u) const {
  IntVec neg(u);
  for (auto& x : neg) x = -x;
  auto m = max_dot(neg);
  if (!m) return std::nullopt;
  return -*m;
}

Rational LaurentPoly::evaluate(const RatVec& t) const {
  require_same_rank(rank_, t.size());
  Rational s = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    Rational term = coeffs_[i];
    for (std::size_t k = 0; k < rank_; ++k) {
      std::int64_t e = exponent_data(i)[k];
      if (e == 0) continue;
      if (t[k] == 0) throw ValidationError("evaluation at t = 0 with a negative or positive power");
      Rational base = e > 0 ? t[k] : Rational(1) / t[k];
      Integer num, den;
      unsigned long ae = static_cast<unsigned long>(e > 0 ? e : -e);
      mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), ae);
      mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), ae);
      term *= Rational(num, den);
    }
    s += term;
  }
  s.canonicalize();
  return s;
}

LaurentPoly LaurentPoly::operator-() const {
  LaurentPoly p(*this);
  for (auto& c : p.coeffs_) c = -c;
  return p;
}

LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) { return merge(a, b, 1); }
LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) { return merge(a, b, -1); }

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
  require_same_rank(a.rank_, b.rank_);
  const std::size_t r = a.rank_;
  LaurentPoly out(r);
  if (a.is_zero() || b.is_zero()) return out;

  // Product bounding box, exponents packed mixed-radix (first coordinate most significant,
  // which preserves lexicographic order).
  IntVec lo(r), span(r);
  unsigned __int128 vol = 1;
  bool packable = true;
  for (std::size_t k = 0; k < r; ++k) {
    std::int64_t alo = a.exps_[k], ahi = a.exps_[k], blo = b.exps_[k], bhi = b.exps_[k];
    for (std::size_t i = 0; i < a.size(); ++i) {
      alo = std::min(alo, a.exponent_data(i)[k]);
      ahi = std::max(ahi, a.exponent_data(i)[k]);
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      blo = std::min(blo, b.exponent_data(i)[k]);
      bhi = std::max(bhi, b.exponent_data(i)[k]);
    }
    lo[k] = alo + blo;
    span[k] = (ahi + bhi) - lo[k] + 1;
    vol *= static_cast<unsigned __int128>(span[k]);
    if (vol > (static_cast<unsigned __int128>(1) << 62)) packable = false;
  }

  if (!packable) {
    std::map<IntVec, Integer> acc;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) {
        IntVec e(r);
        for (std::size_t k = 0; k < r; ++k) e[k] = a.exponent_data(i)[k] + b.exponent_data(j)[k];
        acc[e] += a.coeffs_[i] * b.coeffs_[j];
      }
    for (auto& [e, c] : acc)
      if (c != 0) {
        out.exps_.insert(out.exps_.end(), e.begin(), e.end());
        out.coeffs_.push_back(std::move(c));
      }
    return out;
  }

  auto pack = [&](const std::int64_t* x, const std::int64_t* y) {
    std::uint64_t key = 0;
    for (std::size_t k = 0; k < r; ++k)
      key = key * static_cast<std::uint64_t>(span[k]) +
            static_cast<std::uint64_t>(x[k] + y[k] - lo[k]);
    return key;
  };
  auto unpack = [&](std::uint64_t key) {
    IntVec e(r);
    for (std::size_t k = r; k-- > 0;) {
      e[k] = static_cast<std::int64_t>(key % static_cast<std::uint64_t>(span[k])) + lo[k];
      key /= static_cast<std::uint64_t>(span[k]);
    }
    return e;
  };

  const std::uint64_t n_pairs = static_cast<std::uint64_t>(a.size()) * b.size();
  const std::uint64_t v = static_cast<std::uint64_t>(vol);
  if (v <= 4 * n_pairs + 64 && v <= (1u << 22)) {
    std::vector<Integer> dense(v);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        mpz_addmul(dense[pack(a.exponent_data(i), b.exponent_data(j))].get_mpz_t(),
                   a.coeffs_[i].get_mpz_t(), b.coeffs_[j].get_mpz_t());
    for (std::uint64_t key = 0; key < v; ++key)
      if (dense[key] != 0) {
        IntVec e = unpack(key);
        out.exps_.insert(out.exps_.end(), e.begin(), e.end());
        out.coeffs_.push_back(std::move(dense[key]));
      }
    return out;
  }

  struct Pair {
    std::uint64_t key;
    std::uint32_t i, j;
  };
  std::vector<Pair> pairs;
  pairs.reserve(n_pairs);
  for (std::uint32_t i = 0; i < a.size(); ++i)
    for (std::uint32_t j = 0; j < b.size(); ++j)
      pairs.push_back({pack(a.exponent_data(i), b.exponent_data(j)), i, j});
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.key < y.key; });
  for (std::size_t s = 0; s < pairs.size();) {
    std::size_t e = s;
    Integer acc = 0;
    while (e < pairs.size() && pairs[e].key == pairs[s].key) {
      mpz_addmul(acc.get_mpz_t(), a.coeffs_[pairs[e].i].get_mpz_t(),
                 b.coeffs_[pairs[e].j].get_mpz_t());
      ++e;
    }
    if (acc != 0) {
      IntVec ex = unpack(pairs[s].key);
      out.exps_.insert(out.exps_.end(), ex.begin(), ex.end());
      out.coeffs_.push_back(std::move(acc));
    }
    s = e;
  }
  return out;
}

bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
  return a.rank_ == b.rank_ && a.exps_ == b.exps_ && a.coeffs_ == b.coeffs_;
}

std::string LaurentPoly::to_string() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < size(); ++i) {
    Integer c = coeffs_[i];
    bool unit_monomial = true;
    for (std::size_t k = 0; k < rank_; ++k) unit_monomial &= exponent_data(i)[k] == 0;
    if (i > 0) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    Integer ac = abs(c);
    bool wrote = false;
    if (ac != 1 || unit_monomial) {
      os << ac.get_str();
      wrote = true;
    }
    for (std::size_t k = 0; k < rank_; ++k) {
      std::int64_t e = exponent_data(i)[k];
      if (e == 0) continue;
      if (wrote) os << '*';
      os << 't';
      if (rank_ > 1) os << (k + 1);
      if (e != 1) os << '^' << e;
      wrote = true;
    }
  }
  return os.str();
}

LaurentPoly poly_add(const LaurentPoly& p, const LaurentPoly& q) { return p + q; }
LaurentPoly poly_mul(const LaurentPoly& p, const LaurentPoly& q) { return p * q; }

LaurentMatrix::LaurentMatrix(std::size_t dim, std::size_t rank)
    : dim_(dim), rank_(rank), entries_(dim * dim, LaurentPoly(rank)) {
  if (dim == 0) throw ValidationError("matrix dimension must be at least 1");
}

LaurentMatrix LaurentMatrix::identity(std::size_t dim, std::size_t rank) {
  LaurentMatrix m(dim, rank);
  for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = LaurentPoly::constant(rank, 1);
  return m;
}

std::vector<std::vector<Rational>> LaurentMatrix::evaluate(const RatVec& v) const {
  std::vector<std::vector<Rational>> out(dim_, std::vector<Rational>(dim_));
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out[i][j] = at(i, j).evaluate(v);
  return out;
}

std::vector<std::vector<bool>> LaurentMatrix::pattern() const {
  std::vector<std::vector<bool>> out(dim_, std::vector<bool>(dim_));
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out[i][j] = !at(i, j).is_zero();
  return out;
}

LaurentMatrix operator*(const LaurentMatrix& a, const LaurentMatrix& b) {
  if (a.dim_ != b.dim_) throw ValidationError("matrix dimension mismatch");
  require_same_rank(a.rank_, b.rank_);
  LaurentMatrix c(a.dim_, a.rank_);
  for (std::size_t i = 0; i < a.dim_; ++i)
    for (std::size_t j = 0; j < a.dim_; ++j) {
      LaurentPoly s(a.rank_);
      for (std::size_t k = 0; k < a.dim_; ++k) {
        if (a.at(i, k).is_zero() || b.at(k, j).is_zero()) continue;
        s += a.at(i, k) * b.at(k, j);
      }
      c.at(i, j) = std::move(s);
    }
  return c;
}

bool operator==(const LaurentMatrix& a, const LaurentMatrix& b) {
  return a.dim_ == b.dim_ && a.rank_ == b.rank_ && a.entries_ == b.entries_;
}

LaurentMatrix mat_mul(const LaurentMatrix& a, const LaurentMatrix& b) { return a * b; }

LaurentMatrix mat_pow(const LaurentMatrix& m, std::uint64_t p) {
  LaurentMatrix result = LaurentMatrix::identity(m.dim(), m.rank());
  LaurentMatrix base = m;
  bool first = true;
  while (p > 0) {
    if (p & 1) {
      result = first ? base : result * base;
      first = false;
    }
    p >>= 1;
    if (p > 0) base = base * base;
  }
  return result;
}

CharPoly char_poly(const LaurentMatrix& a) {
  const std::size_t n = a.dim(), r = a.rank();
  auto sub = [&](std::size_t i, std::size_t j) -> const LaurentPoly& { return a.at(i, j); };

  // q holds det(xI - A_k) in descending powers of x.
  std::vector<LaurentPoly> q{LaurentPoly::constant(r, 1), -sub(0, 0)};
  for (std::size_t k = 1; k < n; ++k) {
    // A_{k+1} = [[A_k, C], [R, a]], C = A[0..k-1][k], R = A[k][0..k-1].
    std::vector<LaurentPoly> t;
    t.reserve(k + 2);
    t.push_back(LaurentPoly::constant(r, 1));
    t.push_back(-sub(k, k));
    std::vector<LaurentPoly> v(k, LaurentPoly(r));  // A_k^j C
    for (std::size_t i = 0; i < k; ++i) v[i] = sub(i, k);
    for (std::size_t j = 0; j + 1 < k + 1; ++j) {
      LaurentPoly s(r);
      for (std::size_t i = 0; i < k; ++i)
        if (!sub(k, i).is_zero() && !v[i].is_zero()) s += sub(k, i) * v[i];
      t.push_back(-s);
      if (j + 2 < k + 1) {
        std::vector<LaurentPoly> w(k, LaurentPoly(r));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t l = 0; l < k; ++l)
            if (!sub(i, l).is_zero() && !v[l].is_zero()) w[i] += sub(i, l) * v[l];
        v = std::move(w);
      }
    }
    std::vector<LaurentPoly> next(k + 2, LaurentPoly(r));
    for (std::size_t i = 0; i < k + 2; ++i)
      for (std::size_t j = 0; j <= std::min(i, k); ++j)
        if (!t[i - j].is_zero() && !q[j].is_zero()) next[i] += t[i - j] * q[j];
    q = std::move(next);
  }
  CharPoly f;
  f.coeffs = std::move(q);
  if (n % 2 == 1)
    for (auto& c : f.coeffs) c = -c;
  return f;
}

DegreeData degree_extrema(const CharPoly& f, const IntVec& u) {
  if (std::all_of(u.begin(), u.end(), [](std::int64_t x) { return x == 0; }))
    throw ValidationError("direction must be nonzero");
  DegreeData d;
  d.direction = u;
  for (const auto& c : f.coeffs) {
    d.a.push_back(c.max_dot(u));
    d.b.push_back(c.min_dot(u));
  }
  return d;
}

CharPolySeries::CharPolySeries(const LaurentMatrix& m, std::uint64_t p_max) {
  if (p_max < 1) throw ValidationError("p_max must be at least 1");
  LaurentMatrix power = m;
  for (std::uint64_t p = 1; p <= p_max; ++p) {
    if (p > 1) power = power * m;
    polys_.push_back(char_poly(power));
    powers_.push_back(power);
  }
}

SlopeEstimate CharPolySeries::slope(const IntVec& u) const {
  SlopeEstimate s;
  s.p_max = p_max();
  bool have = false;
  for (std::uint64_t p = 1; p <= p_max(); ++p) {
    DegreeData d = degree_extrema(at(p), u);
    for (std::size_t k = 1; k < d.a.size(); ++k) {
      if (!d.a[k]) continue;
      long kp = static_cast<long>(k * p);
      Rational hi(static_cast<long>(*d.a[k]), kp), lo(static_cast<long>(*d.b[k]), kp);
      hi.canonicalize();
      lo.canonicalize();
      if (!have || hi > s.upper) s.upper = hi;
      if (!have || lo < s.lower) s.lower = lo;
      have = true;
    }
  }
  if (!have) throw InternalError("characteristic polynomial has no nonleading coefficients");
  return s;
}

SlopeEstimate slope_estimate(const LaurentMatrix& m, const IntVec& u, std::uint64_t p_max) {
  return CharPolySeries(m, p_max).slope(u);
}

}  // namespace conebound
