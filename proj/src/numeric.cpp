#include "conebound/numeric.hpp"

#include <cstdlib>
#include <numeric>
#include <sstream>

#include "conebound/errors.hpp"

namespace conebound {

Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw ValidationError("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(Integer(s));
    return make_rational(Integer(s.substr(0, slash)), Integer(s.substr(slash + 1)));
  } catch (const std::invalid_argument&) {
    throw ValidationError("not a rational number: '" + s + "'");
  }
}

std::string to_string(const Integer& v) { return v.get_str(); }

std::string to_string(const Rational& v) {
  if (v.get_den() == 1) return v.get_num().get_str();
  return v.get_num().get_str() + "/" + v.get_den().get_str();
}

namespace {

Integer isqrt_floor(const Integer& v) {
  Integer r;
  mpz_sqrt(r.get_mpz_t(), v.get_mpz_t());
  return r;
}

}  // namespace

Rational sqrt_lower(const Rational& x, unsigned bits) {
  if (x < 0) throw InternalError("sqrt of negative value");
  Integer scale = Integer(1) << bits;
  Integer ab = x.get_num() * x.get_den() * scale * scale;
  return make_rational(isqrt_floor(ab), x.get_den() * scale);
}

Rational sqrt_upper(const Rational& x, unsigned bits) {
  if (x < 0) throw InternalError("sqrt of negative value");
  Integer scale = Integer(1) << bits;
  Integer ab = x.get_num() * x.get_den() * scale * scale;
  Integer r = isqrt_floor(ab);
  if (r * r != ab) r += 1;
  return make_rational(r, x.get_den() * scale);
}

Integer floor_of(const Rational& v) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  return r;
}

Integer ceil_of(const Rational& v) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  return r;
}

std::int64_t to_int64(const Integer& v) {
  if (!v.fits_slong_p()) throw ResourceError("integer exceeds 64-bit range: " + v.get_str());
  return v.get_si();
}

std::string to_decimal(const Rational& v, int digits) {
  if (v == 0) return "0";
  std::string sign = v < 0 ? "-" : "";
  Rational a = abs(v);
  // Find k with 10^(digits-1) <= a * 10^k < 10^digits.
  Integer lo, hi;
  mpz_ui_pow_ui(lo.get_mpz_t(), 10, static_cast<unsigned long>(digits - 1));
  hi = lo * 10;
  long k = 0;
  Rational scaled = a;
  while (scaled >= hi) { scaled /= 10; --k; }
  while (scaled < lo) { scaled *= 10; ++k; }
  Integer m = floor_of(scaled + Rational(1, 2));
  if (m == hi) { m /= 10; --k; }
  std::string ds = m.get_str();
  // value = m * 10^-k
  std::string out;
  if (k <= 0) {
    out = ds + std::string(static_cast<std::size_t>(-k), '0');
  } else if (static_cast<std::size_t>(k) >= ds.size()) {
    out = "0." + std::string(static_cast<std::size_t>(k) - ds.size(), '0') + ds;
  } else {
    out = ds.substr(0, ds.size() - static_cast<std::size_t>(k)) + "." +
          ds.substr(ds.size() - static_cast<std::size_t>(k));
  }
  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  return sign + out;
}

std::int64_t gcd_of(const IntVec& v) {
  std::int64_t g = 0;
  for (auto x : v) g = std::gcd(g, x);
  return g;
}

std::int64_t dot(const IntVec& a, const IntVec& b) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Rational dot(const RatVec& a, const IntVec& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Integer norm2(const IntVec& v) {
  Integer s = 0;
  for (auto x : v) s += Integer(static_cast<long>(x)) * static_cast<long>(x);
  return s;
}

std::int64_t norm1(const IntVec& v) {
  std::int64_t s = 0;
  for (auto x : v) s += std::llabs(x);
  return s;
}

std::string to_string(const IntVec& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

}  // namespace conebound
