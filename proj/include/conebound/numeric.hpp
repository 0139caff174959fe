#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace conebound {

using Integer = mpz_class;
using Rational = mpq_class;

using IntVec = std::vector<std::int64_t>;
using RatVec = std::vector<Rational>;

Rational make_rational(const Integer& num, const Integer& den);
Rational parse_rational(std::string_view text);  // "p" or "p/q"
std::string to_string(const Integer& v);
std::string to_string(const Rational& v);

// Largest/smallest dyadic rational with r^2 <= x (resp. >= x), error below 2^-bits.
Rational sqrt_lower(const Rational& x, unsigned bits = 48);
Rational sqrt_upper(const Rational& x, unsigned bits = 48);

Integer floor_of(const Rational& v);
Integer ceil_of(const Rational& v);
std::int64_t to_int64(const Integer& v);  // throws ResourceError on overflow

// Decimal rendering with `digits` significant digits, no exponent, dot separator.
std::string to_decimal(const Rational& v, int digits);

std::int64_t gcd_of(const IntVec& v);
std::int64_t dot(const IntVec& a, const IntVec& b);
Rational dot(const RatVec& a, const IntVec& b);
Integer norm2(const IntVec& v);
std::int64_t norm1(const IntVec& v);
std::string to_string(const IntVec& v);

}  // namespace conebound
