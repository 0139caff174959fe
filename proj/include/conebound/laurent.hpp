#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conebound/numeric.hpp"

namespace conebound {

// Integer Laurent polynomial in t_1..t_r. Terms are kept sorted lexicographically by
// exponent with no zero coefficients, so equality is structural.
class LaurentPoly {
 public:
  explicit LaurentPoly(std::size_t rank = 1);

  static LaurentPoly constant(std::size_t rank, const Integer& c);
  static LaurentPoly monomial(const IntVec& exponent, const Integer& c = 1);
  static LaurentPoly from_terms(std::size_t rank, std::vector<std::pair<IntVec, Integer>> terms);

  std::size_t rank() const { return rank_; }
  std::size_t size() const { return coeffs_.size(); }
  bool is_zero() const { return coeffs_.empty(); }
  bool is_constant() const;

  IntVec exponent(std::size_t i) const;
  const std::int64_t* exponent_data(std::size_t i) const { return exps_.data() + i * rank_; }
  const Integer& coeff(std::size_t i) const { return coeffs_[i]; }
  Integer coeff_of(const IntVec& exponent) const;
  std::vector<IntVec> support() const;

  // max / min of <u, e> over the support; nullopt for the zero polynomial.
  std::optional<std::int64_t> max_dot(const IntVec& u) const;
  std::optional<std::int64_t> min_dot(const IntVec& u) const;

  Rational evaluate(const RatVec& t) const;

  LaurentPoly operator-() const;
  friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b);
  friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b);
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
  LaurentPoly& operator+=(const LaurentPoly& b) { return *this = *this + b; }
  LaurentPoly& operator*=(const LaurentPoly& b) { return *this = *this * b; }
  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b);

  std::string to_string() const;

 private:
  std::size_t rank_;
  std::vector<std::int64_t> exps_;  // size() * rank_, row-major
  std::vector<Integer> coeffs_;
};

LaurentPoly poly_add(const LaurentPoly& p, const LaurentPoly& q);
LaurentPoly poly_mul(const LaurentPoly& p, const LaurentPoly& q);

class LaurentMatrix {
 public:
  LaurentMatrix(std::size_t dim, std::size_t rank);

  static LaurentMatrix identity(std::size_t dim, std::size_t rank);

  std::size_t dim() const { return dim_; }
  std::size_t rank() const { return rank_; }
  LaurentPoly& at(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
  const LaurentPoly& at(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }

  // Entrywise evaluation at t = v (components must be nonzero where negative powers occur).
  std::vector<std::vector<Rational>> evaluate(const RatVec& v) const;
  // Boolean pattern of nonzero entries.
  std::vector<std::vector<bool>> pattern() const;

  friend LaurentMatrix operator*(const LaurentMatrix& a, const LaurentMatrix& b);
  friend bool operator==(const LaurentMatrix& a, const LaurentMatrix& b);

 private:
  std::size_t dim_;
  std::size_t rank_;
  std::vector<LaurentPoly> entries_;
};

LaurentMatrix mat_mul(const LaurentMatrix& a, const LaurentMatrix& b);
LaurentMatrix mat_pow(const LaurentMatrix& m, std::uint64_t p);

// F(x, t) = det(M - xI) = sum_k coeffs[k] x^(m-k); coeffs[0] = (-1)^m.
struct CharPoly {
  std::vector<LaurentPoly> coeffs;
  std::size_t dim() const { return coeffs.size() - 1; }
};

// Berkowitz; uses only ring operations.
CharPoly char_poly(const LaurentMatrix& m);

// a[k], b[k] for k = 0..m: max / min of <u, e> over supp(c_k); nullopt when c_k = 0.
struct DegreeData {
  IntVec direction;
  std::vector<std::optional<std::int64_t>> a;
  std::vector<std::optional<std::int64_t>> b;
};

DegreeData degree_extrema(const CharPoly& f, const IntVec& u);

struct SlopeEstimate {
  Rational upper;  // A_u = max a_k(p) / (k p)
  Rational lower;  // B_u = min b_k(p) / (k p)
  std::uint64_t p_max = 0;
};

// Char polys of M^1..M^p_max, computed once and queried per direction.
class CharPolySeries {
 public:
  CharPolySeries(const LaurentMatrix& m, std::uint64_t p_max);

  std::uint64_t p_max() const { return static_cast<std::uint64_t>(polys_.size()); }
  const CharPoly& at(std::uint64_t p) const { return polys_.at(p - 1); }
  const LaurentMatrix& power(std::uint64_t p) const { return powers_.at(p - 1); }
  SlopeEstimate slope(const IntVec& u) const;

 private:
  std::vector<LaurentMatrix> powers_;
  std::vector<CharPoly> polys_;
};

SlopeEstimate slope_estimate(const LaurentMatrix& m, const IntVec& u, std::uint64_t p_max);

}  // namespace conebound
