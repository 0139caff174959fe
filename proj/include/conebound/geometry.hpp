#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "conebound/numeric.hpp"

namespace conebound {

// Convex hull of integer points. r = 1: [min] or [min, max]; r = 2: counter-clockwise,
// no collinear vertices, starting at the lexicographically smallest point.
// r >= 3 throws CapabilityError.
std::vector<IntVec> convex_hull(std::vector<IntVec> points, std::size_t rank);

// Lattice polytope stored by its hull vertices (same ordering as convex_hull).
struct Polytope {
  std::size_t rank = 1;
  std::vector<IntVec> vertices;
  friend bool operator==(const Polytope&, const Polytope&) = default;
};

Polytope make_polytope(std::vector<IntVec> points, std::size_t rank);
Polytope translate(const Polytope& p, const IntVec& x);
Polytope negate(const Polytope& p);
Polytope dilate(const Polytope& p, std::int64_t s);  // Minkowski sum with [-s, s]^r
std::pair<IntVec, IntVec> bounding_box(const Polytope& p);
bool inside_box(const Polytope& p, std::int64_t radius);  // within [-R, R]^r
bool contains(const Polytope& p, const IntVec& y);        // closed

// Exact squared distance as a fraction num / den, den > 0.
struct Fraction {
  __int128 num = 0;
  __int128 den = 1;
  friend bool operator<(const Fraction& a, const Fraction& b) { return a.num * b.den < b.num * a.den; }
  friend bool operator==(const Fraction& a, const Fraction& b) { return a.num * b.den == b.num * a.den; }
  friend bool operator<=(const Fraction& a, const Fraction& b) { return !(b < a); }
  Rational to_rational() const;
};

Fraction squared_distance_fraction(const IntVec& y, const Polytope& p);
Rational squared_distance(const IntVec& y, const Polytope& p);

bool intersects(const Polytope& a, const Polytope& b);  // closed sets; touching counts

// Squared Hausdorff distance between two lattice polytopes.
Rational hausdorff2(const Polytope& a, const Polytope& b);

// Rational polytopes (r = 1 or 2), used for reconstructed cone slices.
struct Halfspace {
  IntVec normal;    // <normal, x> <= offset
  Rational offset;
};

// Vertices of a bounded intersection of halfspaces, ordered as convex_hull. Throws
// ValidationError when empty or unbounded.
std::vector<RatVec> halfspace_vertices(const std::vector<Halfspace>& hs, std::size_t rank);
std::vector<RatVec> rational_hull(std::vector<RatVec> points, std::size_t rank);
Rational squared_distance(const RatVec& y, const std::vector<RatVec>& hull);
bool contains(const std::vector<RatVec>& hull, const RatVec& y);
// Squared Hausdorff distance between a lattice polytope and a rational polytope.
Rational hausdorff2(const Polytope& a, const std::vector<RatVec>& b);

}  // namespace conebound
