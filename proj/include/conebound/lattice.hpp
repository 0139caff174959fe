#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "conebound/geometry.hpp"
#include "conebound/numeric.hpp"

namespace conebound {

using IntMatrix = std::vector<std::vector<Integer>>;

Integer determinant(IntMatrix m);  // fraction-free elimination
IntMatrix gram_matrix(const std::vector<IntVec>& vectors);

// Row Hermite normal form: echelon, positive pivots, entries above a pivot in [0, pivot).
// Zero rows are dropped.
std::vector<IntVec> hermite_normal_form(const std::vector<IntVec>& rows);

// Signed r x r minors of an r x (r + 1) matrix; entry i omits column i, with sign (-1)^i.
// For a basis of alpha-perp this vector is +-alpha exactly when the basis is saturated.
std::vector<Integer> maximal_minors(const std::vector<IntVec>& rows);
bool is_saturated_kernel(const std::vector<IntVec>& basis, const IntVec& alpha);

// Kernel lattice of a primitive class alpha = (p_1, ..., p_r, n) and its projection
// zeta, which drops the last coordinate.
struct PerpLattice {
  IntVec alpha;
  std::vector<IntVec> basis;      // beta_i in Z^{r+1}, Hermite normal form
  std::vector<IntVec> projected;  // zeta(beta_i) in Z^r
  IntMatrix gram;
  Integer covol2;
  std::size_t rank() const { return projected.size(); }
};

PerpLattice perp_basis(const IntVec& alpha);
// Same lattice in another basis (rows of `basis` must span alpha-perp).
PerpLattice with_basis(const IntVec& alpha, std::vector<IntVec> basis);
Integer covolume(const PerpLattice& L);

// Exact LLL (delta = 3/4). `transform` receives U with reduced = U * input.
std::vector<IntVec> lll_reduce(std::vector<IntVec> basis, std::vector<IntVec>* transform = nullptr);

struct Systole {
  Integer length2;
  IntVec vector;        // shortest nonzero lattice vector, lexicographically smallest
  IntVec coefficients;  // in the given basis
};
Systole systole(const std::vector<IntVec>& basis);  // rank <= 4
Systole systole(const PerpLattice& L);

// All coefficient vectors c (in the given basis) with |sum c_i b_i|^2 <= radius2, sorted
// lexicographically. Throws ResourceError above `cap` points, CapabilityError for rank > 4.
std::vector<IntVec> enumerate_ball(const std::vector<IntVec>& basis, const Integer& radius2,
                                   std::size_t cap = 5'000'000);

struct DeepPoint {
  IntVec y;
  Fraction dist2;
  std::uint64_t scanned = 0;
};

// Argmax over [-R, R]^r of the squared distance to the union of obstacles; ties go to the
// lexicographically smallest point. Seeds only speed up the scan.
DeepPoint deep_point(const std::vector<Polytope>& obstacles, std::int64_t R,
                     const std::vector<IntVec>& seeds = {}, unsigned threads = 1);
Fraction min_distance2(const IntVec& y, const std::vector<Polytope>& obstacles);

// Candidate deep points from the lattice dichotomy: half-sums of reduced basis vectors of
// the projected lattice, and for a degenerate lattice, the midpoint between the cosets of
// the sublattice spanned by its short vectors.
std::vector<IntVec> dichotomy_seeds(const PerpLattice& L, std::int64_t R);

}  // namespace conebound
