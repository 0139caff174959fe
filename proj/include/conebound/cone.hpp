#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conebound/geometry.hpp"
#include "conebound/graph_map.hpp"
#include "conebound/laurent.hpp"
#include "conebound/support.hpp"

namespace conebound {

// <normal, x> <= slope * p, with lower = min slope in the same direction.
struct Facet {
  IntVec normal;
  Rational slope;
  Rational lower;
  friend bool operator==(const Facet&, const Facet&) = default;
};

// Reconstructed dual cone {(x, p) : x in pQ}, Q = {x : <u_i, x> <= A_i}.
struct DualConeModel {
  std::size_t rank = 1;
  std::vector<Facet> facets;
  std::int64_t C = 0;
  std::optional<std::uint64_t> k0;
  std::uint64_t p_max = 0;
  std::uint64_t facet_power = 0;  // power whose trace support gave the facet normals
  bool low_confidence = false;
  bool degenerate = false;        // Q is lower-dimensional
  bool axis_interior = false;     // 0 in the interior of Q
  std::vector<RatVec> slice;      // vertices of Q
  std::vector<Polytope> support_hulls;  // hull of Omega(psi~^p), p = 0..p_max
};

DualConeModel estimate_dual_cone(const LiftedGraphMap& map, SupportEngine& engine, std::uint64_t p_max);
DualConeModel estimate_dual_cone(const LiftedGraphMap& map, std::uint64_t p_max);
// k0 is the primitivity power of M, if any.
DualConeModel estimate_dual_cone(const LaurentMatrix& M, std::optional<std::uint64_t> k0,
                                 SupportEngine& engine, std::uint64_t p_max);

// Every vertex of `support` satisfies <u_i, x> <= A_i p + C.
bool within_fattened_cone(const DualConeModel& model, const Polytope& support, std::uint64_t p);
// pQ as a rational polytope.
std::vector<RatVec> scaled_slice(const DualConeModel& model, const Rational& p);

// Fibered cone {alpha : <alpha, w_j> > 0}, w_j = primitive integer multiples of (v_j, 1)
// over the vertices v_j of Q.
struct FiberedConeModel {
  std::size_t rank = 1;
  std::vector<IntVec> dual_rays;
  Rational tolerance{1, 100};
  std::int64_t C = 0;
};

FiberedConeModel fibered_cone(const DualConeModel& model, Rational tolerance = Rational(1, 100));

enum class Verdict { interior, exterior, near_boundary };
std::string to_string(Verdict v);

struct Membership {
  Verdict verdict = Verdict::interior;
  Rational margin;  // min_j <alpha, w_j> / |w_j|_1
  Rational threshold;  // tolerance * |alpha|_1
  std::int64_t C = 0;
};

Membership cone_membership(const IntVec& alpha, const FiberedConeModel& cone);

// A subcone {n (sigma, 1) : sigma in slice, n > 0}.
struct Subcone {
  std::string id;
  std::size_t rank = 1;
  std::vector<RatVec> slice;
};

// (1 - mu) times the closure of the fibered slice, scaled about the monodromy class.
Subcone shrunken_subcone(const FiberedConeModel& cone, const Rational& mu);
Subcone subcone_from_rays(const std::vector<IntVec>& rays);
bool subcone_contains(const Subcone& P, const IntVec& alpha);
// Least normalized slack of P's generators in the fibered cone; positive iff strictly inside.
Rational subcone_margin(const Subcone& P, const FiberedConeModel& cone);

struct EpsilonResult {
  Rational epsilon;
  bool degenerate = false;  // P is a single ray
};

// Certified lower bound on the comparability constant: for sigma in P and x in R^r,
// every q in x + <sigma, x> Q has eps |x| <= |q| <= |x| / eps.
EpsilonResult epsilon_of_subcone(const Subcone& P, const DualConeModel& model,
                                 const FiberedConeModel& cone);

}  // namespace conebound
