#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conebound/cone.hpp"
#include "conebound/geometry.hpp"
#include "conebound/graph_map.hpp"
#include "conebound/lattice.hpp"
#include "conebound/support.hpp"

namespace conebound {

struct Decomposition {
  std::int64_t n = 0;
  PerpLattice lattice;
  Membership membership;
};

// alpha must be primitive and interior to the fibered cone.
Decomposition decompose(const IntVec& alpha, const FiberedConeModel& cone);

// An element sum c_i beta_i = (x, y) of alpha-perp. It acts on domain indices as
// h^x psi~^action with action = -y, so its obstacle is x + Omega(psi~^action).
struct GammaWord {
  IntVec coefficients;
  IntVec x;
  std::int64_t y = 0;
  std::int64_t action = 0;
  OmegaSource source = OmegaSource::forward;
  Polytope obstacle;  // before the safety dilation
  friend bool operator==(const GammaWord&, const GammaWord&) = default;
};

// Words with |zeta(word)|^2 <= radius2, obstacles not yet attached, sorted by coefficients.
std::vector<GammaWord> enumerate_words(const PerpLattice& L, const Integer& radius2);

// Facet data a certificate relies on for the words it omits: Omega(psi~^k) satisfies
// <u, w> <= A k + C, and the negative powers satisfy <u, -w> <= A k + C_negative.
struct ConeBound {
  std::vector<Facet> facets;
  std::int64_t C = 0;
  std::int64_t C_negative = 0;
  friend bool operator==(const ConeBound&, const ConeBound&) = default;
};

// Squared radius beyond which no word's obstacle, dilated by s, can meet [-R, R]^r under
// the cone bound (also at least r R^2).
Integer truncation_radius2(const ConeBound& cone, const RatVec& sigma, std::int64_t R, std::int64_t s);

// Radius of the deep-point search inside a box of radius R: any obstacle within the
// largest possible distance from a searched point still meets the box.
std::int64_t search_radius(std::int64_t R, std::size_t rank);

// Integer box containing x + (sign k) {w : <u, w> <= A |k| + C}; stands in for an
// uncomputed Omega.
Polytope cone_approximation(const ConeBound& cone, const IntVec& x, std::int64_t action);

struct CertifyOptions {
  std::uint64_t p_max = 64;
  std::int64_t safety = 1;
  std::optional<std::int64_t> box_radius;  // default ceil(kappa n^{1/r})
  Rational kappa{4};
  unsigned max_doublings = 3;
  std::uint64_t word_power_cap = 4096;
  bool asymptotic = false;
  unsigned threads = 1;
};

struct BoundCertificate {
  int format_version = 1;
  std::string tool_version;
  std::string dataset_hash;
  IntVec alpha;
  std::int64_t n = 0;
  std::string subcone_id;
  std::uint64_t p_max = 0;
  std::int64_t safety = 1;
  Rational epsilon;
  std::int64_t box_radius = 0;
  std::int64_t search_radius = 0;  // the deep point is sought in [-search, search]^r
  Integer truncation_radius2;
  std::uint64_t word_power_cap = 0;
  bool use_inverse = true;
  bool allow_mirror = false;
  std::uint64_t cone_p_max = 0;
  ConeBound cone;
  std::vector<IntVec> basis;
  std::vector<GammaWord> words;
  IntVec deep_point;
  Rational deep_dist2;
  std::uint64_t K = 0;
  Rational bound;
  std::string mode = "certified";  // certified | asymptotic
  std::string status = "ok";       // ok | inconclusive
  std::vector<std::string> diagnostics;
  std::vector<std::string> assumptions{
      "gamma and gamma' are essential simple closed curves contained in the single fundamental "
      "domains D_0 and D_y, so disjointness of domain index sets implies disjointness of curves"};
  friend bool operator==(const BoundCertificate&, const BoundCertificate&) = default;
};

// Upper bound 2/(nK) on the translation length of the monodromy of alpha.
BoundCertificate certify(const IntVec& alpha, OmegaProvider& omega, const std::string& dataset_hash,
                         const DualConeModel& model, const Subcone& P, const CertifyOptions& options);

enum class VerifyStatus { pass, fail, unverifiable };
std::string to_string(VerifyStatus s);

struct VerifyResult {
  VerifyStatus status = VerifyStatus::pass;
  std::string predicate;  // first violated predicate
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t oracle_budget = 1'000'000;  // substitution steps before switching engines
  std::uint64_t max_power = 1u << 16;
};

// Recomputes every support from the dataset alone and re-checks each predicate exactly.
VerifyResult verify_certificate(const BoundCertificate& cert, const LiftedGraphMap& map,
                                const std::string& dataset_hash, const VerifyOptions& options = {});

struct SweepSpec {
  IntVec base;
  IntVec direction;
  std::int64_t first = 0;
  std::int64_t last = 0;
};

struct SweepRow {
  std::int64_t index = 0;
  IntVec requested;
  IntVec alpha;  // primitive reduction
  std::int64_t n = 0;
  Integer covol2;
  Integer systole2;
  Rational deep_dist2;
  std::uint64_t K = 0;
  Rational bound;
  std::string normalized;  // bound n^{1+1/r}, 12 significant digits
  std::string status;      // ok | inconclusive | exterior | near-boundary | outside-subcone | error: ...
  bool truncation_limited = false;  // K = p_max
};

std::vector<SweepRow> sweep(const SweepSpec& spec, OmegaProvider& omega, const std::string& dataset_hash,
                            const DualConeModel& model, const Subcone& P, const CertifyOptions& options);

// bound * n^{1 + 1/r} rendered with `digits` significant digits.
std::string normalized_bound(const Rational& bound, std::int64_t n, std::size_t rank, int digits = 12);

}  // namespace conebound
