#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "conebound/laurent.hpp"
#include "conebound/numeric.hpp"

namespace conebound {

// Lift e_s of edge e runs from (tail, s) to (head, s + shift).
struct Edge {
  std::string name;
  std::size_t tail = 0;
  std::size_t head = 0;
  IntVec shift;
};

// Traverse the copy of `edge` lying in domain `shift`; orientation -1 runs it head to tail.
struct Step {
  std::size_t edge = 0;
  IntVec shift;
  int orientation = 1;
};

// One train-track map on the Z^r cover: images of the domain-0 lift of each edge.
struct TrackMap {
  std::size_t rank = 1;
  std::vector<std::string> vertices;
  std::vector<Edge> edges;
  std::vector<std::vector<Step>> images;  // indexed like edges
};

struct LiftedVertex {
  std::size_t vertex = 0;
  IntVec shift;
  friend bool operator==(const LiftedVertex&, const LiftedVertex&) = default;
};

struct ValidationReport {
  std::vector<LiftedVertex> vertex_map;   // image of (v, 0)
  std::optional<std::uint64_t> k0;        // first power with M(1)^k strictly positive
  std::vector<std::string> warnings;
};

// Path-consistency, well-defined vertex map and Z^r-equivariance; throws ValidationError
// naming the edge and step at fault. Irreducibility failures are warnings only.
ValidationReport validate_track_map(const TrackMap& map);

enum class PathCheck { strict, skip };

// Entry (e, f) = sum of t^s over steps (f, s, +-1) in the image of e.
LaurentMatrix build_transition_matrix(const TrackMap& map, PathCheck check = PathCheck::strict);

// First k <= (m-1)^2 + 1 with all entries of pattern^k positive.
std::optional<std::uint64_t> primitivity_power(const std::vector<std::vector<bool>>& pattern);

struct Metadata {
  std::string name;
  std::string description;
  std::string provenance;
  std::map<std::string, std::string> extra;
};

class LiftedGraphMap {
 public:
  LiftedGraphMap(TrackMap forward, std::optional<TrackMap> inverse,
                 std::optional<IntVec> euler_functional, Metadata metadata);

  std::size_t rank() const { return forward_.rank; }
  const TrackMap& forward() const { return forward_; }
  const std::optional<TrackMap>& inverse() const { return inverse_; }
  const std::optional<IntVec>& euler_functional() const { return euler_; }
  const Metadata& metadata() const { return metadata_; }
  const ValidationReport& report() const { return report_; }
  const std::optional<ValidationReport>& inverse_report() const { return inverse_report_; }
  const LaurentMatrix& transition() const { return transition_; }
  const std::optional<LaurentMatrix>& inverse_transition() const { return inverse_transition_; }

 private:
  TrackMap forward_;
  std::optional<TrackMap> inverse_;
  std::optional<IntVec> euler_;
  Metadata metadata_;
  ValidationReport report_;
  std::optional<ValidationReport> inverse_report_;
  LaurentMatrix transition_;
  std::optional<LaurentMatrix> inverse_transition_;
};

// Literal edge-path substitution p times from all domain-0 edges; returns occupied shifts.
// Throws ResourceError once the path exceeds step_budget steps.
std::set<IntVec> oracle_iterate_points(const TrackMap& map, std::uint64_t p,
                                       std::uint64_t step_budget);

}  // namespace conebound
