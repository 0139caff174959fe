#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "conebound/geometry.hpp"
#include "conebound/graph_map.hpp"
#include "conebound/laurent.hpp"

namespace conebound {

enum class OmegaSource { forward, inverse_data, mirror, cone_approximation };
std::string to_string(OmegaSource s);
OmegaSource parse_omega_source(const std::string& s);
// Exact sources are the three computed from supports; the cone approximation is not.
bool is_exact(OmegaSource s);

// Occupied fundamental-domain indices of psi~^p(D_0) (possibly translated).
struct SupportPolytope {
  std::uint64_t power = 0;
  std::vector<IntVec> points;  // sorted; empty when only the hull was requested
  Polytope hull;
  OmegaSource source = OmegaSource::forward;

  std::size_t rank() const { return hull.rank; }
  std::int64_t max_dot(const IntVec& u) const;  // N'_1(u, p)
  std::int64_t min_dot(const IntVec& u) const;  // N'_2(u, p)
};

// Supports of all entries of M^p, by Boolean propagation over dense bitmaps. Since the
// coefficients of M are nonnegative, supp(M^p) is exactly the reachable shift set.
// Thread-safe; powers are computed in order and hulls cached.
class SupportEngine {
 public:
  explicit SupportEngine(const LaurentMatrix& m, std::size_t retain_cells = std::size_t{1} << 21);
  ~SupportEngine();
  SupportEngine(const SupportEngine&) = delete;
  SupportEngine& operator=(const SupportEngine&) = delete;

  std::size_t rank() const { return rank_; }
  Polytope hull(std::uint64_t p);
  // Sorted occupied points; ResourceError if the bitmap for p was too large to retain.
  std::vector<IntVec> points(std::uint64_t p);
  SupportPolytope support(std::uint64_t p, bool with_points);
  std::uint64_t computed();

 private:
  struct Bitmap;
  struct Term {
    std::size_t from, to;
    IntVec shift;
  };
  void advance_locked();
  std::vector<IntVec> points_of(const Bitmap& b) const;

  std::size_t rank_, dim_, retain_cells_;
  std::vector<Term> terms_;
  IntVec shift_lo_, shift_hi_;
  std::mutex mutex_;
  std::vector<std::unique_ptr<Bitmap>> state_;     // per edge, at power computed_
  std::vector<std::unique_ptr<Bitmap>> retained_;  // union bitmaps, while small enough
  std::vector<Polytope> hulls_;
};

SupportPolytope support_of_power(const LiftedGraphMap& map, std::uint64_t p);
SupportPolytope oracle_iterate(const LiftedGraphMap& map, std::uint64_t p,
                               std::uint64_t step_budget = 50'000'000);

struct OmegaOptions {
  bool use_inverse = true;   // consult the inverse dataset when present
  bool allow_mirror = false;
};

// Persistent hull storage consulted by OmegaProvider before computing; keyed by the
// engine that produced the hull (forward or inverse_data) and the power.
class HullStore {
 public:
  virtual ~HullStore() = default;
  virtual std::optional<Polytope> load(OmegaSource engine, std::uint64_t p) = 0;
  virtual void store(OmegaSource engine, std::uint64_t p, const Polytope& hull) = 0;
};

// Omega of words h^x psi~^y for a fixed dataset, with negative powers resolved by the
// inverse dataset or by the mirror identity Omega(psi~^-p) = -Omega(psi~^p).
class OmegaProvider {
 public:
  OmegaProvider(const LiftedGraphMap& map, OmegaOptions options);

  const LiftedGraphMap& map() const { return map_; }
  SupportEngine& forward() { return *forward_; }
  SupportEngine* inverse() { return inverse_.get(); }
  const OmegaOptions& options() const { return options_; }
  OmegaSource source_for(std::int64_t y) const;  // ValidationError if y < 0 is unsupported
  SupportPolytope power(std::int64_t y);
  void set_store(std::shared_ptr<HullStore> store) { store_ = std::move(store); }

 private:
  Polytope engine_hull(OmegaSource engine, std::uint64_t p);

  const LiftedGraphMap& map_;
  OmegaOptions options_;
  std::unique_ptr<SupportEngine> forward_;
  std::unique_ptr<SupportEngine> inverse_;
  std::shared_ptr<HullStore> store_;
};

// x + Omega(psi~^y), tagged with its source.
SupportPolytope omega_of_word(OmegaProvider& omega, const IntVec& x, std::int64_t y);

}  // namespace conebound
