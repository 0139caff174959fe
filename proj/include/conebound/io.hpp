#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "conebound/cone.hpp"
#include "conebound/graph_map.hpp"
#include "conebound/laurent.hpp"
#include "conebound/pipeline.hpp"
#include "conebound/support.hpp"

namespace conebound {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolVersion = "conebound 1.0.0";

// Parsed dataset plus its content hash: SHA-256 of the canonical (sorted-key, compact)
// JSON of every field except `metadata`.
struct Dataset {
  LiftedGraphMap map;
  std::string hash;
};

Dataset parse_dataset(const std::string& text);
Dataset load_dataset(const std::filesystem::path& path);
std::string emit_dataset(const LiftedGraphMap& map);  // canonical, metadata included
std::string dataset_hash(const LiftedGraphMap& map);

std::string sha256_hex(const std::string& data);
std::string read_file(const std::filesystem::path& path);
// Writes to a temporary sibling, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& data);

// Polynomial <-> [[exponent-vector, "coefficient"], ...] in lexicographic order.
std::string emit_poly(const LaurentPoly& p);
LaurentPoly parse_poly(const std::string& json_text, std::size_t rank);

// Write-once cache of support hulls keyed by (dataset hash, source, p).
class SupportCache {
 public:
  explicit SupportCache(std::filesystem::path dir);
  std::optional<SupportPolytope> load(const std::string& hash, OmegaSource source,
                                      std::uint64_t p) const;
  void store(const std::string& hash, const SupportPolytope& s) const;

 private:
  std::filesystem::path file_for(const std::string& hash, OmegaSource source, std::uint64_t p) const;
  std::filesystem::path dir_;
};

// HullStore backed by a SupportCache for one dataset.
std::shared_ptr<HullStore> make_hull_store(std::filesystem::path dir, std::string dataset_hash);

// Certificates: canonical JSON (sorted keys, two-space indent); integers that may exceed
// 64 bits and all rationals are decimal strings, rationals as [numerator, denominator].
std::string emit_certificate(const BoundCertificate& cert);
BoundCertificate parse_certificate(const std::string& text);

std::string emit_cone_model(const DualConeModel& model, const FiberedConeModel& cone);

inline constexpr const char* kSweepHeader = "alpha,n,covol2,systole2,deep_dist2,K,bound_num,bound_den,normalized";
// Rows with status "ok" only; alpha is rendered with ';' between coordinates.
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_text(const std::vector<SweepRow>& rows);

}  // namespace conebound
