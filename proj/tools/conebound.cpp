// conebound: command-line front end. stdout carries the artifact, stderr the diagnostics.
// Exit codes: 0 success, 1 invalid input, 2 inconclusive or unverifiable, 3 verification failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

#include "conebound/cone.hpp"
#include "conebound/errors.hpp"
#include "conebound/io.hpp"
#include "conebound/laurent.hpp"
#include "conebound/pipeline.hpp"
#include "conebound/support.hpp"

using namespace conebound;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kInconclusive = 2, kFailed = 3 };

struct Flags {
  std::string dataset;
  std::string certificate;
  std::int64_t power = 0;
  std::string alpha;
  std::string base, direction;
  std::int64_t first = 1, last = 20;
  std::uint64_t p_max = 64;
  std::uint64_t cone_p_max = 12;
  std::int64_t box_radius = 0;
  std::string box_scale = "4";
  std::string margin = "1/4";
  std::int64_t safety = 1;
  std::string mode = "certified";
  std::uint64_t seed = 1;
  std::string cache_dir;
  std::string format = "text";
  unsigned threads = 1;
  bool mirror = false;
  bool no_inverse = false;
  std::string subcone;
  std::uint64_t word_power_cap = 4096;
  std::uint64_t oracle_budget = 1'000'000;
  std::uint64_t step_budget = 50'000'000;
  std::uint64_t max_power = 1u << 16;
  std::string output;
};

IntVec parse_ints(const std::string& text, const std::string& flag) {
  IntVec v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(flag + ": '" + item + "' is not an integer");
    }
  }
  if (v.empty()) throw ValidationError(flag + ": expected comma-separated integers");
  return v;
}

Rational parse_flag_rational(const std::string& text, const std::string& flag) {
  try {
    return parse_rational(text);
  } catch (const std::exception&) {
    throw ValidationError(flag + ": '" + text + "' is not a rational number");
  }
}

// Remembers which hulls came from disk so they can be spot-checked afterwards.
class TrackingStore : public HullStore {
 public:
  explicit TrackingStore(std::shared_ptr<HullStore> inner) : inner_(std::move(inner)) {}
  std::optional<Polytope> load(OmegaSource engine, std::uint64_t p) override {
    auto h = inner_->load(engine, p);
    if (h) {
      std::lock_guard lock(mutex_);
      hits_.emplace(engine, p);
    }
    return h;
  }
  void store(OmegaSource engine, std::uint64_t p, const Polytope& hull) override { inner_->store(engine, p, hull); }
  std::vector<std::pair<OmegaSource, std::uint64_t>> hits() {
    std::lock_guard lock(mutex_);
    return {hits_.begin(), hits_.end()};
  }

 private:
  std::shared_ptr<HullStore> inner_;
  std::mutex mutex_;
  std::set<std::pair<OmegaSource, std::uint64_t>> hits_;
};

struct Context {
  Dataset ds;
  std::unique_ptr<OmegaProvider> omega;
  std::shared_ptr<TrackingStore> store;
};

std::string cache_dir(const Flags& f) {
  if (!f.cache_dir.empty()) return f.cache_dir;
  if (const char* env = std::getenv("CONEBOUND_CACHE_DIR")) return env;
  return {};
}

Context open(const Flags& f) {
  Context c{load_dataset(f.dataset), nullptr, nullptr};
  for (const auto& w : c.ds.map.report().warnings) std::cerr << "warning: " << w << "\n";
  c.omega = std::make_unique<OmegaProvider>(c.ds.map, OmegaOptions{!f.no_inverse, f.mirror});
  if (auto dir = cache_dir(f); !dir.empty()) {
    c.store = std::make_shared<TrackingStore>(make_hull_store(dir, c.ds.hash));
    c.omega->set_store(c.store);
  }
  return c;
}

// Recomputes a seeded sample of the hulls that were served from the cache.
int spot_check(const Context& c, std::uint64_t seed) {
  if (!c.store) return kOk;
  auto hits = c.store->hits();
  if (hits.empty()) return kOk;
  std::mt19937_64 rng(seed);
  std::shuffle(hits.begin(), hits.end(), rng);
  hits.resize(std::min<std::size_t>(hits.size(), 3));
  for (const auto& [engine, p] : hits) {
    const LaurentMatrix& m = engine == OmegaSource::inverse_data ? *c.ds.map.inverse_transition() : c.ds.map.transition();
    SupportEngine fresh(m);
    auto cached = c.store->load(engine, p);
    if (!cached || cached->vertices != fresh.hull(p).vertices) {
      std::cerr << "error: --cache-dir: cached " << to_string(engine) << " hull at p = " << p
                << " disagrees with recomputation\n";
      return kFailed;
    }
  }
  std::cerr << "cache: spot-checked " << hits.size() << " hull(s)\n";
  return kOk;
}

void emit(const Flags& f, const std::string& text) {
  if (f.output.empty()) {
    std::cout << text;
    return;
  }
  write_file_atomic(f.output, text);
}

Subcone choose_subcone(const Flags& f, const FiberedConeModel& cone) {
  if (f.subcone.empty()) {
    Rational mu = parse_flag_rational(f.margin, "--margin");
    if (mu < 0 || mu >= 1) throw ValidationError("--margin: must lie in [0, 1)");
    return shrunken_subcone(cone, mu);
  }
  std::vector<IntVec> rays;
  std::stringstream ss(f.subcone);
  std::string ray;
  while (std::getline(ss, ray, ';')) rays.push_back(parse_ints(ray, "--subcone"));
  Subcone P = subcone_from_rays(rays);
  if (subcone_margin(P, cone) <= 0) throw ValidationError("--subcone: not strictly inside the fibered cone");
  return P;
}

CertifyOptions certify_options(const Flags& f) {
  CertifyOptions o;
  o.p_max = f.p_max;
  o.safety = f.safety;
  if (f.box_radius > 0) o.box_radius = f.box_radius;
  o.kappa = parse_flag_rational(f.box_scale, "--box-scale");
  if (o.kappa <= 0) throw ValidationError("--box-scale: must be positive");
  if (f.mode != "certified" && f.mode != "asymptotic")
    throw ValidationError("--mode: expected certified or asymptotic");
  o.asymptotic = f.mode == "asymptotic";
  o.word_power_cap = f.word_power_cap;
  o.threads = std::max(1u, f.threads);
  if (f.safety < 0) throw ValidationError("--safety: must be nonnegative");
  if (f.p_max == 0) throw ValidationError("--p-max: must be positive");
  return o;
}

std::string polytope_json(const SupportPolytope& s, std::int64_t power, bool with_points) {
  json j;
  j["power"] = power;
  j["source"] = to_string(s.source);
  j["hull"] = s.hull.vertices;
  if (with_points) j["points"] = s.points;
  return j.dump() + "\n";
}

int cmd_ingest(const Flags& f) {
  auto ds = load_dataset(f.dataset);
  const auto& m = ds.map;
  std::cout << ds.hash << "\n";
  std::cerr << "rank " << m.rank() << ", " << m.forward().vertices.size() << " vertices, "
            << m.forward().edges.size() << " edges, inverse " << (m.inverse() ? "present" : "absent")
            << ", primitivity power "
            << (m.report().k0 ? std::to_string(*m.report().k0) : std::string("none")) << "\n";
  for (const auto& w : m.report().warnings) std::cerr << "warning: " << w << "\n";
  return kOk;
}

int cmd_charpoly(const Flags& f) {
  if (f.power < 1) throw ValidationError("--power: must be at least 1");
  auto ds = load_dataset(f.dataset);
  auto cp = char_poly(mat_pow(ds.map.transition(), static_cast<std::uint64_t>(f.power)));
  json coeffs = json::array();
  for (const auto& c : cp.coeffs) coeffs.push_back(json::parse(emit_poly(c)));
  json j{{"power", f.power}, {"dimension", cp.dim()}, {"coefficients", coeffs}};
  emit(f, j.dump() + "\n");
  return kOk;
}

int cmd_omega(const Flags& f) {
  auto c = open(f);
  auto s = c.omega->power(f.power);
  emit(f, polytope_json(s, f.power, false));
  return spot_check(c, f.seed);
}

int cmd_oracle(const Flags& f) {
  if (f.power < 0) throw ValidationError("--power: the oracle iterates forward only");
  auto ds = load_dataset(f.dataset);
  auto s = oracle_iterate(ds.map, static_cast<std::uint64_t>(f.power), f.step_budget);
  emit(f, polytope_json(s, f.power, true));
  return kOk;
}

int cmd_cone(const Flags& f) {
  auto c = open(f);
  auto model = estimate_dual_cone(c.ds.map, c.omega->forward(), f.cone_p_max);
  if (model.low_confidence) std::cerr << "warning: facet directions unstable below --cone-p-max " << f.cone_p_max << "\n";
  emit(f, emit_cone_model(model, fibered_cone(model)));
  return spot_check(c, f.seed);
}

int cmd_bound(const Flags& f) {
  auto c = open(f);
  IntVec alpha = parse_ints(f.alpha, "--alpha");
  auto model = estimate_dual_cone(c.ds.map, c.omega->forward(), f.cone_p_max);
  auto P = choose_subcone(f, fibered_cone(model));
  auto cert = certify(alpha, *c.omega, c.ds.hash, model, P, certify_options(f));
  emit(f, emit_certificate(cert));
  for (const auto& d : cert.diagnostics) std::cerr << d << "\n";
  if (int rc = spot_check(c, f.seed)) return rc;
  if (cert.status != "ok") {
    std::cerr << "inconclusive\n";
    return kInconclusive;
  }
  std::cerr << "bound " << to_string(cert.bound) << " (K = " << cert.K << ", n = " << cert.n << ", " << cert.mode << ")\n";
  return kOk;
}

int cmd_sweep(const Flags& f) {
  if (f.format != "text" && f.format != "csv") throw ValidationError("--format: expected text or csv");
  auto c = open(f);
  auto model = estimate_dual_cone(c.ds.map, c.omega->forward(), f.cone_p_max);
  auto P = choose_subcone(f, fibered_cone(model));
  SweepSpec spec{parse_ints(f.base, "--base"), parse_ints(f.direction, "--direction"), f.first, f.last};
  if (spec.base.size() != spec.direction.size()) throw ValidationError("--direction: length differs from --base");
  if (f.first > f.last) throw ValidationError("--first: exceeds --last");
  auto rows = sweep(spec, *c.omega, c.ds.hash, model, P, certify_options(f));
  emit(f, f.format == "csv" ? sweep_csv(rows) : sweep_text(rows));
  return spot_check(c, f.seed);
}

int cmd_verify(const Flags& f) {
  auto cert = parse_certificate(read_file(f.certificate));
  auto ds = load_dataset(f.dataset);
  VerifyOptions vo;
  vo.oracle_budget = f.oracle_budget;
  vo.max_power = f.max_power;
  auto r = verify_certificate(cert, ds.map, ds.hash, vo);
  std::cout << to_string(r.status);
  if (!r.predicate.empty()) std::cout << " " << r.predicate;
  std::cout << "\n";
  if (!r.detail.empty()) std::cerr << r.detail << "\n";
  switch (r.status) {
    case VerifyStatus::pass: return kOk;
    case VerifyStatus::unverifiable: return kInconclusive;
    default: return kFailed;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified upper bounds on curve-graph translation lengths of fibered monodromies"};
  app.require_subcommand(1);
  Flags f;

  auto dataset = [&](CLI::App* sub) {
    sub->add_option("dataset", f.dataset, "Dataset file")->required()->check(CLI::ExistingFile);
  };
  auto power = [&](CLI::App* sub, bool required) {
    auto* o = sub->add_option("-p,--power", f.power, "Power of the lifted map");
    if (required) o->required();
  };
  auto cache = [&](CLI::App* sub) {
    sub->add_option("--cache-dir", f.cache_dir, "Hull cache directory (default $CONEBOUND_CACHE_DIR)");
    sub->add_option("--seed", f.seed, "Seed for cache spot-checks")->capture_default_str();
    sub->add_flag("--mirror", f.mirror, "Allow Omega(psi^-p) = -Omega(psi^p) when there is no inverse data");
    sub->add_flag("--no-inverse", f.no_inverse, "Ignore the inverse section of the dataset");
  };
  auto output = [&](CLI::App* sub) { sub->add_option("-o,--output", f.output, "Write the artifact here instead of stdout"); };
  auto bound_flags = [&](CLI::App* sub) {
    sub->add_option("--p-max", f.p_max, "Largest power K considered")->capture_default_str();
    sub->add_option("--cone-p-max", f.cone_p_max, "Powers used to reconstruct the dual cone")->capture_default_str();
    sub->add_option("--box-radius", f.box_radius, "Box radius R (default ceil(scale * n^{1/r}))");
    sub->add_option("--box-scale", f.box_scale, "Scale of the default box radius")->capture_default_str();
    sub->add_option("--margin", f.margin, "Shrink factor of the default subcone, in [0, 1)")->capture_default_str();
    sub->add_option("--subcone", f.subcone, "Subcone spanned by integer rays, e.g. \"1,4;2,5\"");
    sub->add_option("--safety", f.safety, "Obstacle dilation s")->capture_default_str();
    sub->add_option("--mode", f.mode, "certified or asymptotic")->capture_default_str();
    sub->add_option("--word-power-cap", f.word_power_cap, "Largest exact word power before the cone model is used")
        ->capture_default_str();
    sub->add_option("--threads", f.threads, "Worker threads")->capture_default_str();
  };

  auto* ingest = app.add_subcommand("ingest", "Validate a dataset and print its content hash");
  dataset(ingest);

  auto* charpoly = app.add_subcommand("charpoly", "Characteristic polynomial of M^p");
  dataset(charpoly);
  power(charpoly, true);
  output(charpoly);

  auto* omega = app.add_subcommand("omega", "Hull of Omega(psi^p); negative p uses inverse data or --mirror");
  dataset(omega);
  power(omega, true);
  cache(omega);
  output(omega);

  auto* oracle = app.add_subcommand("oracle", "Support of psi^p by direct substitution");
  dataset(oracle);
  power(oracle, true);
  oracle->add_option("--step-budget", f.step_budget, "Substitution step budget")->capture_default_str();
  output(oracle);

  auto* cone = app.add_subcommand("cone", "Reconstructed dual cone and fibered cone");
  dataset(cone);
  cone->add_option("--cone-p-max", f.cone_p_max, "Powers used to reconstruct the dual cone")->capture_default_str();
  cache(cone);
  output(cone);

  auto* bound = app.add_subcommand("bound", "Certificate for one class");
  dataset(bound);
  bound->add_option("--alpha", f.alpha, "Primitive class, comma separated")->required();
  bound_flags(bound);
  cache(bound);
  output(bound);

  auto* sweep_cmd = app.add_subcommand("sweep", "Bounds for alpha_j = base + j * direction");
  dataset(sweep_cmd);
  sweep_cmd->add_option("--base", f.base, "Base class")->required();
  sweep_cmd->add_option("--direction", f.direction, "Step direction")->required();
  sweep_cmd->add_option("--first", f.first, "First j")->capture_default_str();
  sweep_cmd->add_option("--last", f.last, "Last j")->capture_default_str();
  sweep_cmd->add_option("--format", f.format, "text or csv")->capture_default_str();
  bound_flags(sweep_cmd);
  cache(sweep_cmd);
  output(sweep_cmd);

  auto* verify = app.add_subcommand("verify", "Re-check a certificate against its dataset");
  verify->add_option("certificate", f.certificate, "Certificate file")->required()->check(CLI::ExistingFile);
  verify->add_option("--dataset", f.dataset, "Dataset file")->required()->check(CLI::ExistingFile);
  verify->add_option("--oracle-budget", f.oracle_budget, "Substitution steps per power before switching engines")
      ->capture_default_str();
  verify->add_option("--max-power", f.max_power, "Largest power recomputed; beyond it the result is unverifiable")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    if (*ingest) return cmd_ingest(f);
    if (*charpoly) return cmd_charpoly(f);
    if (*omega) return cmd_omega(f);
    if (*oracle) return cmd_oracle(f);
    if (*cone) return cmd_cone(f);
    if (*bound) return cmd_bound(f);
    if (*sweep_cmd) return cmd_sweep(f);
    if (*verify) return cmd_verify(f);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const CapabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInconclusive;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kFailed;
  }
  return kInvalid;
}
