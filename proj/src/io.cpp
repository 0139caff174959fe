#include "conebound/io.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "conebound/errors.hpp"

namespace conebound {

using json = nlohmann::json;

namespace {

IntVec int_vec(const json& j, const std::string& field, std::size_t rank) {
  if (!j.is_array()) throw ValidationError(field + ": expected an integer array");
  IntVec v;
  for (const auto& x : j) {
    if (!x.is_number_integer()) throw ValidationError(field + ": expected integers");
    v.push_back(x.get<std::int64_t>());
  }
  if (rank && v.size() != rank)
    throw ValidationError(field + ": expected length " + std::to_string(rank));
  return v;
}

const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw ValidationError(where + key + ": missing field");
  return j.at(key);
}

TrackMap parse_track(const json& j, std::size_t rank, const std::string& where) {
  TrackMap t;
  t.rank = rank;
  std::map<std::string, std::size_t> vindex, eindex;
  const json& vs = require(j, "vertices", where);
  if (!vs.is_array()) throw ValidationError(where + "vertices: expected an array of names");
  for (const auto& v : vs) {
    if (!v.is_string()) throw ValidationError(where + "vertices: expected strings");
    auto name = v.get<std::string>();
    if (vindex.count(name)) throw ValidationError(where + "vertices: duplicate '" + name + "'");
    vindex[name] = t.vertices.size();
    t.vertices.push_back(name);
  }
  const json& es = require(j, "edges", where);
  if (!es.is_array()) throw ValidationError(where + "edges: expected an array");
  for (const auto& e : es) {
    Edge edge;
    std::string ew = where + "edges";
    edge.name = require(e, "name", ew + ".").get<std::string>();
    auto endpoint = [&](const char* key) {
      auto name = require(e, key, ew + ".").get<std::string>();
      auto it = vindex.find(name);
      if (it == vindex.end())
        throw ValidationError(ew + ": edge '" + edge.name + "' " + key + " '" + name + "' is not a vertex");
      return it->second;
    };
    edge.tail = endpoint("tail");
    edge.head = endpoint("head");
    edge.shift = e.contains("shift") ? int_vec(e.at("shift"), ew + "." + edge.name + ".shift", rank)
                                     : IntVec(rank, 0);
    if (eindex.count(edge.name)) throw ValidationError(ew + ": duplicate edge '" + edge.name + "'");
    eindex[edge.name] = t.edges.size();
    t.edges.push_back(std::move(edge));
  }
  const json& imgs = require(j, "edge_images", where);
  if (!imgs.is_object()) throw ValidationError(where + "edge_images: expected an object keyed by edge");
  t.images.resize(t.edges.size());
  for (const auto& [name, steps] : imgs.items()) {
    std::string iw = where + "edge_images." + name;
    auto it = eindex.find(name);
    if (it == eindex.end()) throw ValidationError(iw + ": not an edge");
    if (!steps.is_array()) throw ValidationError(iw + ": expected a list of steps");
    std::size_t k = 0;
    for (const auto& s : steps) {
      ++k;
      std::string sw = iw + " step " + std::to_string(k);
      if (!s.is_array() || s.size() != 3 || !s[0].is_string() || !s[2].is_number_integer())
        throw ValidationError(sw + ": expected [edge, shift, orientation]");
      auto e2 = eindex.find(s[0].get<std::string>());
      if (e2 == eindex.end()) throw ValidationError(sw + ": unknown edge '" + s[0].get<std::string>() + "'");
      Step step;
      step.edge = e2->second;
      step.shift = int_vec(s[1], sw + " shift", rank);
      step.orientation = s[2].get<int>();
      t.images[it->second].push_back(std::move(step));
    }
  }
  for (std::size_t i = 0; i < t.edges.size(); ++i)
    if (t.images[i].empty())
      throw ValidationError(where + "edge_images: missing image for edge '" + t.edges[i].name + "'");
  return t;
}

json track_json(const TrackMap& t) {
  json j;
  j["vertices"] = t.vertices;
  json es = json::array();
  for (const auto& e : t.edges)
    es.push_back({{"name", e.name}, {"tail", t.vertices[e.tail]}, {"head", t.vertices[e.head]},
                  {"shift", e.shift}});
  j["edges"] = es;
  json imgs = json::object();
  for (std::size_t i = 0; i < t.edges.size(); ++i) {
    json steps = json::array();
    for (const auto& s : t.images[i])
      steps.push_back(json::array({t.edges[s.edge].name, s.shift, s.orientation}));
    imgs[t.edges[i].name] = steps;
  }
  j["edge_images"] = imgs;
  return j;
}

json content_json(const LiftedGraphMap& map) {
  json j = track_json(map.forward());
  j["format_version"] = kFormatVersion;
  j["rank"] = map.rank();
  if (map.inverse()) j["inverse"] = track_json(*map.inverse());
  if (map.euler_functional()) j["euler_functional"] = *map.euler_functional();
  return j;
}

}  // namespace

Dataset parse_dataset(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("dataset: not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object()) throw ValidationError("dataset: expected a JSON object");
    if (j.contains("format_version") && j.at("format_version") != kFormatVersion)
      throw ValidationError("format_version: unsupported value " + j.at("format_version").dump());
    const json& rj = require(j, "rank", "");
    if (!rj.is_number_integer() || rj.get<std::int64_t>() < 1)
      throw ValidationError("rank: expected a positive integer");
    auto rank = rj.get<std::size_t>();
    TrackMap fwd = parse_track(j, rank, "");
    std::optional<TrackMap> inv;
    if (j.contains("inverse")) inv = parse_track(j.at("inverse"), rank, "inverse.");
    std::optional<IntVec> euler;
    if (j.contains("euler_functional"))
      euler = int_vec(j.at("euler_functional"), "euler_functional", rank + 1);
    Metadata meta;
    if (j.contains("metadata")) {
      const json& m = j.at("metadata");
      if (!m.is_object()) throw ValidationError("metadata: expected an object");
      for (const auto& [k, v] : m.items()) {
        if (k == "name" && v.is_string()) meta.name = v.get<std::string>();
        else if (k == "description" && v.is_string()) meta.description = v.get<std::string>();
        else if (k == "provenance" && v.is_string()) meta.provenance = v.get<std::string>();
        else meta.extra[k] = v.dump();
      }
    }
    for (const auto& [k, v] : j.items()) {
      (void)v;
      static const char* known[] = {"format_version", "rank", "vertices", "edges", "edge_images",
                                    "inverse", "euler_functional", "metadata"};
      bool ok = false;
      for (const char* kk : known) ok |= k == kk;
      if (!ok) throw ValidationError(k + ": unknown dataset field");
    }
    LiftedGraphMap map(std::move(fwd), std::move(inv), std::move(euler), std::move(meta));
    std::string h = dataset_hash(map);
    return Dataset{std::move(map), std::move(h)};
  } catch (const json::exception& e) {
    throw ValidationError(std::string("dataset: malformed field: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset load_dataset(const std::filesystem::path& path) { return parse_dataset(read_file(path)); }

std::string emit_dataset(const LiftedGraphMap& map) {
  json j = content_json(map);
  json meta = json::object();
  const Metadata& m = map.metadata();
  if (!m.name.empty()) meta["name"] = m.name;
  if (!m.description.empty()) meta["description"] = m.description;
  if (!m.provenance.empty()) meta["provenance"] = m.provenance;
  for (const auto& [k, v] : m.extra) meta[k] = json::parse(v);
  j["metadata"] = meta;
  return j.dump(2) + "\n";
}

std::string dataset_hash(const LiftedGraphMap& map) { return sha256_hex(content_json(map).dump()); }

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw InternalError("SHA-256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& data) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write file '" + tmp.string() + "'");
    out << data;
    if (!out.flush()) throw ValidationError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string emit_poly(const LaurentPoly& p) {
  json terms = json::array();
  for (std::size_t i = 0; i < p.size(); ++i) terms.push_back(json::array({p.exponent(i), p.coeff(i).get_str()}));
  return terms.dump();
}

LaurentPoly parse_poly(const std::string& json_text, std::size_t rank) {
  json j = json::parse(json_text);
  std::vector<std::pair<IntVec, Integer>> terms;
  if (!j.is_array()) throw ValidationError("polynomial: expected a list of terms");
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 2) throw ValidationError("polynomial: expected [exponent, coefficient]");
    Integer c = t[1].is_string() ? Integer(t[1].get<std::string>()) : Integer(t[1].get<long>());
    terms.emplace_back(int_vec(t[0], "polynomial exponent", rank), c);
  }
  return LaurentPoly::from_terms(rank, std::move(terms));
}

SupportCache::SupportCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path SupportCache::file_for(const std::string& hash, OmegaSource source,
                                             std::uint64_t p) const {
  return dir_ / hash.substr(0, 16) / (to_string(source) + "_" + std::to_string(p) + ".json");
}

std::optional<SupportPolytope> SupportCache::load(const std::string& hash, OmegaSource source,
                                                  std::uint64_t p) const {
  auto f = file_for(hash, source, p);
  if (!std::filesystem::exists(f)) return std::nullopt;
  json j = json::parse(read_file(f));
  if (j.at("dataset_hash") != hash || j.at("power") != p) return std::nullopt;
  SupportPolytope s;
  s.power = p;
  s.source = source;
  std::size_t rank = j.at("rank").get<std::size_t>();
  std::vector<IntVec> verts;
  for (const auto& v : j.at("hull")) verts.push_back(int_vec(v, "cache hull", rank));
  s.hull = Polytope{rank, std::move(verts)};
  for (const auto& v : j.at("points")) s.points.push_back(int_vec(v, "cache points", rank));
  return s;
}

void SupportCache::store(const std::string& hash, const SupportPolytope& s) const {
  auto f = file_for(hash, s.source, s.power);
  if (std::filesystem::exists(f)) return;
  std::filesystem::create_directories(f.parent_path());
  json j;
  j["format_version"] = kFormatVersion;
  j["dataset_hash"] = hash;
  j["power"] = s.power;
  j["rank"] = s.rank();
  j["hull"] = s.hull.vertices;
  j["points"] = s.points;
  write_file_atomic(f, j.dump() + "\n");
}


namespace {

class CacheStore : public HullStore {
 public:
  CacheStore(std::filesystem::path dir, std::string hash) : cache_(std::move(dir)), hash_(std::move(hash)) {}
  std::optional<Polytope> load(OmegaSource engine, std::uint64_t p) override {
    auto s = cache_.load(hash_, engine, p);
    if (!s) return std::nullopt;
    return s->hull;
  }
  void store(OmegaSource engine, std::uint64_t p, const Polytope& hull) override {
    SupportPolytope s;
    s.power = p;
    s.source = engine;
    s.hull = hull;
    cache_.store(hash_, s);
  }

 private:
  SupportCache cache_;
  std::string hash_;
};

json rat_json(const Rational& q) { return json::array({to_string(Integer(q.get_num())), to_string(Integer(q.get_den()))}); }

Rational rat_of(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_string())
    throw ValidationError(field + ": expected [numerator, denominator] strings");
  try {
    Integer num(j[0].get<std::string>()), den(j[1].get<std::string>());
    if (den <= 0) throw ValidationError(field + ": denominator must be positive");
    Rational q = make_rational(num, den);
    if (q.get_den() != den) throw ValidationError(field + ": fraction not in lowest terms");
    return q;
  } catch (const std::invalid_argument&) {
    throw ValidationError(field + ": not an integer string");
  }
}

Integer big_of(const json& j, const std::string& field) {
  if (!j.is_string()) throw ValidationError(field + ": expected an integer string");
  try {
    return Integer(j.get<std::string>());
  } catch (const std::invalid_argument&) {
    throw ValidationError(field + ": not an integer string");
  }
}

template <class T>
T get_as(const json& j, const std::string& key, const std::string& where) {
  const json& v = require(j, key, where);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where + key + ": wrong type");
  }
}

json facets_json(const std::vector<Facet>& facets) {
  json out = json::array();
  for (const auto& f : facets) out.push_back({{"normal", f.normal}, {"slope", rat_json(f.slope)}, {"lower", rat_json(f.lower)}});
  return out;
}

}  // namespace

std::shared_ptr<HullStore> make_hull_store(std::filesystem::path dir, std::string dataset_hash) {
  return std::make_shared<CacheStore>(std::move(dir), std::move(dataset_hash));
}

std::string emit_certificate(const BoundCertificate& c) {
  json j;
  j["format_version"] = c.format_version;
  j["kind"] = "bound_certificate";
  j["tool_version"] = c.tool_version;
  j["dataset_hash"] = c.dataset_hash;
  j["alpha"] = c.alpha;
  j["n"] = c.n;
  j["subcone"] = c.subcone_id;
  j["p_max"] = c.p_max;
  j["safety"] = c.safety;
  j["epsilon"] = rat_json(c.epsilon);
  j["box_radius"] = c.box_radius;
  j["search_radius"] = c.search_radius;
  j["truncation_radius2"] = to_string(c.truncation_radius2);
  j["word_power_cap"] = c.word_power_cap;
  j["omega"] = {{"use_inverse", c.use_inverse}, {"allow_mirror", c.allow_mirror}};
  j["cone"] = {{"p_max", c.cone_p_max}, {"C", c.cone.C}, {"C_negative", c.cone.C_negative}, {"facets", facets_json(c.cone.facets)}};
  j["basis"] = c.basis;
  json words = json::array();
  for (const auto& w : c.words)
    words.push_back({{"coefficients", w.coefficients}, {"x", w.x}, {"y", w.y}, {"action", w.action},
                     {"source", to_string(w.source)}, {"obstacle", w.obstacle.vertices}});
  j["words"] = words;
  j["deep_point"] = c.deep_point;
  j["deep_dist2"] = rat_json(c.deep_dist2);
  j["K"] = c.K;
  j["bound"] = rat_json(c.bound);
  j["mode"] = c.mode;
  j["status"] = c.status;
  j["diagnostics"] = c.diagnostics;
  j["assumptions"] = c.assumptions;
  return j.dump(2) + "\n";
}

BoundCertificate parse_certificate(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("certificate: not valid JSON: ") + e.what());
  }
  const std::string w = "certificate.";
  if (get_as<std::string>(j, "kind", w) != "bound_certificate")
    throw ValidationError("certificate.kind: expected bound_certificate");
  BoundCertificate c;
  c.format_version = get_as<int>(j, "format_version", w);
  if (c.format_version != kFormatVersion)
    throw ValidationError("certificate.format_version: unsupported version " + std::to_string(c.format_version));
  c.tool_version = get_as<std::string>(j, "tool_version", w);
  c.dataset_hash = get_as<std::string>(j, "dataset_hash", w);
  c.alpha = int_vec(require(j, "alpha", w), w + "alpha", 0);
  if (c.alpha.size() < 2) throw ValidationError("certificate.alpha: needs at least 2 coordinates");
  const std::size_t r = c.alpha.size() - 1;
  c.n = get_as<std::int64_t>(j, "n", w);
  c.subcone_id = get_as<std::string>(j, "subcone", w);
  c.p_max = get_as<std::uint64_t>(j, "p_max", w);
  c.safety = get_as<std::int64_t>(j, "safety", w);
  c.epsilon = rat_of(require(j, "epsilon", w), w + "epsilon");
  c.box_radius = get_as<std::int64_t>(j, "box_radius", w);
  c.search_radius = get_as<std::int64_t>(j, "search_radius", w);
  c.truncation_radius2 = big_of(require(j, "truncation_radius2", w), w + "truncation_radius2");
  c.word_power_cap = get_as<std::uint64_t>(j, "word_power_cap", w);
  const json& om = require(j, "omega", w);
  c.use_inverse = get_as<bool>(om, "use_inverse", w + "omega.");
  c.allow_mirror = get_as<bool>(om, "allow_mirror", w + "omega.");
  const json& cone = require(j, "cone", w);
  c.cone_p_max = get_as<std::uint64_t>(cone, "p_max", w + "cone.");
  c.cone.C = get_as<std::int64_t>(cone, "C", w + "cone.");
  c.cone.C_negative = get_as<std::int64_t>(cone, "C_negative", w + "cone.");
  for (const auto& f : require(cone, "facets", w + "cone.")) {
    const std::string fw = w + "cone.facets.";
    c.cone.facets.push_back({int_vec(require(f, "normal", fw), fw + "normal", r), rat_of(require(f, "slope", fw), fw + "slope"),
                             rat_of(require(f, "lower", fw), fw + "lower")});
  }
  for (const auto& b : require(j, "basis", w)) c.basis.push_back(int_vec(b, w + "basis", r + 1));
  for (const auto& x : require(j, "words", w)) {
    const std::string ww = w + "words.";
    GammaWord g;
    g.coefficients = int_vec(require(x, "coefficients", ww), ww + "coefficients", r);
    g.x = int_vec(require(x, "x", ww), ww + "x", r);
    g.y = get_as<std::int64_t>(x, "y", ww);
    g.action = get_as<std::int64_t>(x, "action", ww);
    try {
      g.source = parse_omega_source(get_as<std::string>(x, "source", ww));
    } catch (const std::exception&) {
      throw ValidationError(ww + "source: unknown source");
    }
    std::vector<IntVec> verts;
    for (const auto& v : require(x, "obstacle", ww)) verts.push_back(int_vec(v, ww + "obstacle", r));
    if (verts.empty()) throw ValidationError(ww + "obstacle: empty polytope");
    g.obstacle = Polytope{r, std::move(verts)};
    c.words.push_back(std::move(g));
  }
  c.deep_point = int_vec(require(j, "deep_point", w), w + "deep_point", r);
  c.deep_dist2 = rat_of(require(j, "deep_dist2", w), w + "deep_dist2");
  c.K = get_as<std::uint64_t>(j, "K", w);
  c.bound = rat_of(require(j, "bound", w), w + "bound");
  c.mode = get_as<std::string>(j, "mode", w);
  c.status = get_as<std::string>(j, "status", w);
  c.diagnostics = get_as<std::vector<std::string>>(j, "diagnostics", w);
  c.assumptions = get_as<std::vector<std::string>>(j, "assumptions", w);
  return c;
}

std::string emit_cone_model(const DualConeModel& m, const FiberedConeModel& cone) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "cone_model";
  j["rank"] = m.rank;
  j["p_max"] = m.p_max;
  j["facet_power"] = m.facet_power;
  j["k0"] = m.k0 ? json(*m.k0) : json(nullptr);
  j["C"] = m.C;
  j["low_confidence"] = m.low_confidence;
  j["degenerate"] = m.degenerate;
  j["axis_interior"] = m.axis_interior;
  j["facets"] = facets_json(m.facets);
  json slice = json::array();
  for (const auto& v : m.slice) {
    json pt = json::array();
    for (const auto& c : v) pt.push_back(rat_json(c));
    slice.push_back(pt);
  }
  j["slice_vertices"] = slice;
  j["fibered_dual_rays"] = cone.dual_rays;
  j["tolerance"] = rat_json(cone.tolerance);
  return j.dump(2) + "\n";
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << kSweepHeader << "\n";
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    for (std::size_t i = 0; i < r.alpha.size(); ++i) out << (i ? ";" : "") << r.alpha[i];
    out << "," << r.n << "," << to_string(r.covol2) << "," << to_string(r.systole2) << "," << to_string(r.deep_dist2)
        << "," << r.K << "," << to_string(Integer(r.bound.get_num())) << "," << to_string(Integer(r.bound.get_den()))
        << "," << r.normalized << "\n";
  }
  return out.str();
}

std::string sweep_text(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(6) << "j" << std::setw(18) << "alpha" << std::setw(8) << "n" << std::setw(10) << "systole2"
      << std::setw(12) << "deep_dist2" << std::setw(6) << "K" << std::setw(16) << "bound" << std::setw(16) << "normalized"
      << "status\n";
  for (const auto& r : rows) {
    out << std::setw(6) << r.index << std::setw(18) << to_string(r.alpha) << std::setw(8) << r.n << std::setw(10)
        << to_string(r.systole2) << std::setw(12) << to_string(r.deep_dist2) << std::setw(6) << r.K << std::setw(16)
        << to_string(r.bound) << std::setw(16) << r.normalized << r.status << (r.truncation_limited ? " (K = p_max)" : "")
        << "\n";
  }
  return out.str();
}

}  // namespace conebound
