#include "conebound/graph_map.hpp"

#include <algorithm>

#include "conebound/errors.hpp"

namespace conebound {

namespace {

IntVec add(const IntVec& a, const IntVec& b) {
  IntVec c(a);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
  return c;
}

std::string describe(const LiftedVertex& v, const TrackMap& map) {
  return map.vertices[v.vertex] + to_string(v.shift);
}

LiftedVertex step_start(const TrackMap& map, const Step& s) {
  const Edge& e = map.edges[s.edge];
  if (s.orientation > 0) return {e.tail, s.shift};
  return {e.head, add(s.shift, e.shift)};
}

LiftedVertex step_end(const TrackMap& map, const Step& s) {
  const Edge& e = map.edges[s.edge];
  if (s.orientation > 0) return {e.head, add(s.shift, e.shift)};
  return {e.tail, s.shift};
}

void check_shape(const TrackMap& map) {
  if (map.rank < 1) throw ValidationError("rank: must be at least 1");
  if (map.vertices.empty()) throw ValidationError("vertices: empty vertex list");
  if (map.edges.empty()) throw ValidationError("edges: empty edge list");
  if (map.images.size() != map.edges.size())
    throw ValidationError("edge_images: expected one image per edge");
  for (const auto& e : map.edges) {
    if (e.tail >= map.vertices.size() || e.head >= map.vertices.size())
      throw ValidationError("edges: edge '" + e.name + "' has an unknown endpoint");
    if (e.shift.size() != map.rank)
      throw ValidationError("edges: edge '" + e.name + "' shift has wrong length");
  }
  for (std::size_t i = 0; i < map.images.size(); ++i) {
    const auto& name = map.edges[i].name;
    if (map.images[i].empty())
      throw ValidationError("edge_images: image of edge '" + name + "' is empty");
    for (std::size_t k = 0; k < map.images[i].size(); ++k) {
      const Step& s = map.images[i][k];
      std::string where = "edge_images: edge '" + name + "' step " + std::to_string(k + 1);
      if (s.edge >= map.edges.size()) throw ValidationError(where + ": unknown edge");
      if (s.shift.size() != map.rank) throw ValidationError(where + ": shift has wrong length");
      if (s.orientation != 1 && s.orientation != -1)
        throw ValidationError(where + ": orientation must be +1 or -1");
    }
  }
}

}  // namespace

std::optional<std::uint64_t> primitivity_power(const std::vector<std::vector<bool>>& pattern) {
  const std::size_t m = pattern.size();
  const std::uint64_t limit = static_cast<std::uint64_t>((m - 1) * (m - 1) + 1);
  auto power = pattern;
  for (std::uint64_t k = 1; k <= limit; ++k) {
    bool all = true;
    for (const auto& row : power)
      for (bool b : row) all &= b;
    if (all) return k;
    std::vector<std::vector<bool>> next(m, std::vector<bool>(m, false));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t l = 0; l < m; ++l)
        if (power[i][l])
          for (std::size_t j = 0; j < m; ++j)
            if (pattern[l][j]) next[i][j] = true;
    power = std::move(next);
  }
  return std::nullopt;
}

ValidationReport validate_track_map(const TrackMap& map) {
  check_shape(map);
  ValidationReport rep;
  std::vector<std::optional<LiftedVertex>> phi(map.vertices.size());

  auto assign = [&](std::size_t v, LiftedVertex target, const std::string& where) {
    if (!phi[v]) {
      phi[v] = std::move(target);
    } else if (!(*phi[v] == target)) {
      throw ValidationError(where + ": vertex '" + map.vertices[v] + "' would map to both " +
                            describe(*phi[v], map) + " and " + describe(target, map));
    }
  };

  for (std::size_t i = 0; i < map.edges.size(); ++i) {
    const Edge& e = map.edges[i];
    const auto& img = map.images[i];
    for (std::size_t k = 0; k + 1 < img.size(); ++k) {
      LiftedVertex end = step_end(map, img[k]);
      LiftedVertex start = step_start(map, img[k + 1]);
      if (!(end == start))
        throw ValidationError("edge_images: edge '" + e.name + "' step " + std::to_string(k + 2) +
                              " starts at " + describe(start, map) + " but step " +
                              std::to_string(k + 1) + " ends at " + describe(end, map));
    }
    std::string where = "edge_images: edge '" + e.name + "' step ";
    assign(e.tail, step_start(map, img.front()), where + "1 (start)");
    LiftedVertex end = step_end(map, img.back());
    for (std::size_t k = 0; k < map.rank; ++k) end.shift[k] -= e.shift[k];
    assign(e.head, end, where + std::to_string(img.size()) + " (end)");
  }
  for (std::size_t v = 0; v < phi.size(); ++v) {
    if (!phi[v]) throw ValidationError("vertices: vertex '" + map.vertices[v] + "' has no edges");
    rep.vertex_map.push_back(*phi[v]);
  }

  LaurentMatrix m = build_transition_matrix(map, PathCheck::skip);
  rep.k0 = primitivity_power(m.pattern());
  if (!rep.k0)
    rep.warnings.push_back("transition matrix is not primitive; convergence checks disabled");
  return rep;
}

LaurentMatrix build_transition_matrix(const TrackMap& map, PathCheck check) {
  if (check == PathCheck::strict) validate_track_map(map);
  else check_shape(map);
  const std::size_t m = map.edges.size();
  std::vector<std::vector<std::vector<std::pair<IntVec, Integer>>>> terms(
      m, std::vector<std::vector<std::pair<IntVec, Integer>>>(m));
  for (std::size_t e = 0; e < m; ++e)
    for (const Step& s : map.images[e]) terms[e][s.edge].emplace_back(s.shift, 1);
  LaurentMatrix out(m, map.rank);
  for (std::size_t e = 0; e < m; ++e)
    for (std::size_t f = 0; f < m; ++f)
      out.at(e, f) = LaurentPoly::from_terms(map.rank, std::move(terms[e][f]));
  return out;
}

LiftedGraphMap::LiftedGraphMap(TrackMap forward, std::optional<TrackMap> inverse,
                               std::optional<IntVec> euler_functional, Metadata metadata)
    : forward_(std::move(forward)),
      inverse_(std::move(inverse)),
      euler_(std::move(euler_functional)),
      metadata_(std::move(metadata)),
      report_(validate_track_map(forward_)),
      transition_(build_transition_matrix(forward_, PathCheck::skip)) {
  if (inverse_) {
    if (inverse_->rank != forward_.rank)
      throw ValidationError("inverse.rank: differs from forward rank");
    try {
      inverse_report_ = validate_track_map(*inverse_);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("inverse.") + e.what());
    }
    inverse_transition_ = build_transition_matrix(*inverse_, PathCheck::skip);
  }
  if (euler_ && euler_->size() != forward_.rank + 1)
    throw ValidationError("euler_functional: expected length rank + 1");
}

std::set<IntVec> oracle_iterate_points(const TrackMap& map, std::uint64_t p,
                                       std::uint64_t step_budget) {
  const std::size_t r = map.rank;
  std::vector<std::uint32_t> edges;
  std::vector<std::int8_t> orient;
  std::vector<std::int64_t> shifts;
  for (std::size_t e = 0; e < map.edges.size(); ++e) {
    edges.push_back(static_cast<std::uint32_t>(e));
    orient.push_back(1);
    shifts.insert(shifts.end(), r, 0);
  }
  for (std::uint64_t it = 0; it < p; ++it) {
    std::uint64_t next_len = 0;
    for (auto e : edges) next_len += map.images[e].size();
    if (next_len > step_budget)
      throw ResourceError("oracle_iterate: path of " + std::to_string(next_len) +
                          " steps at power " + std::to_string(it + 1) + " exceeds budget " +
                          std::to_string(step_budget));
    std::vector<std::uint32_t> ne;
    std::vector<std::int8_t> no;
    std::vector<std::int64_t> ns;
    ne.reserve(next_len);
    no.reserve(next_len);
    ns.reserve(next_len * r);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto& img = map.images[edges[i]];
      const std::int64_t* base = shifts.data() + i * r;
      auto emit = [&](const Step& s, int o) {
        ne.push_back(static_cast<std::uint32_t>(s.edge));
        no.push_back(static_cast<std::int8_t>(o));
        for (std::size_t k = 0; k < r; ++k) ns.push_back(base[k] + s.shift[k]);
      };
      if (orient[i] > 0) {
        for (const Step& s : img) emit(s, s.orientation);
      } else {
        for (auto it2 = img.rbegin(); it2 != img.rend(); ++it2) emit(*it2, -it2->orientation);
      }
    }
    edges = std::move(ne);
    orient = std::move(no);
    shifts = std::move(ns);
  }
  std::set<IntVec> out;
  for (std::size_t i = 0; i < edges.size(); ++i)
    out.insert(IntVec(shifts.begin() + static_cast<std::ptrdiff_t>(i * r),
                      shifts.begin() + static_cast<std::ptrdiff_t>((i + 1) * r)));
  return out;
}

}  // namespace conebound
