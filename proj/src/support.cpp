#include "conebound/support.hpp"

#include <algorithm>

#include "conebound/errors.hpp"

namespace conebound {

std::string to_string(OmegaSource s) {
  switch (s) {
    case OmegaSource::forward: return "forward";
    case OmegaSource::inverse_data: return "inverse_data";
    case OmegaSource::mirror: return "mirror";
    case OmegaSource::cone_approximation: return "cone_approximation";
  }
  return "forward";
}

OmegaSource parse_omega_source(const std::string& s) {
  if (s == "forward") return OmegaSource::forward;
  if (s == "inverse_data") return OmegaSource::inverse_data;
  if (s == "mirror") return OmegaSource::mirror;
  if (s == "cone_approximation") return OmegaSource::cone_approximation;
  throw ValidationError("unknown omega source '" + s + "'");
}

bool is_exact(OmegaSource s) { return s != OmegaSource::cone_approximation; }

std::int64_t SupportPolytope::max_dot(const IntVec& u) const {
  std::int64_t best = dot(u, hull.vertices.front());
  for (const auto& v : hull.vertices) best = std::max(best, dot(u, v));
  return best;
}

std::int64_t SupportPolytope::min_dot(const IntVec& u) const {
  std::int64_t best = dot(u, hull.vertices.front());
  for (const auto& v : hull.vertices) best = std::min(best, dot(u, v));
  return best;
}

// Dense bit array over the box lo + [0, span); the last coordinate is contiguous.
struct SupportEngine::Bitmap {
  IntVec lo, span;
  std::size_t rows = 1, words = 1;
  std::vector<std::uint64_t> bits;

  Bitmap(IntVec lo_, IntVec span_) : lo(std::move(lo_)), span(std::move(span_)) {
    for (std::size_t k = 0; k + 1 < span.size(); ++k) rows *= static_cast<std::size_t>(span[k]);
    words = (static_cast<std::size_t>(span.back()) + 63) / 64 + 1;
    bits.assign(rows * words, 0);
  }
  std::size_t cells() const { return rows * static_cast<std::size_t>(span.back()); }
  std::uint64_t* row(std::size_t i) { return bits.data() + i * words; }
  const std::uint64_t* row(std::size_t i) const { return bits.data() + i * words; }
  std::size_t data_words() const { return (static_cast<std::size_t>(span.back()) + 63) / 64; }
};

namespace {

void or_shifted(std::uint64_t* dst, const std::uint64_t* src, std::size_t n, std::size_t offset) {
  std::size_t w = offset / 64, b = offset % 64;
  if (b == 0) {
    for (std::size_t i = 0; i < n; ++i) dst[w + i] |= src[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      dst[w + i] |= src[i] << b;
      dst[w + i + 1] |= src[i] >> (64 - b);
    }
  }
}

}  // namespace

SupportEngine::SupportEngine(const LaurentMatrix& m, std::size_t retain_cells)
    : rank_(m.rank()), dim_(m.dim()), retain_cells_(retain_cells) {
  shift_lo_.assign(rank_, 0);
  shift_hi_.assign(rank_, 0);
  bool first = true;
  for (std::size_t g = 0; g < dim_; ++g)
    for (std::size_t f = 0; f < dim_; ++f) {
      const LaurentPoly& e = m.at(g, f);
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e.coeff(i) <= 0)
          throw ValidationError("support propagation needs nonnegative matrix coefficients");
        IntVec s = e.exponent(i);
        for (std::size_t k = 0; k < rank_; ++k) {
          shift_lo_[k] = first ? s[k] : std::min(shift_lo_[k], s[k]);
          shift_hi_[k] = first ? s[k] : std::max(shift_hi_[k], s[k]);
        }
        first = false;
        terms_.push_back({g, f, std::move(s)});
      }
    }
  if (terms_.empty()) throw ValidationError("transition matrix is zero");
  for (std::size_t f = 0; f < dim_; ++f) {
    auto b = std::make_unique<Bitmap>(IntVec(rank_, 0), IntVec(rank_, 1));
    b->bits[0] = 1;
    state_.push_back(std::move(b));
  }
  auto u = std::make_unique<Bitmap>(IntVec(rank_, 0), IntVec(rank_, 1));
  u->bits[0] = 1;
  retained_.push_back(std::move(u));
  hulls_.push_back(Polytope{rank_, {IntVec(rank_, 0)}});
}

SupportEngine::~SupportEngine() = default;

void SupportEngine::advance_locked() {
  const Bitmap& ref = *state_.front();
  IntVec lo(rank_), span(rank_);
  for (std::size_t k = 0; k < rank_; ++k) {
    lo[k] = ref.lo[k] + shift_lo_[k];
    span[k] = ref.span[k] + (shift_hi_[k] - shift_lo_[k]);
  }
  std::vector<std::unique_ptr<Bitmap>> next;
  for (std::size_t f = 0; f < dim_; ++f) next.push_back(std::make_unique<Bitmap>(lo, span));

  const std::size_t outer = rank_ - 1;
  for (const Term& t : terms_) {
    const Bitmap& src = *state_[t.from];
    Bitmap& dst = *next[t.to];
    IntVec off(rank_);
    for (std::size_t k = 0; k < rank_; ++k) off[k] = src.lo[k] + t.shift[k] - dst.lo[k];
    IntVec idx(outer, 0);
    for (std::size_t row = 0; row < src.rows; ++row) {
      std::size_t drow = 0;
      for (std::size_t k = 0; k < outer; ++k)
        drow = drow * static_cast<std::size_t>(dst.span[k]) + static_cast<std::size_t>(idx[k] + off[k]);
      or_shifted(dst.row(drow), src.row(row), src.data_words(), static_cast<std::size_t>(off.back()));
      for (std::size_t k = outer; k-- > 0;) {
        if (++idx[k] < src.span[k]) break;
        idx[k] = 0;
      }
    }
  }
  state_ = std::move(next);

  Bitmap uni(lo, span);
  for (const auto& b : state_)
    for (std::size_t i = 0; i < uni.bits.size(); ++i) uni.bits[i] |= b->bits[i];

  std::vector<IntVec> extreme;
  IntVec idx(outer, 0);
  for (std::size_t row = 0; row < uni.rows; ++row) {
    const std::uint64_t* w = uni.row(row);
    std::optional<std::size_t> first, last;
    for (std::size_t i = 0; i < uni.data_words(); ++i)
      if (w[i]) {
        if (!first) first = i * 64 + static_cast<std::size_t>(__builtin_ctzll(w[i]));
        last = i * 64 + 63 - static_cast<std::size_t>(__builtin_clzll(w[i]));
      }
    if (first) {
      IntVec p(rank_);
      for (std::size_t k = 0; k < outer; ++k) p[k] = lo[k] + idx[k];
      p.back() = lo.back() + static_cast<std::int64_t>(*first);
      extreme.push_back(p);
      p.back() = lo.back() + static_cast<std::int64_t>(*last);
      extreme.push_back(std::move(p));
    }
    for (std::size_t k = outer; k-- > 0;) {
      if (++idx[k] < span[k]) break;
      idx[k] = 0;
    }
  }
  if (extreme.empty()) throw InternalError("empty support");
  hulls_.push_back(rank_ <= 2 ? make_polytope(std::move(extreme), rank_) : Polytope{rank_, {}});
  if (uni.cells() <= retain_cells_) retained_.push_back(std::make_unique<Bitmap>(std::move(uni)));
  else retained_.push_back(nullptr);
}

std::uint64_t SupportEngine::computed() {
  std::lock_guard<std::mutex> lock(mutex_);
  return hulls_.size() - 1;
}

Polytope SupportEngine::hull(std::uint64_t p) {
  if (rank_ > 2) throw CapabilityError("support hulls are implemented for rank 1 and 2 only");
  std::lock_guard<std::mutex> lock(mutex_);
  while (hulls_.size() <= p) advance_locked();
  return hulls_[p];
}

std::vector<IntVec> SupportEngine::points_of(const Bitmap& b) const {
  std::vector<IntVec> out;
  const std::size_t outer = rank_ - 1;
  IntVec idx(outer, 0);
  for (std::size_t row = 0; row < b.rows; ++row) {
    const std::uint64_t* w = b.row(row);
    for (std::size_t i = 0; i < b.data_words(); ++i) {
      std::uint64_t word = w[i];
      while (word) {
        std::size_t bit = i * 64 + static_cast<std::size_t>(__builtin_ctzll(word));
        word &= word - 1;
        IntVec p(rank_);
        for (std::size_t k = 0; k < outer; ++k) p[k] = b.lo[k] + idx[k];
        p.back() = b.lo.back() + static_cast<std::int64_t>(bit);
        out.push_back(std::move(p));
      }
    }
    for (std::size_t k = outer; k-- > 0;) {
      if (++idx[k] < b.span[k]) break;
      idx[k] = 0;
    }
  }
  return out;  // row-major scan is lexicographic
}

std::vector<IntVec> SupportEngine::points(std::uint64_t p) {
  std::lock_guard<std::mutex> lock(mutex_);
  while (hulls_.size() <= p) advance_locked();
  if (!retained_[p])
    throw ResourceError("support bitmap for power " + std::to_string(p) +
                        " exceeds the retention limit");
  return points_of(*retained_[p]);
}

SupportPolytope SupportEngine::support(std::uint64_t p, bool with_points) {
  SupportPolytope s;
  s.power = p;
  if (with_points) s.points = points(p);
  if (rank_ <= 2) s.hull = hull(p);
  else s.hull = Polytope{rank_, {}};
  return s;
}

SupportPolytope support_of_power(const LiftedGraphMap& map, std::uint64_t p) {
  SupportEngine engine(map.transition());
  return engine.support(p, true);
}

SupportPolytope oracle_iterate(const LiftedGraphMap& map, std::uint64_t p,
                               std::uint64_t step_budget) {
  auto pts = oracle_iterate_points(map.forward(), p, step_budget);
  SupportPolytope s;
  s.power = p;
  s.points.assign(pts.begin(), pts.end());
  if (map.rank() <= 2) s.hull = make_polytope(s.points, map.rank());
  else s.hull = Polytope{map.rank(), {}};
  return s;
}

OmegaProvider::OmegaProvider(const LiftedGraphMap& map, OmegaOptions options)
    : map_(map), options_(options), forward_(std::make_unique<SupportEngine>(map.transition())) {
  if (options_.use_inverse && map.inverse_transition())
    inverse_ = std::make_unique<SupportEngine>(*map.inverse_transition());
}

OmegaSource OmegaProvider::source_for(std::int64_t y) const {
  if (y >= 0) return OmegaSource::forward;
  if (inverse_) return OmegaSource::inverse_data;
  if (options_.allow_mirror) return OmegaSource::mirror;
  throw ValidationError("negative power " + std::to_string(y) +
                        " needs an inverse dataset or --mirror");
}

SupportPolytope OmegaProvider::power(std::int64_t y) {
  OmegaSource src = source_for(y);
  std::uint64_t p = static_cast<std::uint64_t>(y < 0 ? -y : y);
  SupportPolytope s;
  s.power = p;
  s.source = src;
  switch (src) {
    case OmegaSource::forward: s.hull = engine_hull(OmegaSource::forward, p); break;
    case OmegaSource::inverse_data: s.hull = engine_hull(OmegaSource::inverse_data, p); break;
    default: s.hull = negate(engine_hull(OmegaSource::forward, p)); break;
  }
  return s;
}

Polytope OmegaProvider::engine_hull(OmegaSource engine, std::uint64_t p) {
  SupportEngine& e = engine == OmegaSource::inverse_data ? *inverse_ : *forward_;
  if (!store_) return e.hull(p);
  if (auto cached = store_->load(engine, p)) return *cached;
  Polytope h = e.hull(p);
  store_->store(engine, p, h);
  return h;
}

SupportPolytope omega_of_word(OmegaProvider& omega, const IntVec& x, std::int64_t y) {
  if (x.size() != omega.map().rank()) throw ValidationError("word translation has wrong length");
  SupportPolytope s = omega.power(y);
  s.hull = translate(s.hull, x);
  return s;
}

}  // namespace conebound
