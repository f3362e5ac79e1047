#include "sipsim/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sipsim {

Geometry Geometry::infinite(int dim) {
  if (dim < 1) throw DomainError("dimension must be positive");
  Geometry g;
  g.dim_ = dim;
  g.boundary_ = Boundary::Infinite;
  return g;
}

Geometry Geometry::torus(int dim, Coord side) {
  if (dim < 1) throw DomainError("dimension must be positive");
  if (side < 3) throw DomainError("torus side must be at least 3");
  Geometry g;
  g.dim_ = dim;
  g.boundary_ = Boundary::Torus;
  g.side_ = side;
  return g;
}

std::int64_t Geometry::volume() const {
  if (!is_torus()) throw DomainError("infinite lattice has no finite volume");
  std::int64_t v = 1;
  for (int k = 0; k < dim_; ++k) v *= side_;
  return v;
}

bool Geometry::valid(std::span<const Coord> x) const {
  if (x.size() != static_cast<std::size_t>(dim_)) return false;
  if (!is_torus()) return true;
  for (Coord c : x)
    if (c < 0 || c >= side_) return false;
  return true;
}

Coord Geometry::wrap(Coord c) const {
  if (!is_torus()) return c;
  Coord r = c % side_;
  return r < 0 ? r + side_ : r;
}

Site Geometry::reduce(std::span<const Coord> x) const {
  Site out(x.begin(), x.end());
  for (auto& c : out) c = wrap(c);
  return out;
}

Coord Geometry::shift(Coord c, int step) const {
  if (is_torus()) return wrap(c + step);
  if ((step > 0 && c == std::numeric_limits<Coord>::max()) ||
      (step < 0 && c == std::numeric_limits<Coord>::min()))
    throw OverflowError("lattice coordinate saturated");
  return c + step;
}

Coord Geometry::coord_distance(Coord a, Coord b) const {
  if (!is_torus()) {
    // |a-b| can exceed the signed range only for pathological inputs.
    return a > b ? a - b : b - a;
  }
  Coord diff = wrap(a - b);
  return std::min(diff, side_ - diff);
}

std::int64_t Geometry::linear_index(std::span<const Coord> x) const {
  std::int64_t idx = 0;
  for (int k = dim_ - 1; k >= 0; --k) idx = idx * side_ + wrap(x[k]);
  return idx;
}

Site Geometry::site_of_index(std::int64_t index) const {
  Site x(dim_);
  for (int k = 0; k < dim_; ++k) {
    x[k] = index % side_;
    index /= side_;
  }
  return x;
}

std::vector<Site> neighbors(std::span<const Coord> x, const Geometry& g) {
  std::vector<Site> out;
  out.reserve(g.degree());
  for (int k = 0; k < g.dim(); ++k) {
    for (int step : {+1, -1}) {
      Site y(x.begin(), x.end());
      y[k] = g.shift(y[k], step);
      out.push_back(std::move(y));
    }
  }
  return out;
}

Coord l1_distance(std::span<const Coord> x, std::span<const Coord> y, const Geometry& g) {
  Coord sum = 0;
  for (std::size_t k = 0; k < x.size(); ++k) sum += g.coord_distance(x[k], y[k]);
  return sum;
}

ParticleList::ParticleList(int dim, std::vector<Coord> flat_coords)
    : dim_(dim), coords_(std::move(flat_coords)) {
  if (dim_ < 1 || coords_.size() % dim_ != 0)
    throw DomainError("flat coordinate list does not match dimension");
}

ParticleList ParticleList::from_sites(const std::vector<Site>& sites, int dim) {
  ParticleList xs(dim);
  for (const auto& s : sites) {
    if (s.size() != static_cast<std::size_t>(dim)) throw DomainError("site dimension mismatch");
    xs.push_back(s);
  }
  return xs;
}

ParticleList ParticleList::line(std::initializer_list<Coord> xs) {
  return ParticleList(1, std::vector<Coord>(xs));
}

Site ParticleList::site(std::size_t i) const {
  auto p = position(i);
  return Site(p.begin(), p.end());
}

void ParticleList::push_back(std::span<const Coord> x) {
  coords_.insert(coords_.end(), x.begin(), x.end());
}

Occupation::Occupation(std::map<Site, std::int64_t> counts) {
  for (auto& [site, k] : counts) {
    if (k < 0) throw DomainError("negative occupation number");
    if (k > 0) counts_.emplace(site, k);
  }
}

std::int64_t Occupation::at(const Site& x) const {
  auto it = counts_.find(x);
  return it == counts_.end() ? 0 : it->second;
}

void Occupation::add(const Site& x, std::int64_t k) {
  auto& slot = counts_[x];
  slot += k;
  if (slot < 0) throw DomainError("negative occupation number");
  if (slot == 0) counts_.erase(x);
}

std::int64_t Occupation::total() const {
  std::int64_t n = 0;
  for (const auto& [site, k] : counts_) n += k;
  return n;
}

Occupation move(const Occupation& eta, const Site& x, const Site& y) {
  if (eta.at(x) == 0) throw EmptySourceError("move from an empty site");
  Occupation out = eta;
  out.add(x, -1);
  out.add(y, +1);
  return out;
}

Occupation occupation_of(const ParticleList& xi) {
  Occupation eta;
  for (std::size_t i = 0; i < xi.size(); ++i) eta.add(xi.site(i));
  return eta;
}

Occupation occupation_of(const ParticleList& xi, const Geometry& g) {
  Occupation eta;
  for (std::size_t i = 0; i < xi.size(); ++i) eta.add(g.reduce(xi.position(i)));
  return eta;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t index) : seed_(seed), index_(index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x53495053u};
  engine_.seed(seq);
}

double RandomStream::uniform() {
  // 53 random bits mapped to the open interval (0,1).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential(double rate) {
  if (!(rate > 0.0)) throw DomainError("exponential rate must be positive");
  return -std::log(uniform()) / rate;
}

std::uint64_t RandomStream::below(std::uint64_t n) {
  if (n == 0) throw DomainError("below(0) has no values");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % n;
}

RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t index) {
  return RandomStream(master_seed, index);
}

}  // namespace sipsim
