#ifndef SIPSIM_CORE_HPP
#define SIPSIM_CORE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sipsim {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a move is requested from an empty site.
class EmptySourceError : public Error {
 public:
  using Error::Error;
};

/// Raised when a coordinate would leave the 64-bit range on the infinite lattice.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Parameter outside its documented domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Lattice
// ---------------------------------------------------------------------------

using Coord = std::int64_t;
using Site = std::vector<Coord>;

enum class Boundary { Infinite, Torus };

/// Z^d or the discrete torus (Z/LZ)^d with the nearest-neighbor kernel
/// p(x,y) = 1/(2d) for |x-y|_1 = 1.
class Geometry {
 public:
  Geometry() = default;
  static Geometry infinite(int dim);
  static Geometry torus(int dim, Coord side);

  int dim() const { return dim_; }
  Boundary boundary() const { return boundary_; }
  bool is_torus() const { return boundary_ == Boundary::Torus; }
  Coord side() const { return side_; }

  /// Number of sites on a torus; throws DomainError on the infinite lattice.
  std::int64_t volume() const;

  /// p(x,y) for a pair of neighbors.
  double kernel() const { return 1.0 / (2.0 * dim_); }
  std::size_t degree() const { return 2 * static_cast<std::size_t>(dim_); }

  bool valid(std::span<const Coord> x) const;
  Coord wrap(Coord c) const;
  Site reduce(std::span<const Coord> x) const;

  /// Coordinate `c` moved by `step` (+1 or -1). On the infinite lattice a step
  /// past the representable range raises OverflowError instead of wrapping.
  Coord shift(Coord c, int step) const;

  /// Per-coordinate distance (minimal wrapped distance on the torus).
  Coord coord_distance(Coord a, Coord b) const;

  /// Encodes a torus site as 0..volume-1 (first coordinate fastest).
  std::int64_t linear_index(std::span<const Coord> x) const;
  Site site_of_index(std::int64_t index) const;

  bool operator==(const Geometry&) const = default;

 private:
  int dim_ = 1;
  Boundary boundary_ = Boundary::Infinite;
  Coord side_ = 0;
};

/// The 2d neighbors of x: direction 2k is +e_k, direction 2k+1 is -e_k.
std::vector<Site> neighbors(std::span<const Coord> x, const Geometry& g);

Coord l1_distance(std::span<const Coord> x, std::span<const Coord> y, const Geometry& g);

// ---------------------------------------------------------------------------
// Configurations
// ---------------------------------------------------------------------------

/// Labeled particle positions, stored flat (particle-major).
class ParticleList {
 public:
  ParticleList() = default;
  explicit ParticleList(int dim) : dim_(dim) {}
  ParticleList(int dim, std::vector<Coord> flat_coords);
  static ParticleList from_sites(const std::vector<Site>& sites, int dim);
  /// d=1 convenience.
  static ParticleList line(std::initializer_list<Coord> xs);

  int dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const { return coords_.empty(); }

  Coord coord(std::size_t i, int k) const { return coords_[i * dim_ + k]; }
  void set_coord(std::size_t i, int k, Coord v) { coords_[i * dim_ + k] = v; }
  std::span<const Coord> position(std::size_t i) const {
    return {coords_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }
  Site site(std::size_t i) const;
  void push_back(std::span<const Coord> x);

  std::span<const Coord> flat() const { return coords_; }

  /// Labeled equality: same positions index by index.
  bool operator==(const ParticleList&) const = default;

 private:
  int dim_ = 1;
  std::vector<Coord> coords_;
};

/// Finite-support occupation numbers, site -> count (zero entries are never stored).
class Occupation {
 public:
  Occupation() = default;
  explicit Occupation(std::map<Site, std::int64_t> counts);

  std::int64_t at(const Site& x) const;
  void add(const Site& x, std::int64_t k = 1);
  std::int64_t total() const;
  std::size_t support_size() const { return counts_.size(); }
  const std::map<Site, std::int64_t>& counts() const { return counts_; }

  bool operator==(const Occupation&) const = default;

 private:
  std::map<Site, std::int64_t> counts_;
};

/// eta^{x,y} = eta - delta_x + delta_y.
Occupation move(const Occupation& eta, const Site& x, const Site& y);

Occupation occupation_of(const ParticleList& xi);

/// Occupation of xi with sites reduced for the geometry (torus wrapping).
Occupation occupation_of(const ParticleList& xi, const Geometry& g);

// ---------------------------------------------------------------------------
// Randomness
// ---------------------------------------------------------------------------

/// Deterministic per-replica random source. The (seed, index) pair is hashed
/// through std::seed_seq into a 64-bit Mersenne Twister, so draws are
/// reproducible across platforms; distributions are computed here rather than
/// through <random> distributions, whose output is implementation-defined.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t index);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on (0,1), never exactly 0 or 1.
  double uniform();
  /// Exponential with the given rate.
  double exponential(double rate);
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::mt19937_64 engine_;
};

RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t index);

}  // namespace sipsim

#endif  // SIPSIM_CORE_HPP
