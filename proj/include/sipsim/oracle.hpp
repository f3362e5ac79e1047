#ifndef SIPSIM_ORACLE_HPP
#define SIPSIM_ORACLE_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sipsim/core.hpp"
#include "sipsim/dynamics.hpp"

namespace sipsim {

class CapExceededError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kDefaultStateCap = 200'000;

/// All occupation vectors with a fixed number of particles on a torus, in
/// colexicographic order of the per-site count sequence (sites in linear
/// order, the last site most significant).
class StateSpace {
 public:
  StateSpace(std::int64_t particles, const Geometry& g, std::size_t cap = kDefaultStateCap);

  /// C(V + n - 1, n), saturating at the largest uint64.
  static std::uint64_t count(std::int64_t particles, std::int64_t volume);

  std::size_t size() const { return size_; }
  std::int64_t particles() const { return particles_; }
  const Geometry& geometry() const { return geometry_; }
  std::int64_t volume() const { return volume_; }

  std::span<const std::int32_t> counts(std::size_t state) const {
    return {counts_.data() + state * volume_, static_cast<std::size_t>(volume_)};
  }
  Occupation occupation(std::size_t state) const;

  std::size_t index_of(std::span<const std::int32_t> counts) const;
  std::size_t index_of(const Occupation& eta) const;
  std::size_t index_of(const ParticleList& xi) const;

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::int32_t>& v) const;
  };

  std::int64_t particles_;
  Geometry geometry_;
  std::int64_t volume_;
  std::size_t size_ = 0;
  std::vector<std::int32_t> counts_;
  std::unordered_map<std::vector<std::int32_t>, std::size_t, KeyHash> index_;
};

/// Sparse SIP generator on a StateSpace: off-diagonal rates in CSR layout
/// plus the diagonal, which holds minus the row sum.
class GeneratorMatrix {
 public:
  std::size_t size() const { return diagonal_.size(); }
  std::span<const double> diagonal() const { return diagonal_; }
  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const std::size_t> columns() const { return columns_; }
  std::span<const double> values() const { return values_; }

  /// q(i, j), including the diagonal.
  double rate(std::size_t i, std::size_t j) const;
  /// Largest |q(i,i)|.
  double max_exit_rate() const;
  /// Largest |sum_j q(i,j)| over rows.
  double max_row_sum_error() const;

  /// out = Q f
  void apply(std::span<const double> f, std::span<double> out) const;
  /// out = mu Q
  void apply_left(std::span<const double> mu, std::span<double> out) const;

  void write_triplets(std::ostream& os) const;

 private:
  friend GeneratorMatrix build_generator(const StateSpace&, const SipParams&);
  std::vector<std::size_t> row_offsets_;
  std::vector<std::size_t> columns_;
  std::vector<double> values_;
  std::vector<double> diagonal_;
};

/// q(eta, eta^{x,y}) = p(x,y) eta(x) (m/2 + eta(y)).
GeneratorMatrix build_generator(const StateSpace& space, const SipParams& params);

/// Poisson tail mass tolerated when truncating the uniformization series.
inline constexpr double kUniformizationTail = 1e-12;

/// e^{tQ} f by uniformization: sum_k Pois(Lambda t; k) P^k f with P = I + Q/Lambda.
std::vector<double> semigroup_apply(const GeneratorMatrix& q, double t, std::span<const double> f);

/// mu e^{tQ}: the law at time t of the chain started from mu.
std::vector<double> transient_distribution(const GeneratorMatrix& q, double t,
                                           std::span<const double> mu);

/// (1/T) int_0^T e^{tQ} f dt, evaluated exactly through the time-integrated
/// uniformization series (1/(Lambda T)) sum_k P(N_{Lambda T} > k) P^k f.
std::vector<double> cesaro_average(const GeneratorMatrix& q, double horizon,
                                   std::span<const double> f);

/// The same average by the trapezoid rule on a uniform grid, doubling the
/// number of intervals until successive results differ by less than `tol`.
std::vector<double> cesaro_average_trapezoid(const GeneratorMatrix& q, double horizon,
                                             std::span<const double> f, double tol = 1e-8,
                                             std::size_t max_intervals = 1 << 16);

/// Reversible law of the fixed-particle-number sector: weights
/// prod_x Gamma(m/2+eta(x)) / (eta(x)! Gamma(m/2)), normalized.
std::vector<double> stationary_distribution(const StateSpace& space, double m);

/// The two sides of the self-duality relation on a torus:
/// first = E_eta D(xi, eta_t), second = E_xi D(xi_t, eta).
std::pair<double, double> exact_dual_expectation(const ParticleList& xi, const Occupation& eta,
                                                 double t, const SipParams& params,
                                                 std::size_t cap = kDefaultStateCap);

/// Text dump of a state space and its generator: state lines, then
/// "row col rate" triplets (diagonal included).
void write_generator(std::ostream& os, const StateSpace& space, const GeneratorMatrix& q);

}  // namespace sipsim

#endif  // SIPSIM_ORACLE_HPP
