#ifndef SIPSIM_COUPLING_HPP
#define SIPSIM_COUPLING_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sipsim/core.hpp"
#include "sipsim/dynamics.hpp"
#include "sipsim/stats.hpp"

namespace sipsim {

enum class CouplingMode { SameJumpIrw, OrnsteinIrw, OrSipIrw, TwoStage };

/// Two labeled particle sets evolved jointly.
struct CoupledPairState {
  ParticleList x;
  ParticleList y;
  CouplingMode mode = CouplingMode::SameJumpIrw;
  int stage = 1;
  double delta = 0.5;
  double horizon = 0.0;
  double time = 0.0;
  bool collided = false;
  std::optional<double> coupled_at;
};

enum class EventClass { RandomWalk, Inclusion };

/// What one coupled step did.
struct PairStep {
  double dt = 0.0;
  EventClass event_class = EventClass::RandomWalk;
  std::size_t particle = 0;
  int direction = 0;
  /// For Ornstein steps: 0 = x only, 1 = y only, 2 = both.
  int moved = 2;
};

/// True iff two distinct particles of the same set are within l1 distance 1.
bool collision_check(const ParticleList& xi, const Geometry& g);

/// One IRW event applied identically (same index, same displacement) to x and y.
PairStep same_jump_step(CoupledPairState& state, const SipParams& params, RandomStream& stream);

/// SIP-to-IRW coupling: random-walk events (rate p m/2 per particle and
/// neighbor) move particle i in both lists; inclusion events (rate
/// p eta_sip(y)) move only the SIP particle.
PairStep or_coupled_step(ParticleList& sip, ParticleList& irw, const SipParams& params,
                         RandomStream& stream);

/// Coordinate-wise Ornstein coupling of x_i with y_i. Coordinates that agree
/// jump jointly; coordinates that differ jump independently, so the difference
/// performs a walk at twice the single-walker rate.
PairStep ornstein_pair_step(CoupledPairState& state, const SipParams& params, RandomStream& stream);

enum class OutcomeKind { Coupled, CollisionAbort, HorizonExpired };

struct CouplingCounts {
  std::uint64_t rw_jumps = 0;
  std::uint64_t inclusion_jumps = 0;
  std::uint64_t collisions = 0;
  std::uint64_t attempts = 0;
};

struct CouplingOutcome {
  OutcomeKind kind = OutcomeKind::HorizonExpired;
  /// Coupling time when Coupled, abort time, or elapsed time on expiry.
  double time = 0.0;
  CouplingCounts counts;
  ParticleList x_final;
  ParticleList y_final;
};

std::string to_string(OutcomeKind kind);

/// Optional per-event record, written as CSV (time,set,particle,from,to,event_class).
struct EventLog {
  struct Entry {
    double time;
    std::string set;
    std::size_t particle;
    Site from;
    Site to;
    EventClass event_class;
  };
  std::vector<Entry> entries;

  void write_csv(std::ostream& os) const;
};

struct TwoStageOptions {
  double delta = 0.5;
  /// Re-pair y to x by a minimum total l1 assignment before stage 2.
  bool optimal_matching = false;
  EventLog* log = nullptr;
};

/// One coupling attempt on [0, t]: stage 1 on [0, (1-delta)t] runs the SIP-to-walker
/// coupling of each SIP set against an IRW shadow, the two shadows sharing all
/// jumps; stage 2 runs the Ornstein coupling of the two SIP sets by index and
/// aborts on the first same-set collision.
CouplingOutcome two_stage_coupling(const ParticleList& x, const ParticleList& y,
                                   const SipParams& params, double horizon,
                                   const TwoStageOptions& options, RandomStream& stream);

/// Horizons t0, 2 t0, ..., 2^doublings t0.
std::vector<double> doubling_schedule(double first, int doublings);

/// Repeated attempts, each restarted from the previous attempt's terminal
/// positions with the next horizon; returns the first success.
CouplingOutcome iterated_coupling(const ParticleList& x, const ParticleList& y,
                                  const SipParams& params, std::span<const double> schedule,
                                  const TwoStageOptions& options, RandomStream& stream);

struct DistancePoint {
  double time = 0.0;
  Estimate distance;
};

/// Per-replica sum_i |X^S_i(t) - X^I_i(t)| at each grid time (replica-major),
/// replica r driven by derive_stream(seed, r).
std::vector<std::vector<double>> sip_irw_distance_samples(const ParticleList& x,
                                                         const SipParams& params,
                                                         std::span<const double> times,
                                                         std::size_t replicas, std::uint64_t seed,
                                                         unsigned workers = 1);

/// Monte Carlo mean of sum_i |X^S_i(t) - X^I_i(t)| under the SIP-to-walker coupling.
std::vector<DistancePoint> sip_irw_distance_profile(const ParticleList& x, const SipParams& params,
                                                    std::span<const double> times,
                                                    std::size_t replicas, std::uint64_t seed,
                                                    unsigned workers = 1);

/// Both sides of the reflection identity for a walk on Z jumping at total
/// `rate`, estimated from independent paths. `lattice_rhs` is
/// P(-a <= X(t) <= a-1), the exact lattice counterpart of the left side.
struct ReflectionResult {
  Estimate lhs;          // P(tau_a >= t)
  Estimate rhs;          // P(|X(t)| <= a)
  Estimate lattice_rhs;  // P(-a <= X(t) <= a-1)
};

ReflectionResult reflection_check(std::int64_t a, double t, double rate, std::size_t replicas,
                                  RandomStream& stream);

}  // namespace sipsim

#endif  // SIPSIM_COUPLING_HPP
