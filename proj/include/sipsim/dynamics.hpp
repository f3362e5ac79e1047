#ifndef SIPSIM_DYNAMICS_HPP
#define SIPSIM_DYNAMICS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "sipsim/core.hpp"

namespace sipsim {

class NoEventError : public Error {
 public:
  using Error::Error;
};

struct SipParams {
  double m = 2.0;
  Geometry geometry = Geometry::infinite(1);
  /// When false the occupation term of the jump rate is dropped and the
  /// process is a system of independent walkers.
  bool inclusion = true;

  void validate() const;
};

enum class ProcessKind { Sip, Irw };

/// A jump of one labeled particle to a neighboring site.
struct Event {
  std::size_t particle = 0;
  Site target;
  double rate = 0.0;
};

// Directions are numbered as in neighbors(): 2k is +e_k, 2k+1 is -e_k.
inline int direction_step(int direction) { return direction % 2 == 0 ? +1 : -1; }
inline int direction_axis(int direction) { return direction / 2; }

/// Number of particles other than i sitting on the neighbor of x_i in `direction`.
std::int64_t occupancy_toward(const ParticleList& xi, std::size_t i, int direction,
                              const Geometry& g);

/// Moves particle i one step in `direction`.
void apply_jump(ParticleList& xi, std::size_t i, int direction, const Geometry& g);

/// Particle i at x jumps to neighbor y at rate p(x,y) (m/2 + eta(y)).
std::vector<Event> sip_event_rates(const ParticleList& xi, const SipParams& params);

/// Free walkers: rate p(x,y) m/2 per particle and neighbor.
std::vector<Event> irw_event_rates(const ParticleList& xi, const SipParams& params);

struct Step {
  ParticleList next;
  double dt = 0.0;
  std::size_t event = 0;  // index into the rate list
};

/// One exact continuous-time step: exponential holding time with the total
/// rate, then an event chosen proportionally to its rate.
Step gillespie_step(const ParticleList& xi, std::span<const Event> rates, RandomStream& stream);

enum class Record { Final, Full };

struct Trajectory {
  std::vector<double> times;
  std::vector<ParticleList> states;
  double horizon = 0.0;
  std::uint64_t events = 0;

  const ParticleList& final_state() const { return states.back(); }
};

/// Allocation-free jump-chain engine shared by simulate() and the couplings.
/// Rates are recomputed from scratch at every event.
class JumpEngine {
 public:
  explicit JumpEngine(const SipParams& params);

  /// Total rate and per-(particle, direction) rates for the current state.
  double refresh(const ParticleList& xi, bool inclusion);
  /// Samples a (particle, direction) pair proportional to the last refreshed rates.
  std::pair<std::size_t, int> pick(double u) const;

  std::span<const double> rates() const { return rates_; }

 private:
  SipParams params_;
  std::vector<double> rates_;
  double total_ = 0.0;
  std::size_t n_ = 0;
};

Trajectory simulate(const ParticleList& xi0, ProcessKind kind, const SipParams& params,
                    double horizon, RandomStream& stream, Record record = Record::Final);

}  // namespace sipsim

#endif  // SIPSIM_DYNAMICS_HPP
