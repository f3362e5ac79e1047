#include "sipsim/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "sipsim/parallel.hpp"

namespace sipsim {

namespace {

void check_same_shape(const ParticleList& a, const ParticleList& b) {
  if (a.size() != b.size()) throw PreconditionError("coupled sets must have equal particle counts");
  if (a.dim() != b.dim()) throw PreconditionError("coupled sets must have equal dimension");
}

// Sum over i of |a_i - b_i|_1.
Coord pair_distance(const ParticleList& a, const ParticleList& b, const Geometry& g) {
  Coord s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += l1_distance(a.position(i), b.position(i), g);
  return s;
}

bool same_coordinate(const ParticleList& x, const ParticleList& y, std::size_t i, int k,
                     const Geometry& g) {
  return g.wrap(x.coord(i, k)) == g.wrap(y.coord(i, k));
}

bool same_configuration(const ParticleList& x, const ParticleList& y, const Geometry& g) {
  for (std::size_t i = 0; i < x.size(); ++i)
    for (int k = 0; k < x.dim(); ++k)
      if (!same_coordinate(x, y, i, k, g)) return false;
  return true;
}

void log_jump(EventLog* log, double time, const char* set, const ParticleList& before, std::size_t i,
              const ParticleList& after, EventClass cls) {
  if (log == nullptr) return;
  log->entries.push_back({time, set, i, before.site(i), after.site(i), cls});
}

// Brute-force minimum-cost assignment of y-particles to x-particles.
ParticleList matched(const ParticleList& x, const ParticleList& y, const Geometry& g) {
  const std::size_t n = x.size();
  if (n > 8) throw PreconditionError("optimal matching supports at most 8 particles");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best = perm;
  Coord best_cost = -1;
  do {
    Coord cost = 0;
    for (std::size_t i = 0; i < n; ++i) cost += l1_distance(x.position(i), y.position(perm[i]), g);
    if (best_cost < 0 || cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  ParticleList out(y.dim());
  for (std::size_t i = 0; i < n; ++i) out.push_back(y.position(best[i]));
  return out;
}

// Inclusion rate p * eta(y) summed over particles and directions.
double inclusion_total(const ParticleList& set, const SipParams& params) {
  if (!params.inclusion) return 0.0;
  const Geometry& g = params.geometry;
  const double p = g.kernel();
  double total = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i)
    for (int dir = 0; dir < static_cast<int>(g.degree()); ++dir) total += p * occupancy_toward(set, i, dir, g);
  return total;
}

// Inclusion event selected by target in [0, inclusion_total); rounding at the
// top end falls back to the last event with positive rate.
std::pair<std::size_t, int> pick_inclusion(const ParticleList& set, const SipParams& params,
                                           double target) {
  const Geometry& g = params.geometry;
  const double p = g.kernel();
  double acc = 0.0;
  std::pair<std::size_t, int> last{0, -1};
  for (std::size_t i = 0; i < set.size(); ++i)
    for (int dir = 0; dir < static_cast<int>(g.degree()); ++dir) {
      const double r = p * occupancy_toward(set, i, dir, g);
      if (r == 0.0) continue;
      acc += r;
      last = {i, dir};
      if (target < acc) return last;
    }
  return last;
}

// Shared random-walk event selected by target in [0, n m/2).
std::pair<std::size_t, int> pick_walk(std::size_t n, const SipParams& params, double target) {
  const int degree = static_cast<int>(params.geometry.degree());
  const double per = params.geometry.kernel() * params.m / 2.0;
  auto k = std::min(static_cast<std::size_t>(target / per), n * degree - 1);
  return {k / degree, static_cast<int>(k % degree)};
}

// Fires one SIP-to-walker coupling event given the precomputed rate totals.
PairStep or_fire(ParticleList& sip, ParticleList& irw, const SipParams& params, double walk_total,
                 double incl_total, double u) {
  const Geometry& g = params.geometry;
  PairStep step;
  double target = u * (walk_total + incl_total);
  if (target < walk_total || incl_total == 0.0) {
    const auto [i, dir] = pick_walk(sip.size(), params, std::min(target, walk_total));
    step.event_class = EventClass::RandomWalk;
    step.particle = i;
    step.direction = dir;
    apply_jump(sip, i, dir, g);
    apply_jump(irw, i, dir, g);
    return step;
  }
  const auto [i, dir] = pick_inclusion(sip, params, target - walk_total);
  step.event_class = EventClass::Inclusion;
  step.particle = i;
  step.direction = dir;
  apply_jump(sip, i, dir, g);
  return step;
}

// Ornstein clocks: one per agreeing coordinate, two per differing coordinate,
// each of rate m/(2d).
double ornstein_total(const ParticleList& x, const ParticleList& y, const SipParams& params) {
  const Geometry& g = params.geometry;
  const double clock = params.m / (2.0 * g.dim());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (int k = 0; k < g.dim(); ++k) total += same_coordinate(x, y, i, k, g) ? clock : 2.0 * clock;
  return total;
}

PairStep ornstein_fire(ParticleList& x, ParticleList& y, const SipParams& params, double total,
                       RandomStream& stream) {
  const Geometry& g = params.geometry;
  const int d = g.dim();
  const double clock = params.m / (2.0 * d);
  const double target = stream.uniform() * total;
  const int sign_draw = static_cast<int>(stream.below(2));
  PairStep step;
  double acc = 0.0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) {
      const bool joint = same_coordinate(x, y, i, k, g);
      const int clocks = joint ? 1 : 2;
      for (int c = 0; c < clocks; ++c) {
        acc += clock;
        if (target < acc || (i == n - 1 && k == d - 1 && c == clocks - 1)) {
          step.particle = i;
          step.direction = 2 * k + sign_draw;
          step.moved = joint ? 2 : c;
          if (step.moved != 1) apply_jump(x, i, step.direction, g);
          if (step.moved != 0) apply_jump(y, i, step.direction, g);
          return step;
        }
      }
    }
  }
  return step;
}

}  // namespace

bool collision_check(const ParticleList& xi, const Geometry& g) {
  for (std::size_t i = 0; i < xi.size(); ++i)
    for (std::size_t j = i + 1; j < xi.size(); ++j)
      if (l1_distance(xi.position(i), xi.position(j), g) <= 1) return true;
  return false;
}

PairStep same_jump_step(CoupledPairState& state, const SipParams& params, RandomStream& stream) {
  if (state.mode != CouplingMode::SameJumpIrw) throw PreconditionError("state is not in same-jump mode");
  check_same_shape(state.x, state.y);
  const Geometry& g = params.geometry;
  const std::size_t n = state.x.size();
  if (n == 0) throw NoEventError("no particles to move");
  PairStep step;
  step.dt = stream.exponential(static_cast<double>(n) * params.m / 2.0);
  step.particle = static_cast<std::size_t>(stream.below(n));
  step.direction = static_cast<int>(stream.below(g.degree()));
  apply_jump(state.x, step.particle, step.direction, g);
  apply_jump(state.y, step.particle, step.direction, g);
  state.time += step.dt;
  return step;
}

PairStep or_coupled_step(ParticleList& sip, ParticleList& irw, const SipParams& params,
                         RandomStream& stream) {
  check_same_shape(sip, irw);
  params.validate();
  const std::size_t n = sip.size();
  if (n == 0) throw NoEventError("no particles to move");
  const double walk_total = static_cast<double>(n) * params.m / 2.0;
  const double incl_total = inclusion_total(sip, params);
  const double dt = stream.exponential(walk_total + incl_total);
  PairStep step = or_fire(sip, irw, params, walk_total, incl_total, stream.uniform());
  step.dt = dt;
  return step;
}

PairStep ornstein_pair_step(CoupledPairState& state, const SipParams& params, RandomStream& stream) {
  if (state.mode != CouplingMode::OrnsteinIrw && state.mode != CouplingMode::TwoStage)
    throw PreconditionError("state is not in Ornstein mode");
  check_same_shape(state.x, state.y);
  params.validate();
  if (state.x.empty()) throw NoEventError("no particles to move");
  const double total = ornstein_total(state.x, state.y, params);
  const double dt = stream.exponential(total);
  PairStep step = ornstein_fire(state.x, state.y, params, total, stream);
  step.dt = dt;
  state.time += dt;
  return step;
}

std::string to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Coupled: return "coupled";
    case OutcomeKind::CollisionAbort: return "collision_abort";
    case OutcomeKind::HorizonExpired: return "horizon_expired";
  }
  return "unknown";
}

void EventLog::write_csv(std::ostream& os) const {
  auto site_str = [](const Site& s) {
    std::string out;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (k) out += ' ';
      out += std::to_string(s[k]);
    }
    return out;
  };
  os << "time,set,particle,from,to,event_class\n";
  const auto old_precision = os.precision(17);
  for (const auto& e : entries) {
    os << e.time << ',' << e.set << ',' << e.particle << ',' << site_str(e.from) << ','
       << site_str(e.to) << ',' << (e.event_class == EventClass::Inclusion ? "inclusion" : "walk") << '\n';
  }
  os.precision(old_precision);
}

CouplingOutcome two_stage_coupling(const ParticleList& x, const ParticleList& y,
                                   const SipParams& params, double horizon,
                                   const TwoStageOptions& options, RandomStream& stream) {
  check_same_shape(x, y);
  params.validate();
  if (!(horizon > 0.0)) throw PreconditionError("coupling horizon must be positive");
  if (!(options.delta > 0.0 && options.delta < 1.0)) throw PreconditionError("delta must lie in (0,1)");
  const Geometry& g = params.geometry;

  CouplingOutcome out;
  out.counts.attempts = 1;
  auto finish = [&](OutcomeKind kind, double time, const ParticleList& xs, const ParticleList& ys) {
    out.kind = kind;
    out.time = time;
    out.x_final = xs;
    out.y_final = ys;
    return out;
  };
  if (same_configuration(x, y, g)) return finish(OutcomeKind::Coupled, 0.0, x, y);

  const std::size_t n = x.size();
  const bool exact_l1 = !g.is_torus();

  // Stage 1.
  ParticleList xs = x, ys = y, xi = x, yi = y;
  const Coord shadow_gap = pair_distance(xi, yi, g);
  const double stage1_end = (1.0 - options.delta) * horizon;
  const double walk_total = static_cast<double>(n) * params.m / 2.0;
  double s = 0.0;
  for (;;) {
    const double incl_x = inclusion_total(xs, params);
    const double incl_y = inclusion_total(ys, params);
    const double total = walk_total + incl_x + incl_y;
    const double dt = stream.exponential(total);
    if (s + dt > stage1_end) break;
    s += dt;
    const double target = stream.uniform() * total;
    if (target < walk_total) {
      const auto [i, dir] = pick_walk(n, params, target);
      const ParticleList before = options.log ? xs : ParticleList{};
      apply_jump(xs, i, dir, g);
      apply_jump(ys, i, dir, g);
      apply_jump(xi, i, dir, g);
      apply_jump(yi, i, dir, g);
      ++out.counts.rw_jumps;
      log_jump(options.log, s, "shared", before, i, xs, EventClass::RandomWalk);
      if (exact_l1 && pair_distance(xi, yi, g) != shadow_gap)
        throw Error("same-jump shadows changed their distance");
    } else {
      const bool in_x = target - walk_total < incl_x;
      ParticleList& set = in_x ? xs : ys;
      const ParticleList& shadow = in_x ? xi : yi;
      const auto [i, dir] =
          pick_inclusion(set, params, in_x ? target - walk_total : target - walk_total - incl_x);
      if (dir < 0) continue;
      const ParticleList before = options.log ? set : ParticleList{};
      const Coord dist_before = exact_l1 ? pair_distance(set, shadow, g) : 0;
      apply_jump(set, i, dir, g);
      ++out.counts.inclusion_jumps;
      if (exact_l1 && std::abs(pair_distance(set, shadow, g) - dist_before) != 1)
        throw Error("inclusion event changed the SIP-IRW distance by other than 1");
      log_jump(options.log, s, in_x ? "XS" : "YS", before, i, set, EventClass::Inclusion);
      if (same_configuration(xs, ys, g)) return finish(OutcomeKind::Coupled, s, xs, ys);
    }
  }

  // Stage 2: Ornstein pairing of the SIP sets. Without a collision no particle
  // has an occupied neighbor, so SIP and IRW jump rates coincide.
  s = stage1_end;
  if (options.optimal_matching) ys = matched(xs, ys, g);
  if (same_configuration(xs, ys, g)) return finish(OutcomeKind::Coupled, s, xs, ys);
  if (collision_check(xs, g) || collision_check(ys, g)) {
    ++out.counts.collisions;
    return finish(OutcomeKind::CollisionAbort, s, xs, ys);
  }
  for (;;) {
    const double total = ornstein_total(xs, ys, params);
    const double dt = stream.exponential(total);
    if (s + dt > horizon) break;
    s += dt;
    const ParticleList xs_before = options.log ? xs : ParticleList{};
    const ParticleList ys_before = options.log ? ys : ParticleList{};
    const PairStep step = ornstein_fire(xs, ys, params, total, stream);
    if (options.log) {
      if (step.moved != 1) log_jump(options.log, s, "XS", xs_before, step.particle, xs, EventClass::RandomWalk);
      if (step.moved != 0) log_jump(options.log, s, "YS", ys_before, step.particle, ys, EventClass::RandomWalk);
    }
    out.counts.rw_jumps += step.moved == 2 ? 2 : 1;
    if (same_configuration(xs, ys, g)) return finish(OutcomeKind::Coupled, s, xs, ys);
    if (collision_check(xs, g) || collision_check(ys, g)) {
      ++out.counts.collisions;
      return finish(OutcomeKind::CollisionAbort, s, xs, ys);
    }
  }
  return finish(OutcomeKind::HorizonExpired, horizon, xs, ys);
}

std::vector<double> doubling_schedule(double first, int doublings) {
  if (!(first > 0.0) || doublings < 0) throw DomainError("invalid doubling schedule");
  std::vector<double> out;
  for (int k = 0; k <= doublings; ++k) out.push_back(first * std::ldexp(1.0, k));
  return out;
}

CouplingOutcome iterated_coupling(const ParticleList& x, const ParticleList& y,
                                  const SipParams& params, std::span<const double> schedule,
                                  const TwoStageOptions& options, RandomStream& stream) {
  if (schedule.empty()) throw PreconditionError("coupling schedule must not be empty");
  CouplingCounts counts;
  double elapsed = 0.0;
  ParticleList cx = x, cy = y;
  CouplingOutcome last;
  for (double horizon : schedule) {
    last = two_stage_coupling(cx, cy, params, horizon, options, stream);
    counts.rw_jumps += last.counts.rw_jumps;
    counts.inclusion_jumps += last.counts.inclusion_jumps;
    counts.collisions += last.counts.collisions;
    counts.attempts += 1;
    if (last.kind == OutcomeKind::Coupled) {
      last.time += elapsed;
      last.counts = counts;
      return last;
    }
    elapsed += last.time;
    cx = last.x_final;
    cy = last.y_final;
  }
  last.kind = OutcomeKind::HorizonExpired;
  last.time = elapsed;
  last.counts = counts;
  return last;
}

std::vector<std::vector<double>> sip_irw_distance_samples(const ParticleList& x,
                                                         const SipParams& params,
                                                         std::span<const double> times,
                                                         std::size_t replicas, std::uint64_t seed,
                                                         unsigned workers) {
  if (!std::is_sorted(times.begin(), times.end())) throw DomainError("time grid must be sorted");
  if (!times.empty() && times.front() < 0.0) throw DomainError("times must be nonnegative");
  const Geometry& g = params.geometry;
  const bool exact_l1 = !g.is_torus();
  return parallel_replicas(replicas, workers, [&](std::size_t r) {
    RandomStream stream = derive_stream(seed, r);
    ParticleList sip = x, irw = x;
    std::vector<double> values;
    values.reserve(times.size());
    double s = 0.0;
    Coord dist = 0;
    for (double t : times) {
      const double walk_total = static_cast<double>(sip.size()) * params.m / 2.0;
      while (!sip.empty()) {
        const double incl_total = inclusion_total(sip, params);
        const double dt = stream.exponential(walk_total + incl_total);
        if (s + dt > t) break;  // clocks are memoryless; the overshooting draw is discarded
        s += dt;
        const PairStep step = or_fire(sip, irw, params, walk_total, incl_total, stream.uniform());
        if (exact_l1) {
          const Coord next = pair_distance(sip, irw, g);
          const Coord change = std::abs(next - dist);
          if ((step.event_class == EventClass::RandomWalk && change != 0) ||
              (step.event_class == EventClass::Inclusion && change != 1))
            throw Error("SIP-to-walker coupling distance changed outside an inclusion event");
          dist = next;
        }
      }
      s = t;
      values.push_back(static_cast<double>(pair_distance(sip, irw, g)));
    }
    return values;
  });
}

std::vector<DistancePoint> sip_irw_distance_profile(const ParticleList& x, const SipParams& params,
                                                    std::span<const double> times,
                                                    std::size_t replicas, std::uint64_t seed,
                                                    unsigned workers) {
  const auto per_replica = sip_irw_distance_samples(x, params, times, replicas, seed, workers);
  std::vector<DistancePoint> out;
  for (std::size_t j = 0; j < times.size(); ++j) {
    std::vector<double> column(replicas);
    for (std::size_t r = 0; r < replicas; ++r) column[r] = per_replica[r][j];
    out.push_back({times[j], replicas >= 2 ? batch_mean(column) : Estimate{column.empty() ? 0.0 : column[0], 0.0}});
  }
  return out;
}

ReflectionResult reflection_check(std::int64_t a, double t, double rate, std::size_t replicas,
                                  RandomStream& stream) {
  if (a < 0) throw PreconditionError("level a must be nonnegative");
  if (!(t >= 0.0) || !(rate > 0.0)) throw DomainError("invalid time or rate");
  if (replicas < 2) throw InsufficientDataError("reflection check needs at least two replicas");
  std::vector<double> survived(replicas), within(replicas), lattice(replicas);
  for (std::size_t r = 0; r < replicas; ++r) {
    // Left side: run until a is hit or time t passes.
    {
      std::int64_t pos = 0;
      double s = 0.0;
      bool hit = a == 0;
      while (!hit) {
        s += stream.exponential(rate);
        if (s > t) break;
        pos += stream.below(2) == 0 ? 1 : -1;
        hit = pos == a;
      }
      survived[r] = hit ? 0.0 : 1.0;
    }
    // Right side: an independent path observed at time t.
    {
      std::int64_t pos = 0;
      double s = 0.0;
      for (;;) {
        s += stream.exponential(rate);
        if (s > t) break;
        pos += stream.below(2) == 0 ? 1 : -1;
      }
      within[r] = std::abs(pos) <= a ? 1.0 : 0.0;
      lattice[r] = (pos >= -a && pos <= a - 1) ? 1.0 : 0.0;
    }
  }
  return {batch_mean(survived), batch_mean(within), batch_mean(lattice)};
}

}  // namespace sipsim
