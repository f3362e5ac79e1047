#include "sipsim/dynamics.hpp"

#include <cmath>

namespace sipsim {

void SipParams::validate() const {
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("inclusion parameter m must be positive");
}

std::int64_t occupancy_toward(const ParticleList& xi, std::size_t i, int direction,
                              const Geometry& g) {
  const int axis = direction_axis(direction);
  const Coord target = g.shift(xi.coord(i, axis), direction_step(direction));
  const int d = xi.dim();
  std::int64_t count = 0;
  for (std::size_t j = 0; j < xi.size(); ++j) {
    if (j == i) continue;
    bool same = true;
    for (int k = 0; k < d && same; ++k) {
      const Coord want = k == axis ? target : xi.coord(i, k);
      same = g.wrap(xi.coord(j, k)) == g.wrap(want);
    }
    count += same;
  }
  return count;
}

void apply_jump(ParticleList& xi, std::size_t i, int direction, const Geometry& g) {
  const int axis = direction_axis(direction);
  xi.set_coord(i, axis, g.shift(xi.coord(i, axis), direction_step(direction)));
}

namespace {

std::vector<Event> event_list(const ParticleList& xi, const SipParams& params, bool inclusion) {
  params.validate();
  const Geometry& g = params.geometry;
  const double p = g.kernel();
  std::vector<Event> out;
  out.reserve(xi.size() * g.degree());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    for (int dir = 0; dir < static_cast<int>(g.degree()); ++dir) {
      Site y = xi.site(i);
      y[direction_axis(dir)] = g.shift(y[direction_axis(dir)], direction_step(dir));
      const double eta_y = inclusion ? static_cast<double>(occupancy_toward(xi, i, dir, g)) : 0.0;
      out.push_back({i, std::move(y), p * (params.m / 2.0 + eta_y)});
    }
  }
  return out;
}

}  // namespace

std::vector<Event> sip_event_rates(const ParticleList& xi, const SipParams& params) {
  return event_list(xi, params, params.inclusion);
}

std::vector<Event> irw_event_rates(const ParticleList& xi, const SipParams& params) {
  return event_list(xi, params, false);
}

Step gillespie_step(const ParticleList& xi, std::span<const Event> rates, RandomStream& stream) {
  if (rates.empty()) throw NoEventError("no events to choose from");
  double total = 0.0;
  for (const auto& e : rates) total += e.rate;
  if (!(total > 0.0)) throw NoEventError("total rate is zero");
  Step step;
  step.dt = stream.exponential(total);
  const double target = stream.uniform() * total;
  double acc = 0.0;
  step.event = rates.size() - 1;
  for (std::size_t k = 0; k < rates.size(); ++k) {
    acc += rates[k].rate;
    if (target < acc) {
      step.event = k;
      break;
    }
  }
  step.next = xi;
  const Event& e = rates[step.event];
  for (int k = 0; k < xi.dim(); ++k) step.next.set_coord(e.particle, k, e.target[k]);
  return step;
}

JumpEngine::JumpEngine(const SipParams& params) : params_(params) { params_.validate(); }

double JumpEngine::refresh(const ParticleList& xi, bool inclusion) {
  const Geometry& g = params_.geometry;
  const int degree = static_cast<int>(g.degree());
  const double p = g.kernel();
  const double free_rate = p * params_.m / 2.0;
  n_ = xi.size();
  rates_.resize(n_ * degree);
  total_ = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (int dir = 0; dir < degree; ++dir) {
      double r = free_rate;
      if (inclusion) r += p * static_cast<double>(occupancy_toward(xi, i, dir, g));
      rates_[i * degree + dir] = r;
      total_ += r;
    }
  }
  return total_;
}

std::pair<std::size_t, int> JumpEngine::pick(double u) const {
  const double target = u * total_;
  const int degree = static_cast<int>(params_.geometry.degree());
  double acc = 0.0;
  for (std::size_t k = 0; k < rates_.size(); ++k) {
    acc += rates_[k];
    if (target < acc) return {k / degree, static_cast<int>(k % degree)};
  }
  const std::size_t last = rates_.size() - 1;
  return {last / degree, static_cast<int>(last % degree)};
}

Trajectory simulate(const ParticleList& xi0, ProcessKind kind, const SipParams& params,
                    double horizon, RandomStream& stream, Record record) {
  if (!(horizon >= 0.0)) throw DomainError("time horizon must be nonnegative");
  const bool inclusion = kind == ProcessKind::Sip && params.inclusion;
  JumpEngine engine(params);
  Trajectory traj;
  traj.horizon = horizon;
  traj.times.push_back(0.0);
  traj.states.push_back(xi0);
  if (xi0.empty()) return traj;

  ParticleList xi = xi0;
  const std::size_t n = xi.size();
  double t = 0.0;
  double last_event = 0.0;
  for (;;) {
    const double total = engine.refresh(xi, inclusion);
    const double dt = stream.exponential(total);
    if (t + dt > horizon) break;
    t += dt;
    const auto [i, dir] = engine.pick(stream.uniform());
    apply_jump(xi, i, dir, params.geometry);
    ++traj.events;
    last_event = t;
    if (xi.size() != n) throw Error("particle number changed");
    if (record == Record::Full) {
      traj.times.push_back(t);
      traj.states.push_back(xi);
    }
  }
  if (record == Record::Final) {
    traj.times.back() = last_event;
    traj.states.back() = std::move(xi);
  }
  return traj;
}

}  // namespace sipsim
