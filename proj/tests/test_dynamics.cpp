#include <doctest.h>

#include <cmath>

#include "dense.hpp"
#include "sipsim/dynamics.hpp"
#include "support.hpp"

using namespace sipsim;

namespace {

SipParams line_params(double m, Geometry g = Geometry::infinite(1)) {
  SipParams p;
  p.m = m;
  p.geometry = g;
  return p;
}

double total_rate(const std::vector<Event>& events) {
  double s = 0.0;
  for (const auto& e : events) s += e.rate;
  return s;
}

}  // namespace

TEST_CASE("sip rates include the occupation of the target") {
  const auto events = sip_event_rates(ParticleList::line({0, 1}), line_params(2.0));
  bool right = false, left = false;
  for (const auto& e : events) {
    if (e.particle != 0) continue;
    if (e.target == Site{1}) {
      CHECK(e.rate == doctest::Approx(1.0));
      right = true;
    }
    if (e.target == Site{-1}) {
      CHECK(e.rate == doctest::Approx(0.5));
      left = true;
    }
  }
  CHECK(right);
  CHECK(left);
  CHECK(sip_event_rates(ParticleList(1), line_params(2.0)).empty());
}

TEST_CASE("free walker total rate is n m / 2") {
  CHECK(total_rate(irw_event_rates(ParticleList::line({0}), line_params(2.0))) == doctest::Approx(1.0));
  SipParams p = line_params(4.0, Geometry::infinite(2));
  const auto xi = ParticleList::from_sites({{0, 0}, {0, 0}, {1, 0}}, 2);
  CHECK(total_rate(irw_event_rates(xi, p)) == doctest::Approx(6.0));
}

TEST_CASE("one particle has identical sip and free rates") {
  const SipParams p = line_params(1.5, Geometry::torus(2, 4));
  const auto xi = ParticleList::from_sites({{3, 1}}, 2);
  const auto a = sip_event_rates(xi, p), b = irw_event_rates(xi, p);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].target == b[k].target);
    CHECK(a[k].rate == b[k].rate);
  }
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(line_params(0.0).validate(), DomainError);
  CHECK_THROWS_AS(line_params(-1.0).validate(), DomainError);
}

TEST_CASE("gillespie step with one event always fires it") {
  RandomStream s(5, 0);
  const ParticleList xi = ParticleList::line({0});
  const std::vector<Event> one{{0, Site{1}, 0.7}};
  for (int k = 0; k < 100; ++k) {
    const Step st = gillespie_step(xi, one, s);
    CHECK(st.event == 0);
    CHECK(st.next == ParticleList::line({1}));
    CHECK(st.dt > 0.0);
  }
}

TEST_CASE("gillespie selects proportionally and waits exponentially") {
  RandomStream s(6, 0);
  const ParticleList xi = ParticleList::line({0});
  const std::vector<Event> two{{0, Site{1}, 0.5}, {0, Site{-1}, 1.5}};
  const int draws = 100000;
  std::vector<double> second(draws), waits(draws);
  for (int k = 0; k < draws; ++k) {
    const Step st = gillespie_step(xi, two, s);
    second[k] = st.event == 1 ? 1.0 : 0.0;
    waits[k] = st.dt;
  }
  CHECK(testing::within_sigma(testing::iid_estimate(second), 0.75));
  CHECK(testing::within_sigma(testing::iid_estimate(waits), 0.5));
}

TEST_CASE("zero horizon returns the initial state") {
  RandomStream s(7, 0);
  const ParticleList xi = ParticleList::line({0, 0, 3});
  const Trajectory tr = simulate(xi, ProcessKind::Sip, line_params(2.0), 0.0, s, Record::Full);
  REQUIRE(tr.states.size() == 1);
  CHECK(tr.times[0] == 0.0);
  CHECK(tr.final_state() == xi);
  CHECK_THROWS_AS(simulate(xi, ProcessKind::Sip, line_params(2.0), -1.0, s), DomainError);
}

TEST_CASE("full trajectories move one particle one step at a time") {
  RandomStream s(8, 0);
  const SipParams p = line_params(1.0, Geometry::torus(2, 6));
  const auto xi = ParticleList::from_sites({{0, 0}, {0, 1}, {3, 3}}, 2);
  const Trajectory tr = simulate(xi, ProcessKind::Sip, p, 20.0, s, Record::Full);
  CHECK(tr.events > 10);
  CHECK(tr.states.size() == tr.events + 1);
  for (std::size_t k = 1; k < tr.states.size(); ++k) {
    CHECK(tr.times[k] > tr.times[k - 1]);
    const ParticleList& a = tr.states[k - 1];
    const ParticleList& b = tr.states[k];
    REQUIRE(a.size() == b.size());
    int moved = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const Coord dist = l1_distance(a.position(i), b.position(i), p.geometry);
      CHECK(dist <= 1);
      moved += dist == 1;
    }
    CHECK(moved == 1);
  }
  CHECK(tr.times.back() <= 20.0);
}

TEST_CASE("final record matches the end of the full record") {
  const SipParams p = line_params(2.0);
  const ParticleList xi = ParticleList::line({0, 1, 1});
  RandomStream a(9, 1), b(9, 1);
  const Trajectory full = simulate(xi, ProcessKind::Sip, p, 5.0, a, Record::Full);
  const Trajectory last = simulate(xi, ProcessKind::Sip, p, 5.0, b, Record::Final);
  CHECK(full.final_state() == last.final_state());
  CHECK(full.events == last.events);
  CHECK(full.times.back() == last.times.back());
}

TEST_CASE("sip without the inclusion term follows the free path exactly") {
  SipParams p = line_params(2.0, Geometry::torus(1, 4));
  p.inclusion = false;
  const ParticleList xi = ParticleList::line({0, 1, 1});
  RandomStream a(10, 0), b(10, 0);
  const Trajectory sip = simulate(xi, ProcessKind::Sip, p, 10.0, a, Record::Full);
  const Trajectory irw = simulate(xi, ProcessKind::Irw, p, 10.0, b, Record::Full);
  CHECK(sip.times == irw.times);
  CHECK(sip.states == irw.states);
}

TEST_CASE("free walkers have zero mean displacement and variance m t / (2d)") {
  const double m = 3.0, t = 2.0;
  const int d = 2, reps = 40000;
  const SipParams p = line_params(m, Geometry::infinite(d));
  const ParticleList xi = ParticleList::from_sites({{0, 0}, {0, 0}}, d);
  std::vector<double> disp(reps), sq(reps);
  for (int r = 0; r < reps; ++r) {
    RandomStream s = derive_stream(11, r);
    const auto end = simulate(xi, ProcessKind::Irw, p, t, s).final_state();
    disp[r] = static_cast<double>(end.coord(1, 0));
    sq[r] = static_cast<double>(end.coord(0, 1) * end.coord(0, 1));
  }
  CHECK(testing::within_sigma(testing::iid_estimate(disp), 0.0));
  CHECK(testing::within_sigma(testing::iid_estimate(sq), m / 2.0 * t / d));
}

TEST_CASE("single sip walker on a 3-cycle matches the closed form") {
  const double t = 0.8;
  const int reps = 50000;
  const SipParams p = line_params(2.0, Geometry::torus(1, 3));
  std::vector<double> at_origin(reps);
  for (int r = 0; r < reps; ++r) {
    RandomStream s = derive_stream(12, r);
    at_origin[r] = simulate(ParticleList::line({0}), ProcessKind::Sip, p, t, s).final_state().coord(0, 0) == 0;
  }
  const double exact = 1.0 / 3.0 + 2.0 / 3.0 * std::exp(-1.5 * t);
  CHECK(testing::within_sigma(testing::iid_estimate(at_origin), exact));
}

TEST_CASE("two sip particles on a 5-cycle follow the labeled chain law") {
  const int side = 5, reps = 100000;
  const double t = 1.0, m = 2.0;
  const SipParams p = line_params(m, Geometry::torus(1, side));
  const testing::Matrix pt = testing::expm(testing::labeled_ring_generator(2, side, m, true), t);
  // Start (0, 1): encoded as 0 + 5 * 1.
  const std::size_t start = 5;
  std::vector<std::vector<double>> hits(side * side, std::vector<double>(reps, 0.0));
  for (int r = 0; r < reps; ++r) {
    RandomStream s = derive_stream(13, r);
    const auto end = simulate(ParticleList::line({0, 1}), ProcessKind::Sip, p, t, s).final_state();
    hits[end.coord(0, 0) + side * end.coord(1, 0)][r] = 1.0;
  }
  for (std::size_t state = 0; state < hits.size(); ++state) {
    const double exact = pt(start, state);
    const double floor = std::sqrt(exact * (1.0 - exact) / reps);
    const auto e = testing::iid_estimate(hits[state]);
    // 25 simultaneous comparisons, so a Bonferroni-style 4 sigma band.
    CHECK(std::abs(e.mean - exact) <= 4.0 * std::max(e.std_error, floor) + 1e-12);
  }
}
