#include <doctest.h>

#include <cmath>
#include <thread>

#include "sipsim/duality.hpp"
#include "support.hpp"

using namespace sipsim;

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

Occupation occ(std::initializer_list<std::pair<Coord, std::int64_t>> entries) {
  Occupation eta;
  for (const auto& [x, k] : entries)
    if (k > 0) eta.add(Site{x}, k);
  return eta;
}

}  // namespace

TEST_CASE("single-site factor values") {
  CHECK(d_single(0, 0, 2.0) == 1.0);
  CHECK(d_single(3, 2, 2.0) == 0.0);
  CHECK(d_single(1, 3, 2.0) == doctest::Approx(3.0));
  CHECK(d_single(1, 7, 0.5) == doctest::Approx(2.0 * 7 / 0.5));
  CHECK(d_single(2, 2, 2.0) == doctest::Approx(1.0));
  CHECK(d_single(0, 9, 3.3) == 1.0);
}

TEST_CASE("for m = 2 the factor is a binomial coefficient") {
  DualityEvaluator eval(2.0);
  for (int l = 0; l <= 170; l += 17)
    for (int k = 0; k <= l; k += 7) {
      const double exact = std::exp(std::lgamma(l + 1.0) - std::lgamma(k + 1.0) - std::lgamma(l - k + 1.0));
      CHECK(eval.d(k, l) == doctest::Approx(exact).epsilon(1e-10));
    }
  for (int l = 0; l <= 30; ++l)
    for (int k = 0; k <= l; ++k) CHECK(eval.d(k, l) == doctest::Approx(binomial(l, k)).epsilon(1e-12));
}

TEST_CASE("general m against direct products") {
  for (double m : {0.4, 1.0, 3.0, 9.0}) {
    DualityEvaluator eval(m);
    for (int l = 0; l <= 12; ++l)
      for (int k = 0; k <= l; ++k) {
        double direct = 1.0;
        for (int j = 0; j < k; ++j) direct *= (l - j) / (m / 2.0 + j);
        CHECK(eval.d(k, l) == doctest::Approx(direct).epsilon(1e-12));
      }
  }
}

TEST_CASE("rising ladder recurrence") {
  DualityEvaluator eval(1.5);
  CHECK(eval.rising(0) == 1.0);
  for (int k = 0; k < 50; ++k) CHECK(eval.rising(k + 1) / eval.rising(k) == doctest::Approx(0.75 + k));
}

TEST_CASE("duality function examples") {
  const double m = 2.0;
  CHECK(duality_function(ParticleList(1), occ({{0, 3}}), m) == 1.0);
  CHECK(duality_function(ParticleList::line({0}), occ({{0, 5}}), m) == doctest::Approx(5.0));
  CHECK(duality_function(ParticleList::line({0, 1, 1}), occ({{1, 4}}), m) == 0.0);
}

TEST_CASE("duality function ignores labels and factorizes over disjoint supports") {
  const double m = 1.3;
  const Occupation eta = occ({{0, 3}, {1, 2}, {4, 5}});
  const auto a = ParticleList::line({0, 1, 0});
  const auto b = ParticleList::line({1, 0, 0});
  CHECK(duality_function(a, eta, m) == doctest::Approx(duality_function(b, eta, m)));
  const auto left = ParticleList::line({0, 0});
  const auto right = ParticleList::line({4, 1});
  const auto both = ParticleList::line({0, 4, 0, 1});
  CHECK(duality_function(both, eta, m) ==
        doctest::Approx(duality_function(left, eta, m) * duality_function(right, eta, m)));
  CHECK(duality_function(both, eta, m) >= 0.0);
}

TEST_CASE("concurrent readers extend the ladder consistently") {
  DualityEvaluator eval(0.7);
  std::vector<double> results(4, 0.0);
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < 4; ++w)
      pool.emplace_back([&, w] {
        double s = 0.0;
        for (int k = 0; k < 400; ++k) s += eval.log_rising((k * (w + 3)) % 400);
        results[w] = s;
      });
  }
  DualityEvaluator fresh(0.7);
  for (int w = 0; w < 4; ++w) {
    double s = 0.0;
    for (int k = 0; k < 400; ++k) s += fresh.log_rising((k * (w + 3)) % 400);
    CHECK(results[w] == s);
  }
}

TEST_CASE("closed-form transforms") {
  const double m = 2.0;
  CHECK(closed_form_transform(NuLambda{0.4}, ParticleList(1), m) == 1.0);
  CHECK(closed_form_transform(NuLambda{0.5}, ParticleList::line({0, 3, 3, 9}), m) == doctest::Approx(1.0));
  CHECK(closed_form_transform(NuLambda{0.4}, ParticleList::line({0, 1}), m) == doctest::Approx(4.0 / 9.0));
  CHECK(closed_form_transform(PoissonProduct{1.0}, ParticleList::line({0, 0}), m) == doctest::Approx(0.5));
  CHECK(closed_form_transform(PoissonProduct{1.0}, ParticleList::line({0, 1}), m) == doctest::Approx(1.0));
  CHECK(closed_form_transform(PoissonProduct{2.0}, ParticleList::line({0}), 4.0) == doctest::Approx(1.0));
  const Occupation eta = occ({{0, 3}, {1, 1}});
  CHECK(closed_form_transform(Deterministic{eta}, ParticleList::line({0, 1}), m) ==
        doctest::Approx(duality_function(ParticleList::line({0, 1}), eta, m)));
  const NuMixture mix{{{0.2, 0.5}, {0.6, 0.5}}};
  CHECK(closed_form_transform(mix, ParticleList::line({0, 5}), m) == doctest::Approx(1.15625));
}

TEST_CASE("empirical transform of a point mass is exact") {
  const Occupation eta = occ({{0, 2}, {1, 3}});
  RandomStream s(1, 0);
  const Estimate e = empirical_transform(ParticleList::line({0, 1}), [&](RandomStream&) { return eta; }, 200, s, 2.0);
  CHECK(e.mean == doctest::Approx(6.0));
  CHECK(e.std_error == 0.0);
}

TEST_CASE("empirical transform of the empty law is zero") {
  RandomStream s(2, 0);
  const Geometry g = Geometry::torus(1, 5);
  const Estimate e = empirical_transform(
      ParticleList::line({0}), [&](RandomStream& r) { return sample_product(NuLambda{0.0}, g, 2.0, r); }, 100, s, 2.0);
  CHECK(e.mean == 0.0);
  CHECK(e.std_error == 0.0);
}

TEST_CASE("empirical transform of the product law covers rho^n") {
  const Geometry g = Geometry::torus(1, 6);
  const std::vector<ParticleList> xis{ParticleList::line({0}), ParticleList::line({0, 3}),
                                      ParticleList::line({0, 0, 1}), ParticleList::line({2, 2, 2, 5})};
  int stream = 0;
  for (double m : {1.0, 2.0, 4.0})
    for (double lambda : {0.2, 0.4}) {
      const double rho = lambda / (1.0 - lambda);
      for (const auto& xi : xis) {
        RandomStream s(3, stream++);
        const Estimate e = empirical_transform(
            xi, [&](RandomStream& r) { return sample_product(NuLambda{lambda}, g, m, r); }, 40000, s, m);
        // 24 simultaneous comparisons.
        CHECK(testing::within_sigma(e, std::pow(rho, static_cast<double>(xi.size())), 4.0));
      }
    }
}

TEST_CASE("temperedness bounds") {
  CHECK(temperedness_bound(NuLambda{0.4}, 3, 2.0) == doctest::Approx(std::pow(2.0 / 3.0, 3)));
  CHECK(temperedness_bound(NuLambda{0.0}, 2, 2.0) == 0.0);
  CHECK(temperedness_bound(PoissonProduct{1.0}, 3, 2.0) == doctest::Approx(1.0));
  CHECK(temperedness_bound(PoissonProduct{1.0}, 3, 1.0) == doctest::Approx(8.0));
  const EmpiricalLaw empirical{[](RandomStream&) { return Occupation{}; }, 10};
  CHECK_THROWS_AS(temperedness_bound(empirical, 2, 2.0), UnsupportedError);
}

TEST_CASE("poisson bound is attained on spread configurations") {
  for (double m : {0.5, 1.0, 2.0, 5.0}) {
    const double bound = temperedness_bound(PoissonProduct{1.3}, 3, m);
    CHECK(closed_form_transform(PoissonProduct{1.3}, ParticleList::line({0, 1, 2}), m) == doctest::Approx(bound));
    CHECK(closed_form_transform(PoissonProduct{1.3}, ParticleList::line({0, 0, 2}), m) <= bound * (1 + 1e-12));
    CHECK(closed_form_transform(PoissonProduct{1.3}, ParticleList::line({1, 1, 1}), m) <= bound * (1 + 1e-12));
  }
}
