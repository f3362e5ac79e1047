#include <doctest.h>

#include <cmath>

#include "sipsim/measures.hpp"
#include "support.hpp"

using namespace sipsim;

namespace {

// Negative binomial pmf through lgamma, independent of the library's recursion.
double nb_pmf(int k, double lambda, double m) {
  const double a = m / 2.0;
  return std::exp(a * std::log1p(-lambda) + k * std::log(lambda) + std::lgamma(a + k) - std::lgamma(k + 1.0) -
                  std::lgamma(a));
}

}  // namespace

TEST_CASE("density and its inverse") {
  CHECK(density_of(0.4) == doctest::Approx(2.0 / 3.0));
  CHECK(lambda_of_density(density_of(0.3)) == doctest::Approx(0.3));
  CHECK(density_of(0.0) == 0.0);
}

TEST_CASE("pmf at lambda zero is a point mass") {
  CHECK(marginal_pmf(0, 0.0, 1.3) == 1.0);
  CHECK(marginal_pmf(3, 0.0, 1.3) == 0.0);
}

TEST_CASE("pmf for m = 2 is geometric") {
  CHECK(marginal_pmf(2, 0.5, 2.0) == doctest::Approx(0.125));
  for (int k = 0; k < 10; ++k) CHECK(marginal_pmf(k, 0.3, 2.0) == doctest::Approx(0.7 * std::pow(0.3, k)));
}

TEST_CASE("pmf agrees with the lgamma form") {
  for (double m : {0.3, 1.0, 2.5, 7.0})
    for (double lambda : {0.1, 0.5, 0.9})
      for (int k : {0, 1, 5, 40}) CHECK(marginal_pmf(k, lambda, m) == doctest::Approx(nb_pmf(k, lambda, m)).epsilon(1e-10));
}

TEST_CASE("pmf sums to one up to the certified truncation") {
  for (double m : {0.5, 2.0, 6.0})
    for (double lambda : {0.2, 0.7, 0.95}) {
      const std::int64_t cut = marginal_truncation(lambda, m, 1e-13);
      double sum = 0.0;
      for (std::int64_t k = 0; k <= cut; ++k) sum += marginal_pmf(k, lambda, m);
      CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("lambda outside [0,1) is a domain error") {
  CHECK_THROWS_AS(marginal_pmf(0, 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(marginal_pmf(0, -0.1, 2.0), DomainError);
  RandomStream s(1, 0);
  CHECK_THROWS_AS(sample_marginal(1.2, 2.0, s), DomainError);
  CHECK_THROWS_AS(validate_law(NuMixture{{{0.2, 0.5}, {0.6, 0.4}}}), DomainError);
}

TEST_CASE("sampled marginal has mean (m/2) rho") {
  RandomStream s(2, 0);
  std::vector<double> v(100000);
  for (auto& x : v) x = static_cast<double>(sample_marginal(0.4, 2.0, s));
  CHECK(testing::within_sigma(testing::iid_estimate(v), 2.0 / 3.0));
  for (int k = 0; k < 100; ++k) CHECK(sample_marginal(0.0, 2.0, s) == 0);
}

TEST_CASE("sampled marginal puts mass sqrt(1 - lambda) at zero for m = 1") {
  RandomStream s(3, 0);
  std::vector<double> v(100000);
  for (auto& x : v) x = sample_marginal(0.5, 1.0, s) == 0 ? 1.0 : 0.0;
  CHECK(testing::within_sigma(testing::iid_estimate(v), std::sqrt(0.5)));
}

TEST_CASE("poisson sampler has mean theta") {
  RandomStream s(4, 0);
  std::vector<double> v(100000);
  for (auto& x : v) x = static_cast<double>(sample_poisson(1.7, s));
  CHECK(testing::within_sigma(testing::iid_estimate(v), 1.7));
  CHECK(sample_poisson(0.0, s) == 0);
}

TEST_CASE("product sampling needs a finite torus") {
  RandomStream s(5, 0);
  CHECK(sample_product(NuLambda{0.0}, Geometry::torus(1, 5), 2.0, s).total() == 0);
  CHECK(sample_product(PoissonProduct{0.0}, Geometry::torus(2, 5), 2.0, s).total() == 0);
  CHECK_THROWS(sample_product(NuLambda{0.3}, Geometry::infinite(1), 2.0, s));
}

TEST_CASE("product samples are uncorrelated across sites") {
  const Geometry g = Geometry::torus(1, 4);
  const int reps = 50000;
  std::vector<double> a(reps), b(reps), ab(reps);
  for (int r = 0; r < reps; ++r) {
    RandomStream s = derive_stream(6, r);
    const Occupation eta = sample_product(NuLambda{0.5}, g, 1.5, s);
    a[r] = eta.at(Site{0});
    b[r] = eta.at(Site{1});
  }
  const auto ea = testing::iid_estimate(a), eb = testing::iid_estimate(b);
  for (int r = 0; r < reps; ++r) ab[r] = (a[r] - ea.mean) * (b[r] - eb.mean);
  CHECK(testing::within_sigma(testing::iid_estimate(ab), 0.0));
  // Both sites share the marginal mean (m/2) rho = 0.75.
  CHECK(testing::within_sigma(ea, 0.75));
  CHECK(testing::within_sigma(eb, 0.75));
}

TEST_CASE("mixture draws one lambda for the whole configuration") {
  // With atoms at 0 and 0.9, every sample is empty or typically crowded;
  // P(empty) is at least the weight of the zero atom.
  const Geometry g = Geometry::torus(1, 6);
  const int reps = 20000;
  std::vector<double> empty(reps);
  for (int r = 0; r < reps; ++r) {
    RandomStream s = derive_stream(7, r);
    empty[r] = sample_product(NuMixture{{{0.0, 0.5}, {0.9, 0.5}}}, g, 2.0, s).total() == 0;
  }
  const double exact = 0.5 + 0.5 * std::pow(0.1, 6);
  CHECK(testing::within_sigma(testing::iid_estimate(empty), exact));
}

TEST_CASE("detailed balance holds per edge") {
  CHECK(detailed_balance_ratio(1, 0, 0.3, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(detailed_balance_ratio(3, 2, 0.7, 1.5) - 1.0) < 1e-12);
  CHECK_THROWS_AS(detailed_balance_ratio(0, 2, 0.7, 1.5), PreconditionError);
  RandomStream s(8, 0);
  for (int k = 0; k < 200; ++k) {
    const auto a = 1 + static_cast<std::int64_t>(s.below(20));
    const auto b = static_cast<std::int64_t>(s.below(21));
    const double lambda = 0.95 * s.uniform(), m = 0.1 + 7.9 * s.uniform();
    CHECK(std::abs(detailed_balance_ratio(a, b, lambda, m) - 1.0) < 1e-12);
  }
}
