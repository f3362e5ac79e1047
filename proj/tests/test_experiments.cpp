#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "sipsim/duality.hpp"
#include "sipsim/experiments.hpp"

using namespace sipsim;

namespace {

ExperimentConfig config(Study study, const std::string& body) {
  return parse_config("study = " + to_string(study) + "\n" + body, study);
}

std::vector<const ReportRow*> rows_with_prefix(const Report& rep, const std::string& prefix) {
  std::vector<const ReportRow*> out;
  for (const auto& r : rep.rows)
    if (r.statistic.rfind(prefix, 0) == 0) out.push_back(&r);
  return out;
}

}  // namespace

TEST_CASE("band rows use max(3 se, floor)") {
  Report rep;
  rep.band("a", {1.05, 0.02}, 1.0, 0.01);
  rep.band("b", {1.05, 0.01}, 1.0, 0.01);
  rep.band("c", {1.05, 0.0}, 1.0, 0.06);
  CHECK(rep.rows[0].tolerance == doctest::Approx(0.06));
  CHECK(rep.rows[0].pass);
  CHECK_FALSE(rep.rows[1].pass);
  CHECK(rep.rows[2].pass);
  CHECK_FALSE(rep.pass());
}

TEST_CASE("trend rows") {
  Report rep;
  rep.greater("g1", 0.5, 0.1, 0.0, 0.3);
  rep.greater("g2", 0.3, 0.1, 0.0, 0.3);
  rep.not_less("n1", 0.98, 0.01, 0.99, 0.0);
  rep.not_less("n2", 0.98, 0.01, 0.99, 0.02);
  CHECK(rep.find("g1")->pass);
  CHECK_FALSE(rep.find("g2")->pass);
  CHECK_FALSE(rep.find("n1")->pass);
  CHECK(rep.find("n2")->pass);
  CHECK(rep.find("missing") == nullptr);
}

TEST_CASE("csv and json layout") {
  Report rep;
  rep.study = "demo";
  rep.seed = 9;
  rep.version = "1.2.3";
  rep.wall_ms = 12.5;
  rep.info("x", {0.5, 0.1});
  rep.band("y", {1.0, 0.0}, 2.0, 0.5);
  const std::string csv = rep.csv();
  std::istringstream in(csv);
  std::string header, first, second, extra;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  CHECK_FALSE(static_cast<bool>(std::getline(in, extra)));
  CHECK(header == "study,statistic,estimate,stderr,target,tolerance,pass");
  CHECK(first == "demo,x:info,0.5,0.1,,,info");
  CHECK(second == "demo,y:band,1,0,2,0.5,false");
  const auto j = nlohmann::json::parse(rep.summary_json());
  CHECK(j["study"] == "demo");
  CHECK(j["seed"] == 9);
  CHECK(j["version"] == "1.2.3");
  CHECK(j["wall_ms"] == 12.5);
  CHECK(j["pass"] == false);
  CHECK(j["failed"].size() == 1);
  CHECK(j["failed"][0] == "y");
}

TEST_CASE("version string is recorded") {
  CHECK(version_string().rfind("1.0.0", 0) == 0);
  const Report rep = run_study(default_config(Study::Factorization));
  CHECK(rep.version == version_string());
  CHECK(rep.study == "factorization");
  CHECK(rep.wall_ms >= 0.0);
}

TEST_CASE("closed-form helpers") {
  CHECK(nu_site_moment(0, 0.4, 2.0) == doctest::Approx(1.0));
  for (double m : {0.5, 2.0, 5.0})
    for (int k = 1; k <= 4; ++k) CHECK(nu_site_moment(k, 0.3, m) == doctest::Approx(std::pow(0.3 / 0.7, k)).epsilon(1e-10));
  CHECK(density_constant(PoissonProduct{1.0}, 2.0) == doctest::Approx(1.0));
  CHECK(density_constant(PoissonProduct{1.5}, 4.0) == doctest::Approx(0.75));
  CHECK(density_constant(NuLambda{0.4}, 3.0) == doctest::Approx(2.0 / 3.0));
  CHECK(density_constant(NuMixture{{{0.3, 0.4}, {0.3, 0.6}}}, 2.0) == doctest::Approx(0.3 / 0.7));
  CHECK_THROWS_AS(density_constant(NuMixture{{{0.2, 0.5}, {0.6, 0.5}}}, 2.0), UnsupportedError);
  CHECK(convergence_target(NuMixture{{{0.2, 0.5}, {0.6, 0.5}}}, 2.0, 2) == doctest::Approx(1.15625));
  CHECK(convergence_target(PoissonProduct{1.0}, 2.0, 2) == doctest::Approx(1.0));
}

TEST_CASE("exact self-duality arm") {
  const Report rep = run_self_duality(config(Study::SelfDuality, "side = 5\nm = 2\nxi = 0;1\neta = 0;0;2\ntimes = 0,0.5,1,2\n"));
  CHECK(rep.pass());
  const auto gaps = rows_with_prefix(rep, "exact_gap");
  CHECK(gaps.size() == 4);
  for (const auto* r : gaps) CHECK(std::abs(r->estimate) <= 1e-8);
  // A dual particle on an empty site makes D vanish at t = 0.
  const ReportRow* left0 = rep.find("exact_left[t=0]");
  REQUIRE(left0);
  CHECK(left0->estimate == 0.0);
  const ReportRow* left2 = rep.find("exact_left[t=2]");
  REQUIRE(left2);
  CHECK(left2->estimate > 0.0);
}

TEST_CASE("stationarity at lambda zero is exactly zero") {
  const Report rep = run_stationarity(
      config(Study::Stationarity, "side = 5\nm = 2\nlambda = 0\nxi_sizes = 1,2\ntimes = 1\nreplicas = 200\n"));
  CHECK(rep.pass());
  for (const auto* r : rows_with_prefix(rep, "direct_moment")) CHECK(r->estimate == 0.0);
  for (const auto* r : rows_with_prefix(rep, "dual_moment")) CHECK(r->estimate == 0.0);
}

TEST_CASE("stationarity small run covers rho^n") {
  const Report rep = run_stationarity(
      config(Study::Stationarity, "side = 6\nm = 1\nlambda = 0.3\nxi_sizes = 1,2\ntimes = 0.5\nreplicas = 4000\n"));
  CHECK(rep.pass());
}

TEST_CASE("coupling of identical sets succeeds at once") {
  const Report rep = run_coupling_success(
      config(Study::Coupling, "m = 2\nx = 0;5\ny = 0;5\ntimes = 1,2\nreplicas = 100\nschedule_doublings = 1\n"));
  for (const auto* r : rows_with_prefix(rep, "success_probability")) CHECK(r->estimate == 1.0);
  const ReportRow* it = rep.find("iterated_success");
  REQUIRE(it);
  CHECK(it->estimate == 1.0);
  CHECK(it->pass);
}

TEST_CASE("single-particle distance profile is identically zero") {
  const Report rep = run_or_distance(config(Study::OrDistance, "m = 2\nx = 0\ntimes = 10,100\nreplicas = 100\n"));
  for (const auto* r : rows_with_prefix(rep, "mean_distance")) CHECK(r->estimate == 0.0);
}

TEST_CASE("convergence from the invariant law has no transient") {
  const Report rep = run_convergence(
      config(Study::Convergence, "m = 2\nlaw = nu\nlambda = 0.4\nxi = 0;1\ntimes = 1,10\nreplicas = 200\n"));
  CHECK(rep.pass());
  for (const auto* r : rows_with_prefix(rep, "dual_transform")) CHECK(r->estimate == doctest::Approx(4.0 / 9.0));
}

TEST_CASE("single dual walker reaches the density constant") {
  const Report rep = run_convergence(
      config(Study::Convergence, "m = 2\nlaw = poisson\ntheta = 0.7\nxi = 0\ntimes = 1,50\nreplicas = 300\n"));
  CHECK(rep.pass());
  CHECK(rep.find("dual_transform[t=50]")->estimate == doctest::Approx(0.7));
}

TEST_CASE("correlation inequality closed forms") {
  Report rep = run_correlation_inequality(config(Study::Correlation, "mixture = 0.2:0.5,0.6:0.5\nn = 2\nreplicas = 2000\n"));
  CHECK(rep.find("closed_lhs")->estimate == doctest::Approx(1.15625));
  CHECK(rep.find("closed_rhs")->estimate == doctest::Approx(0.765625));
  CHECK(rep.find("closed_gap")->pass);
  rep = run_correlation_inequality(config(Study::Correlation, "mixture = 0.3:1\nn = 3\nreplicas = 200\n"));
  CHECK(rep.find("closed_gap")->estimate == doctest::Approx(0.0));
  CHECK(rep.find("closed_gap")->pass);
  rep = run_correlation_inequality(config(Study::Correlation, "mixture = 0.2:0.5,0.6:0.5\nn = 1\nreplicas = 200\n"));
  CHECK(rep.find("closed_gap")->estimate == doctest::Approx(0.0));
}

TEST_CASE("factorization rows") {
  const Report rep = run_factorization(default_config(Study::Factorization));
  CHECK(rep.pass());
  const ReportRow* spread = rep.find("hat_mu_spread[n=2]");
  REQUIRE(spread);
  CHECK(spread->estimate <= 1e-10);
  const ReportRow* two = rep.find("hat_mu[n=2]");
  REQUIRE(two);
  CHECK(two->estimate == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
  const ReportRow* fact = rep.find("factorization[3=1+2]");
  REQUIRE(fact);
  CHECK(fact->estimate == doctest::Approx(std::pow(2.0 / 3.0, 3)).epsilon(1e-12));
  CHECK(std::abs(fact->estimate - fact->target) <= 1e-10);
}

TEST_CASE("oracle check without simulation") {
  const Report rep = run_oracle_check(config(Study::OracleCheck, "side = 5\nm = 2\nxi = 0;1\neta = 0;0;2\ntimes = 0.5,1\n"));
  CHECK(rep.pass());
  CHECK(rep.find("states")->estimate == 35.0);
  CHECK(rows_with_prefix(rep, "state_probability").empty());
}

TEST_CASE("reports do not depend on the worker count") {
  const std::vector<std::pair<Study, std::string>> cases{
      {Study::SelfDuality, "side = 5\nm = 2\nxi = 0;1\neta = 0;0;2\ntimes = 1\nmc_replicas = 300\nmc_side = 5\nmc_xi = 0;1\nmc_eta = 0;1;1\n"},
      {Study::Stationarity, "side = 6\nm = 2\nlambda = 0.4\nxi_sizes = 1,2\ntimes = 1\nreplicas = 300\n"},
      {Study::Coupling, "m = 2\nx = 0;4\ny = 1;7\ntimes = 10,40\nreplicas = 100\nschedule_start = 10\nschedule_doublings = 3\n"},
      {Study::OrDistance, "m = 2\nx = 0;1\ntimes = 10,40\nreplicas = 200\n"},
      {Study::Convergence, "m = 2\nlaw = poisson\ntheta = 1\nxi = 0;1\ntimes = 1,5\nreplicas = 300\n"},
      {Study::Correlation, "mixture = 0.2:0.5,0.6:0.5\nn = 2\nreplicas = 300\n"},
      {Study::OracleCheck, "side = 5\nm = 2\nxi = 0;1\neta = 0;0;2\ntimes = 1\nsim_replicas = 300\n"},
  };
  for (const auto& [study, body] : cases) {
    CAPTURE(to_string(study));
    const ExperimentConfig cfg = config(study, body);
    CHECK(run_study(cfg, 1).csv() == run_study(cfg, 4).csv());
  }
}

TEST_CASE("different seeds give different estimates") {
  ExperimentConfig cfg = config(Study::Convergence, "m = 2\nlaw = poisson\ntheta = 1\nxi = 0;1\ntimes = 1\nreplicas = 300\n");
  const std::string a = run_study(cfg).csv();
  cfg.seed = 2;
  CHECK(run_study(cfg).csv() != a);
}
