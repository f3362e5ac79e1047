#include <doctest.h>

#include <string>

#include "sipsim/config.hpp"

using namespace sipsim;

namespace {

// Line number and message of the error raised by parsing `text`.
std::pair<int, std::string> error_of(const std::string& text, std::optional<Study> study = std::nullopt) {
  try {
    parse_config(text, study);
  } catch (const ConfigError& e) {
    return {e.line(), e.what()};
  }
  return {-1, ""};
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("study names round trip") {
  for (Study s : all_studies()) CHECK(study_from_string(to_string(s)) == s);
  CHECK(all_studies().size() == 8);
  CHECK(to_string(Study::OrDistance) == "or-distance");
  CHECK_FALSE(study_from_string("stationary").has_value());
}

TEST_CASE("minimal stationarity config gets defaults") {
  const auto cfg = parse_config("study = stationarity\nside = 6\nm = 2\nlambda = 0.3\nxi_sizes = 1,2\n");
  CHECK(cfg.study == Study::Stationarity);
  CHECK(cfg.d == 1);
  CHECK(cfg.delta == 0.5);
  CHECK(cfg.replicas == 1000);
  CHECK(cfg.side == 6);
  CHECK(cfg.lambda == 0.3);
  CHECK(cfg.xi_sizes == std::vector<int>{1, 2});
  CHECK_FALSE(cfg.times.empty());
}

TEST_CASE("comments, blank lines and the study argument") {
  const std::string text = "# a comment\n\n  side = 5  # trailing\nm = 1.5\nxi = 0;1\neta = 0;0;2\n";
  const auto cfg = parse_config(text, Study::OracleCheck);
  CHECK(cfg.study == Study::OracleCheck);
  CHECK(cfg.m == 1.5);
  CHECK(cfg.xi == ParticleList::line({0, 1}));
  CHECK(cfg.eta == ParticleList::line({0, 0, 2}));
}

TEST_CASE("lambda out of range names the key and line") {
  const auto [line, what] =
      error_of("study = stationarity\nside = 6\nm = 2\nlambda = 1.2\nxi_sizes = 1\n");
  CHECK(line == 4);
  CHECK(contains(what, "line 4"));
  CHECK(contains(what, "'lambda'"));
}

TEST_CASE("duplicate keys are rejected") {
  const auto [line, what] = error_of("study = stationarity\nside = 6\nm = 2\nlambda = 0.2\nm = 3\nxi_sizes = 1\n");
  CHECK(line == 5);
  CHECK(contains(what, "duplicate key 'm'"));
  CHECK(contains(what, "line 3"));
}

TEST_CASE("unknown and foreign keys are rejected") {
  auto [line, what] = error_of("study = stationarity\nside = 6\nm = 2\nlamda = 0.2\nxi_sizes = 1\n");
  CHECK(line == 4);
  CHECK(contains(what, "unknown key"));
  std::tie(line, what) = error_of("study = stationarity\nside = 6\nm = 2\nlambda = 0.2\nxi_sizes = 1\ndelta = 0.3\n");
  CHECK(line == 6);
  CHECK(contains(what, "not used by study"));
}

TEST_CASE("missing keys are reported without a line") {
  auto [line, what] = error_of("study = coupling\nm = 2\nx = 0;10\n");
  CHECK(line == 0);
  CHECK(contains(what, "missing required key 'y'"));
  std::tie(line, what) = error_of("side = 5\n");
  CHECK(contains(what, "'study'"));
}

TEST_CASE("study key must agree with the requested study") {
  const auto [line, what] = error_of("study = coupling\nm = 2\nx = 0\ny = 1\n", Study::OrDistance);
  CHECK(line == 1);
  CHECK(contains(what, "or-distance"));
  CHECK(error_of("study = bogus\n").first == 1);
}

TEST_CASE("malformed lines and values") {
  CHECK(error_of("study = stationarity\nside 6\n").first == 2);
  CHECK(error_of("study = stationarity\n= 6\n").first == 2);
  CHECK(error_of("study = stationarity\nside = 6\nm = \nlambda = 0.2\nxi_sizes = 1\n").first == 3);
  CHECK(error_of("study = stationarity\nside = six\nm = 2\nlambda = 0.2\nxi_sizes = 1\n").first == 2);
  CHECK(error_of("study = stationarity\nside = 6\nm = -1\nlambda = 0.2\nxi_sizes = 1\n").first == 3);
  CHECK(error_of("study = coupling\nm = 2\nx = 0;10\ny = 3;17\ndelta = 1\n").first == 5);
  CHECK(error_of("study = coupling\nm = 2\nx = 0;1,2\ny = 3;17\n").first == 3);
}

TEST_CASE("cross-key validation") {
  // Sites must lie on the torus.
  CHECK(error_of("study = oracle-check\nside = 5\nm = 2\nxi = 0;5\neta = 0\n").first > 0);
  // Coupling sets need equal sizes.
  CHECK(error_of("study = coupling\nm = 2\nx = 0;10\ny = 3\n").first >= 0);
  // Stationarity needs a torus.
  CHECK(error_of("study = stationarity\nboundary = infinite\nside = 6\nm = 2\nlambda = 0.2\nxi_sizes = 1\n").first >= 0);
  // Mixture only with law = mixture.
  CHECK(error_of("study = convergence\nm = 2\nlaw = poisson\nxi = 0;1\nmixture = 0.2:1\n").first >= 0);
}

TEST_CASE("site and mixture syntax") {
  const auto cfg = parse_config("study = coupling\nd = 2\nm = 2\nx = 0,0;4,-2\ny = 1,1;5,5\n");
  CHECK(cfg.x == ParticleList::from_sites({{0, 0}, {4, -2}}, 2));
  CHECK(parse_sites("", 1).empty());
  CHECK(parse_sites("3; 4 ;-1", 1) == ParticleList::line({3, 4, -1}));
  CHECK_THROWS(parse_sites("1,2", 1));
  const auto mix = parse_config("study = correlation\nmixture = 0.2:0.5,0.6:0.5\nn = 3\n");
  REQUIRE(mix.mixture.size() == 2);
  CHECK(mix.mixture[1].lambda == 0.6);
  CHECK(mix.mixture[1].weight == 0.5);
  CHECK(mix.n == 3);
  CHECK(error_of("study = correlation\nmixture = 0.2:0.5,0.6:0.4\nn = 2\n").first == 2);
}

TEST_CASE("booleans") {
  for (const char* yes : {"true", "1", "yes"}) {
    const auto cfg = parse_config(std::string("study = coupling\nm = 2\nx = 0\ny = 4\noptimal_matching = ") + yes + "\n");
    CHECK(cfg.optimal_matching);
  }
  CHECK(error_of("study = coupling\nm = 2\nx = 0\ny = 4\noptimal_matching = maybe\n").first == 5);
}

TEST_CASE("every built-in config parses") {
  for (Study s : all_studies()) {
    const ExperimentConfig cfg = default_config(s);
    CHECK(cfg.study == s);
    CHECK_NOTHROW(parse_config(default_config_text(s), s));
  }
  const auto duality = default_config(Study::SelfDuality);
  CHECK(duality.times == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(duality.mc_replicas == 100000);
  const auto coupling = default_config(Study::Coupling);
  CHECK(coupling.boundary == Boundary::Infinite);
  CHECK(coupling.replicas == 500);
}

TEST_CASE("initial law of a config") {
  auto cfg = parse_config("study = convergence\nm = 2\nlaw = poisson\ntheta = 1.5\nxi = 0;1\n");
  CHECK(std::get<PoissonProduct>(cfg.initial_law()).theta == 1.5);
  cfg = parse_config("study = convergence\nm = 2\nlaw = mixture\nmixture = 0.1:0.25,0.5:0.75\nxi = 0;1\n");
  CHECK(std::get<NuMixture>(cfg.initial_law()).atoms.size() == 2);
}
