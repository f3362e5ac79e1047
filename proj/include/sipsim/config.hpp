#ifndef SIPSIM_CONFIG_HPP
#define SIPSIM_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sipsim/core.hpp"
#include "sipsim/dynamics.hpp"
#include "sipsim/measures.hpp"

namespace sipsim {

enum class Study {
  SelfDuality,
  Stationarity,
  Coupling,
  OrDistance,
  Convergence,
  Correlation,
  Factorization,
  OracleCheck,
};

std::string to_string(Study study);
std::optional<Study> study_from_string(std::string_view name);
const std::vector<Study>& all_studies();

/// Configuration problem; `line()` is the 1-based line of the offending key,
/// or 0 when the problem is not tied to a line (e.g. a missing key).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line);
  int line() const { return line_; }

 private:
  int line_;
};

enum class LawKind { Poisson, Nu, Mixture };

struct ExperimentConfig {
  Study study = Study::OracleCheck;

  // Geometry and process.
  int d = 1;
  Boundary boundary = Boundary::Torus;
  Coord side = 5;
  double m = 2.0;

  // Laws.
  double lambda = 0.4;
  double theta = 1.0;
  LawKind law = LawKind::Poisson;
  std::vector<MixtureAtom> mixture;

  // Configurations (sites, repeated for multiple occupancy).
  ParticleList xi;
  ParticleList eta;
  ParticleList x;
  ParticleList y;
  ParticleList compare_x;
  std::vector<int> xi_sizes;
  int n = 2;

  // Time grid and sampling.
  std::vector<double> times;
  std::size_t replicas = 1000;
  std::uint64_t seed = 1;

  // Coupling.
  double delta = 0.5;
  double schedule_start = 100.0;
  int schedule_doublings = 16;
  bool optimal_matching = false;
  int compare_dimension = 0;

  // Self-duality Monte Carlo arm.
  std::size_t mc_replicas = 0;
  Coord mc_side = 7;
  ParticleList mc_xi;
  ParticleList mc_eta;
  double mc_time = 1.0;

  // Factorization.
  int split_first = 1;
  int split_second = 2;
  std::vector<double> cesaro_horizons;
  int cesaro_xi_size = 2;

  // Oracle check.
  std::size_t sim_replicas = 0;
  double sim_time = 1.0;
  bool dump_generator = false;

  Geometry geometry() const;
  Geometry geometry(Coord side_override) const;
  SipParams params() const;
  InitialLaw initial_law() const;
};

/// Parses flat `key = value` text ('#' starts a comment). When the text has no
/// `study` key, `study` supplies it; when both are present they must agree.
/// Keys belonging to other studies are rejected like unknown keys.
ExperimentConfig parse_config(std::string_view text, std::optional<Study> study = std::nullopt);

/// Built-in configuration text for a study.
std::string default_config_text(Study study);
ExperimentConfig default_config(Study study);

/// Site lists are written as `a,b;c,d` (sites separated by ';', coordinates by ',').
ParticleList parse_sites(std::string_view text, int dim);

}  // namespace sipsim

#endif  // SIPSIM_CONFIG_HPP
