#ifndef SIPSIM_EXPERIMENTS_HPP
#define SIPSIM_EXPERIMENTS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sipsim/config.hpp"
#include "sipsim/stats.hpp"

namespace sipsim {

/// Version string recorded in every report.
std::string version_string();

/// How a row's pass flag is decided.
///   Band:    |estimate - target| <= tolerance
///   Greater: estimate - target > tolerance
///   NotLess: estimate >= target - tolerance
///   Info:    reported only, always passes
enum class Contract { Band, Greater, NotLess, Info };

std::string to_string(Contract contract);

struct ReportRow {
  std::string statistic;
  double estimate = 0.0;
  double std_error = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  Contract contract = Contract::Info;
  bool pass = true;
};

struct Report {
  std::string study;
  std::uint64_t seed = 0;
  std::string version;
  double wall_ms = 0.0;
  std::vector<ReportRow> rows;

  /// Band row with tolerance max(3 stderr, floor).
  void band(const std::string& name, const Estimate& e, double target, double floor);
  void greater(const std::string& name, double estimate, double std_error, double target,
               double tolerance);
  void not_less(const std::string& name, double estimate, double std_error, double target,
                double tolerance);
  void info(const std::string& name, const Estimate& e);
  void info(const std::string& name, const Estimate& e, double target);

  bool pass() const;
  const ReportRow* find(const std::string& statistic) const;

  /// Columns study,statistic,estimate,stderr,target,tolerance,pass. The
  /// statistic name carries the contract as a suffix (":band", ":gt", ":ge",
  /// ":info"); pass is "true", "false", or "info".
  void write_csv(std::ostream& os) const;
  std::string csv() const;
  /// {study, seed, version, wall_ms, pass, rows, failed}
  std::string summary_json() const;
};

Report run_self_duality(const ExperimentConfig& cfg, unsigned workers = 1);
Report run_stationarity(const ExperimentConfig& cfg, unsigned workers = 1);
Report run_coupling_success(const ExperimentConfig& cfg, unsigned workers = 1);
Report run_or_distance(const ExperimentConfig& cfg, unsigned workers = 1);
Report run_convergence(const ExperimentConfig& cfg, unsigned workers = 1);
Report run_correlation_inequality(const ExperimentConfig& cfg, unsigned workers = 1);
Report run_factorization(const ExperimentConfig& cfg, unsigned workers = 1);
Report run_oracle_check(const ExperimentConfig& cfg, unsigned workers = 1);

/// Dispatches on cfg.study and fills in the metadata.
Report run_study(const ExperimentConfig& cfg, unsigned workers = 1);

/// E[d(k, L)] for L ~ nu_lambda^m marginal, summed directly over the pmf with
/// a certified geometric tail bound.
double nu_site_moment(std::int64_t k, double lambda, double m);

/// Analytic density constant of a closed-form law (Poisson: 2 theta / m; nu_lambda:
/// lambda / (1 - lambda)); a mixture has no single constant and raises
/// UnsupportedError unless all atoms coincide.
double density_constant(const InitialLaw& law, double m);

/// Target of the dual convergence study for |xi| = n: rho^n for Poisson and
/// nu_lambda, and the invariant value sum_i w_i rho_i^n for a mixture.
double convergence_target(const InitialLaw& law, double m, std::int64_t n);

}  // namespace sipsim

#endif  // SIPSIM_EXPERIMENTS_HPP
