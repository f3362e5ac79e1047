#include "sipsim/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sipsim/coupling.hpp"
#include "sipsim/duality.hpp"
#include "sipsim/dynamics.hpp"
#include "sipsim/measures.hpp"
#include "sipsim/oracle.hpp"
#include "sipsim/parallel.hpp"

#ifndef SIPSIM_VERSION
#define SIPSIM_VERSION "0.0.0-unknown"
#endif

namespace sipsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string tag(const std::string& name, const std::string& value) { return name + "=" + value; }

Report make_report(const ExperimentConfig& cfg) {
  Report r;
  r.study = to_string(cfg.study);
  r.seed = cfg.seed;
  r.version = version_string();
  return r;
}

Estimate column_estimate(const std::vector<double>& column) {
  if (column.size() < 2) return {column.empty() ? 0.0 : column.front(), 0.0};
  return batch_mean(column);
}

template <typename Rows>
std::vector<double> column_of(const Rows& rows, std::size_t j) {
  std::vector<double> out(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) out[r] = rows[r][j];
  return out;
}

ParticleList particles_of(const Occupation& eta, int dim) {
  ParticleList out(dim);
  for (const auto& [site, k] : eta.counts())
    for (std::int64_t j = 0; j < k; ++j) out.push_back(site);
  return out;
}

// n particles on the first n sites of axis 0 (wrapping on a torus).
ParticleList consecutive_sites(int n, const Geometry& g) {
  ParticleList out(g.dim());
  for (int i = 0; i < n; ++i) {
    Site x(g.dim(), 0);
    x[0] = g.is_torus() ? i % g.side() : i;
    out.push_back(x);
  }
  return out;
}

// n particles on the first n sites in linear order (distinct when n <= volume).
ParticleList distinct_sites(int n, const Geometry& g) {
  ParticleList out(g.dim());
  for (int i = 0; i < n; ++i) out.push_back(g.site_of_index(i));
  return out;
}

ParticleList evolve(const ParticleList& xi, const SipParams& params, double dt, RandomStream& s) {
  if (dt <= 0.0 || xi.empty()) return xi;
  return simulate(xi, ProcessKind::Sip, params, dt, s, Record::Final).final_state();
}

std::string counts_label(std::span<const std::int32_t> counts) {
  std::string out;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    if (s > 0) out += '-';
    out += std::to_string(counts[s]);
  }
  return out;
}

// Smallest translate of a torus count vector, used as a translation-class key.
std::vector<std::int32_t> translation_key(std::span<const std::int32_t> counts, const Geometry& g) {
  const auto volume = g.volume();
  std::vector<std::int32_t> best(counts.begin(), counts.end()), shifted(volume);
  for (std::int64_t shift = 1; shift < volume; ++shift) {
    const Site offset = g.site_of_index(shift);
    for (std::int64_t s = 0; s < volume; ++s) {
      Site x = g.site_of_index(s);
      for (int k = 0; k < g.dim(); ++k) x[k] = g.wrap(x[k] + offset[k]);
      shifted[g.linear_index(x)] = counts[s];
    }
    if (shifted < best) best = shifted;
  }
  return best;
}

}  // namespace

std::string version_string() { return SIPSIM_VERSION; }

std::string to_string(Contract contract) {
  switch (contract) {
    case Contract::Band:
      return "band";
    case Contract::Greater:
      return "gt";
    case Contract::NotLess:
      return "ge";
    case Contract::Info:
      return "info";
  }
  return "info";
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

void Report::band(const std::string& name, const Estimate& e, double target, double floor) {
  const double tol = std::max(3.0 * e.std_error, floor);
  rows.push_back({name, e.mean, e.std_error, target, tol, Contract::Band,
                  std::abs(e.mean - target) <= tol});
}

void Report::greater(const std::string& name, double estimate, double std_error, double target,
                     double tolerance) {
  rows.push_back({name, estimate, std_error, target, tolerance, Contract::Greater,
                  estimate - target > tolerance});
}

void Report::not_less(const std::string& name, double estimate, double std_error, double target,
                      double tolerance) {
  rows.push_back({name, estimate, std_error, target, tolerance, Contract::NotLess,
                  estimate >= target - tolerance});
}

void Report::info(const std::string& name, const Estimate& e) { info(name, e, kNaN); }

void Report::info(const std::string& name, const Estimate& e, double target) {
  rows.push_back({name, e.mean, e.std_error, target, kNaN, Contract::Info, true});
}

bool Report::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

const ReportRow* Report::find(const std::string& statistic) const {
  for (const auto& r : rows)
    if (r.statistic == statistic) return &r;
  return nullptr;
}

void Report::write_csv(std::ostream& os) const {
  os << "study,statistic,estimate,stderr,target,tolerance,pass\n";
  for (const auto& r : rows) {
    os << study << ',' << r.statistic << ':' << to_string(r.contract) << ',' << num(r.estimate) << ','
       << num(r.std_error) << ',' << num(r.target) << ',' << num(r.tolerance) << ','
       << (r.contract == Contract::Info ? "info" : (r.pass ? "true" : "false")) << '\n';
  }
}

std::string Report::csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

std::string Report::summary_json() const {
  nlohmann::ordered_json j;
  j["study"] = study;
  j["seed"] = seed;
  j["version"] = version;
  j["wall_ms"] = wall_ms;
  j["pass"] = pass();
  j["rows"] = rows.size();
  auto failed = nlohmann::ordered_json::array();
  for (const auto& r : rows)
    if (!r.pass) failed.push_back(r.statistic);
  j["failed"] = failed;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

double nu_site_moment(std::int64_t k, double lambda, double m) {
  if (k < 0) throw DomainError("occupation number must be nonnegative");
  if (!(lambda >= 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in [0, 1)");
  if (!(m > 0.0)) throw DomainError("m must be positive");
  if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
  const double a = m / 2.0;
  DualityEvaluator eval(m);
  const double log_norm = a * std::log1p(-lambda) - std::lgamma(a);
  double sum = 0.0;
  for (std::int64_t l = k;; ++l) {
    const auto ld = static_cast<double>(l);
    const double log_pmf = log_norm + ld * std::log(lambda) + std::lgamma(a + ld) - std::lgamma(ld + 1.0);
    const double term = std::exp(log_pmf) * eval.d(k, l);
    sum += term;
    // term_{j+1}/term_j = lambda (a+j)/(j+1-k), monotone in j with limit lambda.
    const double ratio = lambda * (a + ld) / (ld + 1.0 - static_cast<double>(k));
    const double bound = std::max(ratio, lambda);
    if (l > k + 1 && bound < 1.0 && term * bound / (1.0 - bound) < 1e-17 * sum) break;
    if (l > k + 10'000'000) throw Error("site moment series did not converge");
  }
  return sum;
}

double density_constant(const InitialLaw& law, double m) {
  validate_law(law);
  if (const auto* p = std::get_if<PoissonProduct>(&law)) return p->theta / (m / 2.0);
  if (const auto* nu = std::get_if<NuLambda>(&law)) return density_of(nu->lambda);
  if (const auto* mix = std::get_if<NuMixture>(&law)) {
    const double first = mix->atoms.front().lambda;
    for (const auto& atom : mix->atoms)
      if (atom.lambda != first)
        throw UnsupportedError("a mixture of distinct nu_lambda has no single density constant");
    return density_of(first);
  }
  throw UnsupportedError("no density constant for a deterministic configuration");
}

double convergence_target(const InitialLaw& law, double m, std::int64_t n) {
  validate_law(law);
  if (const auto* mix = std::get_if<NuMixture>(&law)) {
    double s = 0.0;
    for (const auto& atom : mix->atoms) s += atom.weight * std::pow(density_of(atom.lambda), static_cast<double>(n));
    return s;
  }
  return std::pow(density_constant(law, m), static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Studies
// ---------------------------------------------------------------------------

Report run_self_duality(const ExperimentConfig& cfg, unsigned workers) {
  Report rep = make_report(cfg);
  const SipParams params = cfg.params();
  const Geometry& g = params.geometry;
  const Occupation eta = occupation_of(cfg.eta, g);
  for (double t : cfg.times) {
    const auto [left, right] = exact_dual_expectation(cfg.xi, eta, t, params);
    const std::string at = "[" + tag("t", num(t)) + "]";
    rep.info("exact_left" + at, {left, 0.0});
    rep.info("exact_right" + at, {right, 0.0});
    rep.band("exact_gap" + at, {left - right, 0.0}, 0.0, 1e-8);
  }
  if (cfg.mc_replicas == 0) return rep;

  SipParams mc = params;
  mc.geometry = cfg.geometry(cfg.mc_side);
  const Geometry& mg = mc.geometry;
  const Occupation mc_eta = occupation_of(cfg.mc_eta, mg);
  const Occupation mc_xi = occupation_of(cfg.mc_xi, mg);
  const DualityEvaluator eval(cfg.m);
  const auto samples = parallel_replicas(cfg.mc_replicas, workers, [&](std::size_t r) {
    RandomStream s = derive_stream(cfg.seed, r);
    const double left = eval.D(mc_xi, occupation_of(evolve(cfg.mc_eta, mc, cfg.mc_time, s), mg));
    const double right = eval.D(occupation_of(evolve(cfg.mc_xi, mc, cfg.mc_time, s), mg), mc_eta);
    return std::array<double, 2>{left, right};
  });
  const Estimate left = column_estimate(column_of(samples, 0));
  const Estimate right = column_estimate(column_of(samples, 1));
  const std::string at = "[" + tag("t", num(cfg.mc_time)) + "]";
  rep.info("mc_left" + at, left);
  rep.info("mc_right" + at, right);
  rep.band("mc_gap" + at, {left.mean - right.mean, combined_error(left, right)}, 0.0, 0.0);
  try {
    const auto [exact_left, exact_right] = exact_dual_expectation(cfg.mc_xi, mc_eta, cfg.mc_time, mc);
    rep.band("mc_left_vs_exact" + at, left, exact_left, 0.0);
    rep.band("mc_right_vs_exact" + at, right, exact_right, 0.0);
  } catch (const CapExceededError&) {
    // Too large for the exact reference; the two Monte Carlo sides still compare.
  }
  return rep;
}

Report run_stationarity(const ExperimentConfig& cfg, unsigned workers) {
  Report rep = make_report(cfg);
  const SipParams params = cfg.params();
  const Geometry& g = params.geometry;
  const InitialLaw law = NuLambda{cfg.lambda};
  const DTransform transform = NuLambda{cfg.lambda};
  const double rho = density_of(cfg.lambda);
  const DualityEvaluator eval(cfg.m);
  const std::size_t nt = cfg.times.size(), nx = cfg.xi_sizes.size();
  // Every translate of each xi; the direct arm averages over them, which keeps
  // the mean (the law is translation invariant) and lowers the variance.
  std::vector<std::vector<Occupation>> translates(nx);
  for (std::size_t j = 0; j < nx; ++j) {
    const ParticleList base = consecutive_sites(cfg.xi_sizes[j], g);
    for (std::int64_t shift = 0; shift < g.volume(); ++shift) {
      const Site offset = g.site_of_index(shift);
      ParticleList moved(g.dim());
      for (std::size_t i = 0; i < base.size(); ++i) {
        Site x = base.site(i);
        for (int k = 0; k < g.dim(); ++k) x[k] = g.wrap(x[k] + offset[k]);
        moved.push_back(x);
      }
      translates[j].push_back(occupation_of(moved, g));
    }
  }

  // Direct arm: eta ~ nu_lambda, all particles simulated.
  const auto direct = parallel_replicas(cfg.replicas, workers, [&](std::size_t r) {
    RandomStream s = derive_stream(cfg.seed, r);
    ParticleList state = particles_of(sample_product(law, g, cfg.m, s), g.dim());
    std::vector<double> values;
    values.reserve(nt * nx);
    double now = 0.0;
    for (double t : cfg.times) {
      state = evolve(state, params, t - now, s);
      now = t;
      const Occupation eta = occupation_of(state, g);
      for (const auto& family : translates) {
        double sum = 0.0;
        for (const auto& xi : family) sum += eval.D(xi, eta);
        values.push_back(sum / static_cast<double>(family.size()));
      }
    }
    return values;
  });

  // Dual arm: only the |xi| dual particles move; the closed form does the rest.
  const auto dual = parallel_replicas(cfg.replicas, workers, [&](std::size_t r) {
    RandomStream s = derive_stream(cfg.seed, cfg.replicas + r);
    std::vector<double> values(nt * nx);
    for (std::size_t j = 0; j < nx; ++j) {
      ParticleList state = consecutive_sites(cfg.xi_sizes[j], g);
      double now = 0.0;
      for (std::size_t i = 0; i < nt; ++i) {
        state = evolve(state, params, cfg.times[i] - now, s);
        now = cfg.times[i];
        values[i * nx + j] = closed_form_transform(transform, occupation_of(state, g), cfg.m);
      }
    }
    return values;
  });

  rep.info("density", {rho, 0.0});
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < nx; ++j) {
      const double target = std::pow(rho, cfg.xi_sizes[j]);
      const std::string at = "[" + tag("n", std::to_string(cfg.xi_sizes[j])) + " " + tag("t", num(cfg.times[i])) + "]";
      rep.band("direct_moment" + at, column_estimate(column_of(direct, i * nx + j)), target, 1e-12);
      rep.band("dual_moment" + at, column_estimate(column_of(dual, i * nx + j)), target, 1e-12);
    }
  }
  return rep;
}

Report run_coupling_success(const ExperimentConfig& cfg, unsigned workers) {
  Report rep = make_report(cfg);
  const SipParams params = cfg.params();
  const std::size_t R = cfg.replicas;
  TwoStageOptions options;
  options.delta = cfg.delta;
  options.optimal_matching = cfg.optimal_matching;

  auto attempt_batch = [&](const ParticleList& x, const ParticleList& y, const SipParams& p,
                           double horizon, std::uint64_t offset) {
    return parallel_replicas(R, workers, [&](std::size_t r) {
      RandomStream s = derive_stream(cfg.seed, offset + r);
      const CouplingOutcome o = two_stage_coupling(x, y, p, horizon, options, s);
      return std::array<double, 2>{o.kind == OutcomeKind::Coupled ? 1.0 : 0.0,
                                   o.kind == OutcomeKind::CollisionAbort ? 1.0 : 0.0};
    });
  };

  std::vector<std::vector<double>> success;
  for (std::size_t k = 0; k < cfg.times.size(); ++k) {
    const auto out = attempt_batch(cfg.x, cfg.y, params, cfg.times[k], k * R);
    success.push_back(column_of(out, 0));
    const std::string at = "[" + tag("t", num(cfg.times[k])) + "]";
    rep.info("success_probability" + at, column_estimate(success.back()));
    rep.info("collision_abort_rate" + at, column_estimate(column_of(out, 1)));
  }
  for (std::size_t k = 0; k + 1 < success.size(); ++k) {
    const Estimate a = column_estimate(success[k]), b = column_estimate(success[k + 1]);
    const double se = combined_error(a, b);
    rep.not_less("success_increment[" + num(cfg.times[k]) + "->" + num(cfg.times[k + 1]) + "]",
                 b.mean - a.mean, se, 0.0, 3.0 * se);
  }
  if (success.size() >= 2) {
    const Estimate a = column_estimate(success.front()), b = column_estimate(success.back());
    const double se = combined_error(a, b);
    rep.greater("success_gain[" + num(cfg.times.front()) + "->" + num(cfg.times.back()) + "]",
                b.mean - a.mean, se, 0.0, 3.0 * se);
  }

  // Iterated attempts over the doubling schedule.
  const std::vector<double> schedule = doubling_schedule(cfg.schedule_start, cfg.schedule_doublings);
  const std::uint64_t iter_offset = cfg.times.size() * R;
  const auto iterated = parallel_replicas(R, workers, [&](std::size_t r) {
    RandomStream s = derive_stream(cfg.seed, iter_offset + r);
    const CouplingOutcome o = iterated_coupling(cfg.x, cfg.y, params, schedule, options, s);
    return std::array<double, 3>{o.kind == OutcomeKind::Coupled ? 1.0 : 0.0,
                                 static_cast<double>(o.counts.attempts), o.time};
  });
  rep.info("iterated_attempts", column_estimate(column_of(iterated, 1)));
  rep.info("iterated_elapsed_time", column_estimate(column_of(iterated, 2)));
  const Estimate overall = column_estimate(column_of(iterated, 0));
  rep.not_less("iterated_success", overall.mean, overall.std_error, 0.99, 0.0);

  if (cfg.compare_dimension > 0) {
    const int dim = cfg.compare_dimension;
    auto lift = [&](const ParticleList& xi) {
      ParticleList out(dim);
      for (std::size_t i = 0; i < xi.size(); ++i) {
        Site x(dim, 0);
        for (int k = 0; k < std::min(dim, xi.dim()); ++k) x[k] = xi.coord(i, k);
        out.push_back(x);
      }
      return out;
    };
    SipParams p = params;
    p.geometry = cfg.boundary == Boundary::Torus ? Geometry::torus(dim, cfg.side) : Geometry::infinite(dim);
    const double horizon = cfg.times.back();
    const auto out = attempt_batch(lift(cfg.x), lift(cfg.y), p, horizon, iter_offset + R);
    const Estimate other = column_estimate(column_of(out, 0));
    const Estimate base = column_estimate(success.back());
    const std::string at = "[" + tag("d", std::to_string(dim)) + " " + tag("t", num(horizon)) + "]";
    rep.info("compare_success_probability" + at, other);
    rep.info("compare_success_difference" + at, {other.mean - base.mean, combined_error(other, base)});
  }
  return rep;
}

Report run_or_distance(const ExperimentConfig& cfg, unsigned workers) {
  Report rep = make_report(cfg);
  const SipParams params = cfg.params();
  const auto samples = sip_irw_distance_samples(cfg.x, params, cfg.times, cfg.replicas, cfg.seed, workers);
  const std::size_t nt = cfg.times.size();
  std::vector<std::vector<double>> normalized(nt, std::vector<double>(cfg.replicas));
  for (std::size_t r = 0; r < cfg.replicas; ++r)
    for (std::size_t i = 0; i < nt; ++i) normalized[i][r] = samples[r][i] / std::sqrt(cfg.times[i]);

  for (std::size_t i = 0; i < nt; ++i) {
    const std::string at = "[" + tag("t", num(cfg.times[i])) + "]";
    rep.info("mean_distance" + at, column_estimate(column_of(samples, i)));
    rep.info("normalized_distance" + at, column_estimate(normalized[i]));
  }
  // Differences are paired (same trajectories), so their errors come from
  // the per-replica differences.
  auto paired = [&](std::size_t a, std::size_t b) {
    std::vector<double> diff(cfg.replicas);
    for (std::size_t r = 0; r < cfg.replicas; ++r) diff[r] = normalized[a][r] - normalized[b][r];
    return column_estimate(diff);
  };
  for (std::size_t i = 0; i + 1 < nt; ++i) {
    const Estimate e = paired(i, i + 1);
    rep.greater("normalized_decrease[" + num(cfg.times[i]) + "->" + num(cfg.times[i + 1]) + "]", e.mean,
                e.std_error, 0.0, 0.0);
  }
  if (nt >= 2) {
    const Estimate e = paired(0, nt - 1);
    rep.greater("normalized_drop[" + num(cfg.times.front()) + "->" + num(cfg.times.back()) + "]", e.mean,
                e.std_error, 0.0, 3.0 * e.std_error);
  }

  if (!cfg.compare_x.empty()) {
    const double t = cfg.times.back();
    const std::vector<double> last{t};
    const auto other = sip_irw_distance_samples(cfg.compare_x, params, last, cfg.replicas,
                                                cfg.seed ^ 0x6a09e667f3bcc909ull, workers);
    const Estimate o = column_estimate(column_of(other, 0));
    const Estimate b = column_estimate(column_of(samples, nt - 1));
    const std::string at = "[" + tag("n", std::to_string(cfg.compare_x.size())) + " " + tag("t", num(t)) + "]";
    rep.info("compare_mean_distance" + at, o);
    rep.info("compare_distance_difference" + at, {o.mean - b.mean, combined_error(o, b)});
  }
  return rep;
}

Report run_convergence(const ExperimentConfig& cfg, unsigned workers) {
  Report rep = make_report(cfg);
  const SipParams params = cfg.params();
  const Geometry& g = params.geometry;
  const InitialLaw law = cfg.initial_law();
  validate_law(law);
  const DTransform transform = transform_of(law);
  const auto n = static_cast<std::int64_t>(cfg.xi.size());
  const double target = convergence_target(law, cfg.m, n);

  const auto samples = parallel_replicas(cfg.replicas, workers, [&](std::size_t r) {
    RandomStream s = derive_stream(cfg.seed, r);
    ParticleList state = cfg.xi;
    std::vector<double> values;
    double now = 0.0;
    for (double t : cfg.times) {
      state = evolve(state, params, t - now, s);
      now = t;
      values.push_back(closed_form_transform(transform, occupation_of(state, g), cfg.m));
    }
    return values;
  });

  rep.info("initial_transform", {closed_form_transform(transform, occupation_of(cfg.xi, g), cfg.m), 0.0},
           target);
  rep.info("limit_target", {target, 0.0});
  for (std::size_t i = 0; i < cfg.times.size(); ++i) {
    const Estimate e = column_estimate(column_of(samples, i));
    const std::string name = "dual_transform[" + tag("t", num(cfg.times[i])) + "]";
    if (i + 1 < cfg.times.size()) rep.info(name, e, target);
    else rep.band(name, e, target, 0.02 * target);
  }
  return rep;
}

Report run_correlation_inequality(const ExperimentConfig& cfg, unsigned workers) {
  Report rep = make_report(cfg);
  const Geometry g = cfg.geometry();
  const NuMixture mixture{cfg.mixture};
  validate_law(mixture);
  const double n = cfg.n;
  double lhs = 0.0, mean_rho = 0.0;
  std::set<double> distinct;
  for (const auto& atom : mixture.atoms) {
    const double rho = density_of(atom.lambda);
    lhs += atom.weight * std::pow(rho, n);
    mean_rho += atom.weight * rho;
    distinct.insert(atom.lambda);
  }
  const double rhs = std::pow(mean_rho, n);
  rep.info("closed_lhs", {lhs, 0.0});
  rep.info("closed_rhs", {rhs, 0.0});
  if (cfg.n >= 2 && distinct.size() >= 2) rep.greater("closed_gap", lhs - rhs, 0.0, 0.0, 0.0);
  else rep.band("closed_gap", {lhs - rhs, 0.0}, 0.0, 1e-12 * std::max(1.0, lhs));

  const Occupation xi = occupation_of(distinct_sites(cfg.n, g), g);
  const DualityEvaluator eval(cfg.m);
  const auto volume = static_cast<double>(g.volume());
  const auto samples = parallel_replicas(cfg.replicas, workers, [&](std::size_t r) {
    RandomStream s = derive_stream(cfg.seed, r);
    const Occupation eta = sample_product(mixture, g, cfg.m, s);
    // Single-site moment averaged over the torus; every site has the same mean.
    double single = 0.0;
    for (const auto& [site, k] : eta.counts()) single += eval.d(1, k);
    return std::array<double, 2>{eval.D(xi, eta), single / volume};
  });
  const Estimate joint = column_estimate(column_of(samples, 0));
  const Estimate single = column_estimate(column_of(samples, 1));
  // Delta method for the n-th power of the single-site mean.
  const Estimate product{std::pow(single.mean, n), n * std::pow(single.mean, n - 1.0) * single.std_error};
  rep.band("sampled_lhs", joint, lhs, 0.0);
  rep.band("sampled_rhs", product, rhs, 0.0);
  return rep;
}

Report run_factorization(const ExperimentConfig& cfg, unsigned workers) {
  (void)workers;
  Report rep = make_report(cfg);
  const SipParams params = cfg.params();
  const Geometry& g = params.geometry;
  const double rho = density_of(cfg.lambda);

  // Exact arm: hat mu(xi) = prod_x E[d(xi(x), L)] under nu_lambda.
  std::map<std::int64_t, double> moment;
  auto hat_mu = [&](std::span<const std::int32_t> counts) {
    double v = 1.0;
    for (auto k : counts) {
      if (k == 0) continue;
      auto it = moment.find(k);
      if (it == moment.end()) it = moment.emplace(k, nu_site_moment(k, cfg.lambda, cfg.m)).first;
      v *= it->second;
    }
    return v;
  };
  const int a = cfg.split_first, b = cfg.split_second;
  std::map<int, double> canonical;
  for (int size : std::set<int>{2, a, b, a + b}) {
    if (StateSpace::count(size, g.volume()) > kDefaultStateCap) continue;
    const StateSpace space(size, g);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t s = 0; s < space.size(); ++s) {
      const double v = hat_mu(space.counts(s));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    canonical[size] = hat_mu(space.counts(0));
    const std::string at = "[" + tag("n", std::to_string(size)) + "]";
    rep.band("hat_mu" + at, {canonical[size], 0.0}, std::pow(rho, size), 1e-10);
    rep.band("hat_mu_spread" + at, {hi - lo, 0.0}, 0.0, 1e-10);
  }
  if (canonical.count(a) && canonical.count(b) && canonical.count(a + b)) {
    rep.band("factorization[" + std::to_string(a + b) + "=" + std::to_string(a) + "+" + std::to_string(b) + "]",
             {canonical[a + b], 0.0}, canonical[a] * canonical[b], 1e-10);
  }

  // Dynamic arm: Cesaro averages of D(xi, .) from a fixed eta on its sector.
  const Occupation eta = occupation_of(cfg.eta, g);
  const StateSpace eta_space(eta.total(), g);
  const GeneratorMatrix q = build_generator(eta_space, params);
  const std::vector<double> pi = stationary_distribution(eta_space, cfg.m);
  const std::size_t start = eta_space.index_of(eta);
  const StateSpace xi_space(cfg.cesaro_xi_size, g);
  const DualityEvaluator eval(cfg.m);

  std::vector<std::vector<double>> f(xi_space.size(), std::vector<double>(eta_space.size()));
  std::vector<double> limit(xi_space.size(), 0.0);
  std::map<std::vector<std::int32_t>, std::vector<std::size_t>> classes;
  for (std::size_t j = 0; j < xi_space.size(); ++j) {
    const Occupation xi = xi_space.occupation(j);
    for (std::size_t s = 0; s < eta_space.size(); ++s) {
      f[j][s] = eval.D(xi, eta_space.occupation(s));
      limit[j] += pi[s] * f[j][s];
    }
    classes[translation_key(xi_space.counts(j), g)].push_back(j);
  }
  auto class_spread = [&](const std::vector<double>& v) {
    double worst = 0.0;
    for (const auto& [key, members] : classes) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (auto j : members) {
        lo = std::min(lo, v[j]);
        hi = std::max(hi, v[j]);
      }
      worst = std::max(worst, hi - lo);
    }
    return worst;
  };
  rep.band("limit_translation_spread", {class_spread(limit), 0.0}, 0.0, 1e-12);
  for (const auto& [key, members] : classes) {
    const auto j = members.front();
    rep.info("limit[" + counts_label(xi_space.counts(j)) + "]", {limit[j], 0.0});
  }

  std::vector<double> gaps, spreads, previous;
  for (double T : cfg.cesaro_horizons) {
    std::vector<double> value(xi_space.size());
    double gap = 0.0, delta = 0.0;
    for (std::size_t j = 0; j < xi_space.size(); ++j) {
      value[j] = cesaro_average(q, T, f[j])[start];
      gap = std::max(gap, std::abs(value[j] - limit[j]));
      if (!previous.empty()) delta = std::max(delta, std::abs(value[j] - previous[j]));
    }
    const std::string at = "[" + tag("T", num(T)) + "]";
    gaps.push_back(gap);
    spreads.push_back(class_spread(value));
    rep.info("cesaro_gap" + at, {gap, 0.0});
    rep.info("translation_spread" + at, {spreads.back(), 0.0});
    if (!previous.empty()) rep.info("doubling_delta" + at, {delta, 0.0});
    previous = std::move(value);
  }
  if (gaps.size() >= 2) {
    rep.greater("cesaro_gap_drop", gaps.front() - gaps.back(), 0.0, 0.0, 0.0);
    if (spreads.front() > 0.0)
      rep.greater("translation_spread_drop", spreads.front() - spreads.back(), 0.0, 0.0, 0.0);
  }
  return rep;
}

Report run_oracle_check(const ExperimentConfig& cfg, unsigned workers) {
  Report rep = make_report(cfg);
  const SipParams params = cfg.params();
  const Geometry& g = params.geometry;
  const Occupation eta = occupation_of(cfg.eta, g);

  for (double t : cfg.times) {
    const auto [left, right] = exact_dual_expectation(cfg.xi, eta, t, params);
    rep.band("self_duality_gap[" + tag("t", num(t)) + "]", {left - right, 0.0}, 0.0, 1e-8);
  }

  const StateSpace space(eta.total(), g);
  const GeneratorMatrix q = build_generator(space, params);
  rep.info("states", {static_cast<double>(space.size()), 0.0});
  rep.band("row_sum_error", {q.max_row_sum_error(), 0.0}, 0.0, 1e-12);

  const std::vector<double> pi = stationary_distribution(space, cfg.m);
  std::vector<double> flow(space.size());
  q.apply_left(pi, flow);
  double worst_flow = 0.0;
  for (double v : flow) worst_flow = std::max(worst_flow, std::abs(v));
  rep.band("stationary_residual", {worst_flow, 0.0}, 0.0, 1e-12);

  double worst_balance = 0.0;
  const auto offsets = q.row_offsets();
  const auto cols = q.columns();
  const auto vals = q.values();
  for (std::size_t i = 0; i < space.size(); ++i)
    for (std::size_t r = offsets[i]; r < offsets[i + 1]; ++r)
      worst_balance = std::max(worst_balance, std::abs(pi[i] * vals[r] - pi[cols[r]] * q.rate(cols[r], i)));
  rep.band("detailed_balance_residual", {worst_balance, 0.0}, 0.0, 1e-12);

  const double t_last = cfg.times.back();
  const std::vector<double> ones(space.size(), 1.0);
  double worst_const = 0.0;
  for (double v : semigroup_apply(q, t_last, ones)) worst_const = std::max(worst_const, std::abs(v - 1.0));
  rep.band("constant_preservation[" + tag("t", num(t_last)) + "]", {worst_const, 0.0}, 0.0, 1e-11);

  std::vector<double> point(space.size(), 0.0);
  point[space.index_of(eta)] = 1.0;
  const auto law = transient_distribution(q, t_last, point);
  rep.not_less("min_transient_probability[" + tag("t", num(t_last)) + "]",
               *std::min_element(law.begin(), law.end()), 0.0, 0.0, 1e-15);

  if (cfg.sim_replicas > 0) {
    const StateSpace sim_space(static_cast<std::int64_t>(cfg.xi.size()), g);
    const GeneratorMatrix sim_q = build_generator(sim_space, params);
    std::vector<double> start(sim_space.size(), 0.0);
    start[sim_space.index_of(cfg.xi)] = 1.0;
    const auto exact = transient_distribution(sim_q, cfg.sim_time, start);
    const auto finals = parallel_replicas(cfg.sim_replicas, workers, [&](std::size_t r) {
      RandomStream s = derive_stream(cfg.seed, r);
      return sim_space.index_of(evolve(cfg.xi, params, cfg.sim_time, s));
    });
    const auto N = static_cast<double>(cfg.sim_replicas);
    std::vector<double> indicator(cfg.sim_replicas);
    for (std::size_t k = 0; k < sim_space.size(); ++k) {
      for (std::size_t r = 0; r < finals.size(); ++r) indicator[r] = finals[r] == k ? 1.0 : 0.0;
      const Estimate e = column_estimate(indicator);
      // The null-hypothesis binomial error keeps rare states from passing or
      // failing on an empirical error of zero.
      const double null_se = std::sqrt(std::max(exact[k] * (1.0 - exact[k]), 0.0) / N);
      rep.band("state_probability[" + counts_label(sim_space.counts(k)) + "]", e, exact[k], 3.0 * null_se);
    }
  }
  return rep;
}

Report run_study(const ExperimentConfig& cfg, unsigned workers) {
  const auto t0 = std::chrono::steady_clock::now();
  Report rep;
  switch (cfg.study) {
    case Study::SelfDuality:
      rep = run_self_duality(cfg, workers);
      break;
    case Study::Stationarity:
      rep = run_stationarity(cfg, workers);
      break;
    case Study::Coupling:
      rep = run_coupling_success(cfg, workers);
      break;
    case Study::OrDistance:
      rep = run_or_distance(cfg, workers);
      break;
    case Study::Convergence:
      rep = run_convergence(cfg, workers);
      break;
    case Study::Correlation:
      rep = run_correlation_inequality(cfg, workers);
      break;
    case Study::Factorization:
      rep = run_factorization(cfg, workers);
      break;
    case Study::OracleCheck:
      rep = run_oracle_check(cfg, workers);
      break;
  }
  rep.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace sipsim
