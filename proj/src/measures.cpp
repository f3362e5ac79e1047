#include "sipsim/measures.hpp"

#include <cmath>
#include <string>

namespace sipsim {

namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0))
    throw DomainError("lambda must lie in [0,1), got " + std::to_string(lambda));
}

void check_m(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("m must be positive");
}

// Poisson inversion starts from exp(-theta); beyond this the start underflows.
constexpr double kMaxTheta = 700.0;

double log_weight(std::int64_t k, double lambda, double m) {
  const double a = m / 2.0;
  return static_cast<double>(k) * std::log(lambda) + std::lgamma(a + k) - std::lgamma(a) -
         std::lgamma(static_cast<double>(k) + 1.0);
}

}  // namespace

void validate_law(const InitialLaw& law) {
  std::visit(
      [](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, NuLambda>) {
          check_lambda(l.lambda);
        } else if constexpr (std::is_same_v<T, PoissonProduct>) {
          if (!(l.theta >= 0.0 && l.theta <= kMaxTheta))
            throw DomainError("theta must lie in [0,700]");
        } else if constexpr (std::is_same_v<T, NuMixture>) {
          if (l.atoms.empty()) throw DomainError("mixture needs at least one atom");
          double total = 0.0;
          for (const auto& a : l.atoms) {
            check_lambda(a.lambda);
            if (!(a.weight >= 0.0)) throw DomainError("mixture weights must be nonnegative");
            total += a.weight;
          }
          if (std::abs(total - 1.0) > 1e-9) throw DomainError("mixture weights must sum to 1");
        }
      },
      law);
}

double density_of(double lambda) {
  check_lambda(lambda);
  return lambda / (1.0 - lambda);
}

double lambda_of_density(double rho) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw DomainError("density must be nonnegative");
  return rho / (1.0 + rho);
}

double marginal_pmf(std::int64_t k, double lambda, double m) {
  check_lambda(lambda);
  check_m(m);
  if (k < 0) return 0.0;
  if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(m / 2.0 * std::log1p(-lambda) + log_weight(k, lambda, m));
}

std::int64_t marginal_truncation(double lambda, double m, double tail) {
  check_lambda(lambda);
  check_m(m);
  if (lambda == 0.0) return 0;
  // pmf(j+1)/pmf(j) = lambda (m/2 + j)/(j+1) decreases toward lambda when
  // m/2 > 1 and increases toward it otherwise, so q below bounds every later
  // ratio and the mass above K is at most pmf(K+1)/(1-q).
  const double a = m / 2.0;
  for (std::int64_t k = 0;; ++k) {
    const double q = a > 1.0 ? lambda * (a + k + 1) / (k + 2) : lambda;
    if (q < 1.0 && marginal_pmf(k + 1, lambda, m) / (1.0 - q) < tail) return k;
  }
}

std::int64_t sample_marginal(double lambda, double m, RandomStream& stream) {
  check_lambda(lambda);
  check_m(m);
  if (lambda == 0.0) return 0;
  const double a = m / 2.0;
  const double u = stream.uniform();
  double p = std::exp(a * std::log1p(-lambda));
  double cdf = p;
  std::int64_t k = 0;
  while (u > cdf) {
    p *= lambda * (a + k) / (k + 1);
    ++k;
    cdf += p;
    if (p < 1e-300 && k > a) break;  // cdf stuck below u by rounding
  }
  return k;
}

std::int64_t sample_poisson(double theta, RandomStream& stream) {
  if (!(theta >= 0.0 && theta <= kMaxTheta)) throw DomainError("theta must lie in [0,700]");
  if (theta == 0.0) return 0;
  const double u = stream.uniform();
  double p = std::exp(-theta);
  double cdf = p;
  std::int64_t k = 0;
  while (u > cdf) {
    p *= theta / (k + 1);
    ++k;
    cdf += p;
    if (p < 1e-300 && k > theta) break;
  }
  return k;
}

Occupation sample_product(const InitialLaw& law, const Geometry& g, double m,
                          RandomStream& stream) {
  if (!g.is_torus()) throw DomainError("product sampling requires a finite torus");
  validate_law(law);
  check_m(m);
  if (const auto* det = std::get_if<Deterministic>(&law)) return det->eta;

  double lambda = 0.0;
  bool poisson = false;
  double theta = 0.0;
  if (const auto* nu = std::get_if<NuLambda>(&law)) {
    lambda = nu->lambda;
  } else if (const auto* pois = std::get_if<PoissonProduct>(&law)) {
    poisson = true;
    theta = pois->theta;
  } else {
    const auto& mix = std::get<NuMixture>(law);
    const double u = stream.uniform();
    double acc = 0.0;
    lambda = mix.atoms.back().lambda;
    for (const auto& atom : mix.atoms) {
      acc += atom.weight;
      if (u < acc) {
        lambda = atom.lambda;
        break;
      }
    }
  }

  Occupation eta;
  const std::int64_t volume = g.volume();
  for (std::int64_t s = 0; s < volume; ++s) {
    const std::int64_t k = poisson ? sample_poisson(theta, stream) : sample_marginal(lambda, m, stream);
    if (k > 0) eta.add(g.site_of_index(s), k);
  }
  return eta;
}

double detailed_balance_ratio(std::int64_t a, std::int64_t b, double lambda, double m) {
  if (a < 1) throw PreconditionError("detailed balance ratio needs a >= 1");
  if (b < 0) throw PreconditionError("occupation numbers must be nonnegative");
  check_lambda(lambda);
  check_m(m);
  if (lambda == 0.0) throw DomainError("lambda must be positive for a reversibility check");
  const double half = m / 2.0;
  // Flow eta -> eta^{x,y}: w(a) w(b) a (m/2 + b); reverse flow: w(a-1) w(b+1) (b+1) (m/2 + a-1).
  const double forward = log_weight(a, lambda, m) + log_weight(b, lambda, m) +
                         std::log(static_cast<double>(a)) + std::log(half + b);
  const double backward = log_weight(a - 1, lambda, m) + log_weight(b + 1, lambda, m) +
                          std::log(static_cast<double>(b + 1)) + std::log(half + a - 1);
  return std::exp(forward - backward);
}

}  // namespace sipsim
