#ifndef SIPSIM_MEASURES_HPP
#define SIPSIM_MEASURES_HPP

#include <cstdint>
#include <variant>
#include <vector>

#include "sipsim/core.hpp"

namespace sipsim {

/// Largest lambda accepted from configuration files.
inline constexpr double kLambdaCap = 0.999;

/// Discrete Gamma (negative binomial) product measure nu_lambda^m.
struct NuLambda {
  double lambda = 0.0;
};

/// Independent Poisson(theta) occupation numbers.
struct PoissonProduct {
  double theta = 0.0;
};

struct Deterministic {
  Occupation eta;
};

struct MixtureAtom {
  double lambda = 0.0;
  double weight = 0.0;
};

/// Convex combination of nu_lambda measures (a single lambda draws the whole
/// configuration).
struct NuMixture {
  std::vector<MixtureAtom> atoms;
};

using InitialLaw = std::variant<NuLambda, PoissonProduct, Deterministic, NuMixture>;

/// Throws DomainError unless the law's parameters are in range.
void validate_law(const InitialLaw& law);

/// rho = lambda / (1 - lambda).
double density_of(double lambda);
/// lambda(rho) = rho / (1 + rho).
double lambda_of_density(double rho);

/// nu_lambda^m{eta(x) = k} = (1-lambda)^{m/2} lambda^k Gamma(m/2+k) / (k! Gamma(m/2)).
double marginal_pmf(std::int64_t k, double lambda, double m);

/// Smallest K with certified upper bound on the pmf mass above K below `tail`.
std::int64_t marginal_truncation(double lambda, double m, double tail);

/// Exact draw by sequential CDF inversion.
std::int64_t sample_marginal(double lambda, double m, RandomStream& stream);
std::int64_t sample_poisson(double theta, RandomStream& stream);

/// Independent per-site draws over all torus sites (sites scanned in linear order).
Occupation sample_product(const InitialLaw& law, const Geometry& g, double m,
                          RandomStream& stream);

/// Ratio of probability flows across the move a -> a-1, b -> b+1 between two
/// neighboring sites under nu_lambda^m. Equals 1 when the measure is reversible.
double detailed_balance_ratio(std::int64_t a, std::int64_t b, double lambda, double m);

}  // namespace sipsim

#endif  // SIPSIM_MEASURES_HPP
