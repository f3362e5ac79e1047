#ifndef SIPSIM_DUALITY_HPP
#define SIPSIM_DUALITY_HPP

#include <cstdint>
#include <functional>
#include <shared_mutex>
#include <variant>
#include <vector>

#include "sipsim/core.hpp"
#include "sipsim/measures.hpp"
#include "sipsim/stats.hpp"

namespace sipsim {

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Evaluates the self-duality polynomials of SIP(m)
///
///   D(xi, eta) = prod_x d(xi(x), eta(x)),
///   d(k, l)    = l!/(l-k)! * Gamma(m/2)/Gamma(m/2+k)   for k <= l, else 0.
///
/// Gamma ratios come from a memoized ladder of log rising factorials
/// log Gamma(m/2+k)/Gamma(m/2) = sum_{j<k} log(m/2+j), extended on demand.
/// Concurrent readers are safe: extension happens under an exclusive lock and
/// readers only ever observe a fully written prefix.
class DualityEvaluator {
 public:
  explicit DualityEvaluator(double m);
  DualityEvaluator(const DualityEvaluator& other);
  DualityEvaluator& operator=(const DualityEvaluator&) = delete;

  double m() const { return m_; }

  /// log Gamma(m/2+k)/Gamma(m/2).
  double log_rising(std::int64_t k) const;
  /// Gamma(m/2+k)/Gamma(m/2).
  double rising(std::int64_t k) const { return std::exp(log_rising(k)); }

  double d(std::int64_t k, std::int64_t l) const;
  double D(const ParticleList& xi, const Occupation& eta) const;
  double D(const Occupation& xi, const Occupation& eta) const;

 private:
  double m_;
  mutable std::shared_mutex mutex_;
  mutable std::vector<double> ladder_;
};

/// d(k,l) for a single site.
double d_single(std::int64_t k, std::int64_t l, double m);
/// D(xi, eta); xi given as labeled particles, identified with sum_i delta_{x_i}.
double duality_function(const ParticleList& xi, const Occupation& eta, double m);

/// Sampler handle plus replica budget for transforms known only by simulation.
struct EmpiricalLaw {
  std::function<Occupation(RandomStream&)> sampler;
  std::size_t replicas = 0;
};

/// A D-transform hat mu(xi) = integral of D(xi, .) d mu, in closed form when
/// the law is one of the product/mixture families.
using DTransform = std::variant<NuLambda, PoissonProduct, Deterministic, NuMixture, EmpiricalLaw>;

DTransform transform_of(const InitialLaw& law);

/// Exact transform value:
///   nu_lambda         -> rho^|xi|
///   Poisson(theta)    -> prod_x theta^{xi(x)} Gamma(m/2)/Gamma(m/2+xi(x))
///   point mass at eta -> D(xi, eta)
///   mixture           -> sum_i w_i rho_i^|xi|
double closed_form_transform(const DTransform& law, const Occupation& xi, double m);
double closed_form_transform(const DTransform& law, const ParticleList& xi, double m);

/// Sample mean and batch-means standard error of D(xi, eta) over sampled eta.
Estimate empirical_transform(const ParticleList& xi,
                             const std::function<Occupation(RandomStream&)>& sampler,
                             std::size_t replicas, RandomStream& stream, double m);

/// c_n = sup over |xi| = n of the closed-form transform. The Carleman
/// condition sum c_n^{-1/n} = infinity holds for every family here (c_n grows
/// at most geometrically) and is not checked at runtime.
double temperedness_bound(const DTransform& law, std::int64_t n, double m);

}  // namespace sipsim

#endif  // SIPSIM_DUALITY_HPP
