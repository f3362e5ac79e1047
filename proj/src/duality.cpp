#include "sipsim/duality.hpp"

#include <cmath>
#include <limits>
#include <mutex>

namespace sipsim {

namespace {

// Below this many factors log(l!/(l-k)!) is summed term by term; above it the
// lgamma difference is accurate enough relative to the result.
constexpr std::int64_t kDirectFallingFactorial = 256;

double log_falling(std::int64_t l, std::int64_t k) {
  if (k <= kDirectFallingFactorial) {
    double s = 0.0;
    for (std::int64_t j = 0; j < k; ++j) s += std::log(static_cast<double>(l - j));
    return s;
  }
  return std::lgamma(static_cast<double>(l) + 1.0) - std::lgamma(static_cast<double>(l - k) + 1.0);
}

template <typename Visit>
double product_over_sites(const Occupation& xi, const Occupation& eta, Visit&& factor) {
  double log_total = 0.0;
  for (const auto& [site, k] : xi.counts()) {
    const std::int64_t l = eta.at(site);
    if (k > l) return 0.0;
    log_total += factor(k, l);
  }
  return std::exp(log_total);
}

}  // namespace

DualityEvaluator::DualityEvaluator(double m) : m_(m), ladder_{0.0} {
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("m must be positive");
}

DualityEvaluator::DualityEvaluator(const DualityEvaluator& other) : m_(other.m_) {
  std::shared_lock lock(other.mutex_);
  ladder_ = other.ladder_;
}

double DualityEvaluator::log_rising(std::int64_t k) const {
  if (k < 0) throw DomainError("negative ladder index");
  {
    std::shared_lock lock(mutex_);
    if (static_cast<std::size_t>(k) < ladder_.size()) return ladder_[k];
  }
  std::unique_lock lock(mutex_);
  const double half = m_ / 2.0;
  while (ladder_.size() <= static_cast<std::size_t>(k)) {
    const auto j = static_cast<double>(ladder_.size() - 1);
    ladder_.push_back(ladder_.back() + std::log(half + j));
  }
  return ladder_[k];
}

double DualityEvaluator::d(std::int64_t k, std::int64_t l) const {
  if (k < 0 || l < 0) throw DomainError("occupation numbers must be nonnegative");
  if (k > l) return 0.0;
  if (k == 0) return 1.0;
  return std::exp(log_falling(l, k) - log_rising(k));
}

double DualityEvaluator::D(const Occupation& xi, const Occupation& eta) const {
  return product_over_sites(xi, eta, [this](std::int64_t k, std::int64_t l) {
    return log_falling(l, k) - log_rising(k);
  });
}

double DualityEvaluator::D(const ParticleList& xi, const Occupation& eta) const {
  return D(occupation_of(xi), eta);
}

double d_single(std::int64_t k, std::int64_t l, double m) { return DualityEvaluator(m).d(k, l); }

double duality_function(const ParticleList& xi, const Occupation& eta, double m) {
  return DualityEvaluator(m).D(xi, eta);
}

DTransform transform_of(const InitialLaw& law) {
  return std::visit([](const auto& l) -> DTransform { return l; }, law);
}

double closed_form_transform(const DTransform& law, const Occupation& xi, double m) {
  if (!(m > 0.0)) throw DomainError("m must be positive");
  const std::int64_t n = xi.total();
  return std::visit(
      [&](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, EmpiricalLaw>) {
          throw UnsupportedError("empirical laws have no closed-form transform");
        } else {
          validate_law(InitialLaw{l});
          if constexpr (std::is_same_v<T, NuLambda>) {
            return std::pow(density_of(l.lambda), static_cast<double>(n));
          } else if constexpr (std::is_same_v<T, PoissonProduct>) {
            // E[l!/(l-k)!] = theta^k for l ~ Poisson(theta).
            DualityEvaluator eval(m);
            double log_total = 0.0;
            for (const auto& [site, k] : xi.counts()) {
              if (l.theta == 0.0) return 0.0;
              log_total += static_cast<double>(k) * std::log(l.theta) - eval.log_rising(k);
            }
            return std::exp(log_total);
          } else if constexpr (std::is_same_v<T, Deterministic>) {
            return DualityEvaluator(m).D(xi, l.eta);
          } else {
            double s = 0.0;
            for (const auto& atom : l.atoms)
              s += atom.weight * std::pow(density_of(atom.lambda), static_cast<double>(n));
            return s;
          }
        }
      },
      law);
}

double closed_form_transform(const DTransform& law, const ParticleList& xi, double m) {
  return closed_form_transform(law, occupation_of(xi), m);
}

Estimate empirical_transform(const ParticleList& xi,
                             const std::function<Occupation(RandomStream&)>& sampler,
                             std::size_t replicas, RandomStream& stream, double m) {
  if (replicas < 2) throw InsufficientDataError("empirical transform needs at least two replicas");
  DualityEvaluator eval(m);
  const Occupation xi_occ = occupation_of(xi);
  std::vector<double> values(replicas);
  for (auto& v : values) v = eval.D(xi_occ, sampler(stream));
  return batch_mean(values);
}

double temperedness_bound(const DTransform& law, std::int64_t n, double m) {
  if (n < 0) throw DomainError("particle number must be nonnegative");
  if (!(m > 0.0)) throw DomainError("m must be positive");
  return std::visit(
      [&](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, EmpiricalLaw>) {
          throw UnsupportedError("temperedness bound is defined for closed forms only");
        } else {
          validate_law(InitialLaw{l});
          const auto nd = static_cast<double>(n);
          if constexpr (std::is_same_v<T, NuLambda>) {
            return std::pow(density_of(l.lambda), nd);
          } else if constexpr (std::is_same_v<T, PoissonProduct>) {
            // Each factor Gamma(m/2)/Gamma(m/2+k) <= (m/2)^{-k}, with equality
            // at k = 1, so spreading xi over distinct sites attains the sup.
            return std::pow(l.theta / (m / 2.0), nd);
          } else if constexpr (std::is_same_v<T, Deterministic>) {
            // Maximize prod_x d(k_x, eta(x)) over sum k_x = n by dynamic programming.
            DualityEvaluator eval(m);
            const double none = -std::numeric_limits<double>::infinity();
            std::vector<double> best(n + 1, none);
            best[0] = 0.0;
            for (const auto& [site, cap] : l.eta.counts()) {
              std::vector<double> next = best;
              for (std::int64_t used = 0; used <= n; ++used) {
                if (best[used] == none) continue;
                for (std::int64_t k = 1; k <= cap && used + k <= n; ++k) {
                  const double v = best[used] + std::log(eval.d(k, cap));
                  if (v > next[used + k]) next[used + k] = v;
                }
              }
              best = std::move(next);
            }
            return best[n] == none ? 0.0 : std::exp(best[n]);
          } else {
            double s = 0.0;
            for (const auto& atom : l.atoms) s += atom.weight * std::pow(density_of(atom.lambda), nd);
            return s;
          }
        }
      },
      law);
}

}  // namespace sipsim
