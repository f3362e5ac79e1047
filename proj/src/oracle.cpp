#include "sipsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "sipsim/duality.hpp"

namespace sipsim {

std::uint64_t StateSpace::count(std::int64_t particles, std::int64_t volume) {
  // C(V+n-1, n) computed incrementally; every partial product is itself a
  // binomial coefficient, so the division is exact.
  const auto sat = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t c = 1;
  for (std::int64_t k = 1; k <= particles; ++k) {
    const auto num = static_cast<std::uint64_t>(volume - 1 + k);
    if (c > sat / num) return sat;
    c = c * num / static_cast<std::uint64_t>(k);
  }
  return c;
}

std::size_t StateSpace::KeyHash::operator()(const std::vector<std::int32_t>& v) const {
  std::uint64_t h = 1469598103934665603ull;
  for (auto c : v) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(c));
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

StateSpace::StateSpace(std::int64_t particles, const Geometry& g, std::size_t cap)
    : particles_(particles), geometry_(g), volume_(g.volume()) {
  if (particles < 0) throw DomainError("particle number must be nonnegative");
  const std::uint64_t total = count(particles, volume_);
  if (total > cap)
    throw CapExceededError("state space of " + std::to_string(total) + " states exceeds cap " +
                           std::to_string(cap));
  size_ = static_cast<std::size_t>(total);
  counts_.reserve(size_ * volume_);
  index_.reserve(size_);

  std::vector<std::int32_t> c(volume_, 0);
  // Fix sites from the most significant (last) downward; site 0 takes the rest.
  auto recurse = [&](auto&& self, std::int64_t pos, std::int64_t remaining) -> void {
    if (pos == 0) {
      c[0] = static_cast<std::int32_t>(remaining);
      index_.emplace(c, counts_.size() / volume_);
      counts_.insert(counts_.end(), c.begin(), c.end());
      return;
    }
    for (std::int64_t k = 0; k <= remaining; ++k) {
      c[pos] = static_cast<std::int32_t>(k);
      self(self, pos - 1, remaining - k);
    }
    c[pos] = 0;
  };
  recurse(recurse, volume_ - 1, particles);
}

Occupation StateSpace::occupation(std::size_t state) const {
  Occupation eta;
  auto c = counts(state);
  for (std::int64_t s = 0; s < volume_; ++s)
    if (c[s] > 0) eta.add(geometry_.site_of_index(s), c[s]);
  return eta;
}

std::size_t StateSpace::index_of(std::span<const std::int32_t> counts) const {
  auto it = index_.find(std::vector<std::int32_t>(counts.begin(), counts.end()));
  if (it == index_.end()) throw DomainError("configuration is not in this state space");
  return it->second;
}

std::size_t StateSpace::index_of(const Occupation& eta) const {
  std::vector<std::int32_t> c(volume_, 0);
  for (const auto& [site, k] : eta.counts()) c[geometry_.linear_index(site)] += static_cast<std::int32_t>(k);
  return index_of(c);
}

std::size_t StateSpace::index_of(const ParticleList& xi) const {
  std::vector<std::int32_t> c(volume_, 0);
  for (std::size_t i = 0; i < xi.size(); ++i) ++c[geometry_.linear_index(xi.position(i))];
  return index_of(c);
}

GeneratorMatrix build_generator(const StateSpace& space, const SipParams& params) {
  params.validate();
  const Geometry& g = space.geometry();
  if (!(g == params.geometry)) throw DomainError("state space and parameters disagree on geometry");
  const double p = g.kernel();
  const double half = params.m / 2.0;
  const std::int64_t volume = space.volume();

  // Neighbor table by linear site index.
  std::vector<std::int64_t> nbr(volume * g.degree());
  for (std::int64_t s = 0; s < volume; ++s) {
    const Site x = g.site_of_index(s);
    const auto ys = neighbors(x, g);
    for (std::size_t k = 0; k < ys.size(); ++k) nbr[s * g.degree() + k] = g.linear_index(ys[k]);
  }

  GeneratorMatrix q;
  q.row_offsets_.reserve(space.size() + 1);
  q.row_offsets_.push_back(0);
  q.diagonal_.assign(space.size(), 0.0);
  std::vector<std::int32_t> c(volume);
  std::vector<std::pair<std::size_t, double>> row;
  for (std::size_t state = 0; state < space.size(); ++state) {
    auto cur = space.counts(state);
    std::copy(cur.begin(), cur.end(), c.begin());
    row.clear();
    for (std::int64_t x = 0; x < volume; ++x) {
      if (c[x] == 0) continue;
      for (std::size_t k = 0; k < g.degree(); ++k) {
        const std::int64_t y = nbr[x * g.degree() + k];
        const double rate = p * c[x] * (half + (params.inclusion ? c[y] : 0));
        --c[x];
        ++c[y];
        row.emplace_back(space.index_of(c), rate);
        ++c[x];
        --c[y];
      }
    }
    std::sort(row.begin(), row.end());
    double exit = 0.0;
    for (std::size_t r = 0; r < row.size();) {
      std::size_t col = row[r].first;
      double v = 0.0;
      while (r < row.size() && row[r].first == col) v += row[r++].second;
      q.columns_.push_back(col);
      q.values_.push_back(v);
      exit += v;
    }
    q.diagonal_[state] = -exit;
    q.row_offsets_.push_back(q.columns_.size());
  }
  return q;
}

double GeneratorMatrix::rate(std::size_t i, std::size_t j) const {
  if (i == j) return diagonal_[i];
  for (std::size_t r = row_offsets_[i]; r < row_offsets_[i + 1]; ++r)
    if (columns_[r] == j) return values_[r];
  return 0.0;
}

double GeneratorMatrix::max_exit_rate() const {
  double m = 0.0;
  for (double d : diagonal_) m = std::max(m, -d);
  return m;
}

double GeneratorMatrix::max_row_sum_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    double s = diagonal_[i];
    for (std::size_t r = row_offsets_[i]; r < row_offsets_[i + 1]; ++r) s += values_[r];
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

void GeneratorMatrix::apply(std::span<const double> f, std::span<double> out) const {
  for (std::size_t i = 0; i < size(); ++i) {
    double s = diagonal_[i] * f[i];
    for (std::size_t r = row_offsets_[i]; r < row_offsets_[i + 1]; ++r) s += values_[r] * f[columns_[r]];
    out[i] = s;
  }
}

void GeneratorMatrix::apply_left(std::span<const double> mu, std::span<double> out) const {
  for (std::size_t i = 0; i < size(); ++i) out[i] = diagonal_[i] * mu[i];
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t r = row_offsets_[i]; r < row_offsets_[i + 1]; ++r) out[columns_[r]] += mu[i] * values_[r];
}

void GeneratorMatrix::write_triplets(std::ostream& os) const {
  os.precision(17);
  for (std::size_t i = 0; i < size(); ++i) {
    bool diag_written = false;
    for (std::size_t r = row_offsets_[i]; r < row_offsets_[i + 1]; ++r) {
      if (!diag_written && columns_[r] > i) {
        os << i << ' ' << i << ' ' << diagonal_[i] << '\n';
        diag_written = true;
      }
      os << i << ' ' << columns_[r] << ' ' << values_[r] << '\n';
    }
    if (!diag_written) os << i << ' ' << i << ' ' << diagonal_[i] << '\n';
  }
}

namespace {

template <typename Step>
std::vector<double> uniformize(const GeneratorMatrix& q, double t, std::span<const double> v0,
                               Step&& apply) {
  if (!(t >= 0.0)) throw DomainError("time must be nonnegative");
  if (v0.size() != q.size()) throw DomainError("vector length does not match the state space");
  std::vector<double> result(v0.begin(), v0.end());
  const double lambda = q.max_exit_rate();
  if (t == 0.0 || lambda == 0.0) return result;

  const double a = lambda * t;
  std::vector<double> v(v0.begin(), v0.end());
  std::vector<double> qv(v.size());
  std::fill(result.begin(), result.end(), 0.0);
  double log_w = -a;
  for (std::int64_t k = 0;; ++k) {
    const double w = std::exp(log_w);
    if (w > 0.0)
      for (std::size_t i = 0; i < v.size(); ++i) result[i] += w * v[i];
    const double log_next = log_w + std::log(a) - std::log(static_cast<double>(k + 1));
    // Weights decrease geometrically past the mode; bound the remaining tail.
    const double ratio = a / static_cast<double>(k + 2);
    if (static_cast<double>(k) >= a && ratio < 1.0 &&
        std::exp(log_next) / (1.0 - ratio) < kUniformizationTail)
      break;
    // v <- P v = v + (Q v) / lambda
    apply(v, qv);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += qv[i] / lambda;
    log_w = log_next;
  }
  return result;
}

}  // namespace

std::vector<double> semigroup_apply(const GeneratorMatrix& q, double t, std::span<const double> f) {
  return uniformize(q, t, f, [&](std::span<const double> v, std::span<double> out) { q.apply(v, out); });
}

std::vector<double> transient_distribution(const GeneratorMatrix& q, double t,
                                           std::span<const double> mu) {
  return uniformize(q, t, mu,
                    [&](std::span<const double> v, std::span<double> out) { q.apply_left(v, out); });
}

std::vector<double> cesaro_average(const GeneratorMatrix& q, double horizon,
                                   std::span<const double> f) {
  if (!(horizon > 0.0)) throw DomainError("Cesaro horizon must be positive");
  if (f.size() != q.size()) throw DomainError("vector length does not match the state space");
  const double lambda = q.max_exit_rate();
  if (lambda == 0.0) return {f.begin(), f.end()};
  // int_0^T Pois(lambda t; k) dt = P(N >= k+1) / lambda with N ~ Pois(lambda T),
  // so the average is (1/(lambda T)) sum_k P(N >= k+1) P^k f.
  const double a = lambda * horizon;
  std::vector<double> weights;
  double log_w = -a;
  for (std::int64_t k = 0;; ++k) {
    weights.push_back(std::exp(log_w));
    const double log_next = log_w + std::log(a) - std::log(static_cast<double>(k + 1));
    const double ratio = a / static_cast<double>(k + 2);
    if (static_cast<double>(k) >= a && ratio < 1.0 &&
        std::exp(log_next) / (1.0 - ratio) < kUniformizationTail * 1e-4)
      break;
    log_w = log_next;
  }
  // survival[k] = P(N >= k+1), accumulated from the small end.
  std::vector<double> survival(weights.size(), 0.0);
  double acc = 0.0;
  for (std::size_t k = weights.size(); k-- > 0;) {
    survival[k] = acc;
    acc += weights[k];
  }
  std::vector<double> v(f.begin(), f.end()), qv(v.size()), result(v.size(), 0.0);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    for (std::size_t i = 0; i < v.size(); ++i) result[i] += survival[k] * v[i];
    q.apply(v, qv);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += qv[i] / lambda;
  }
  for (auto& r : result) r /= a;
  return result;
}

std::vector<double> cesaro_average_trapezoid(const GeneratorMatrix& q, double horizon,
                                             std::span<const double> f, double tol,
                                             std::size_t max_intervals) {
  if (!(horizon > 0.0)) throw DomainError("Cesaro horizon must be positive");
  auto trapezoid = [&](std::size_t intervals) {
    const double h = horizon / static_cast<double>(intervals);
    std::vector<double> cur(f.begin(), f.end());
    std::vector<double> acc(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) acc[i] = 0.5 * cur[i];
    for (std::size_t j = 1; j <= intervals; ++j) {
      cur = semigroup_apply(q, h, cur);
      const double weight = j == intervals ? 0.5 : 1.0;
      for (std::size_t i = 0; i < cur.size(); ++i) acc[i] += weight * cur[i];
    }
    for (auto& v : acc) v *= h / horizon;
    return acc;
  };
  std::size_t intervals = 16;
  std::vector<double> prev = trapezoid(intervals);
  while (intervals * 2 <= max_intervals) {
    intervals *= 2;
    std::vector<double> next = trapezoid(intervals);
    double diff = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) diff = std::max(diff, std::abs(next[i] - prev[i]));
    if (diff < tol) return next;
    prev = std::move(next);
  }
  throw Error("trapezoid quadrature did not reach the requested tolerance");
}

std::vector<double> stationary_distribution(const StateSpace& space, double m) {
  DualityEvaluator eval(m);
  std::vector<double> logw(space.size());
  for (std::size_t s = 0; s < space.size(); ++s) {
    double lw = 0.0;
    for (auto k : space.counts(s)) lw += eval.log_rising(k) - std::lgamma(k + 1.0);
    logw[s] = lw;
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double z = 0.0;
  for (auto& v : logw) z += (v = std::exp(v - top));
  for (auto& v : logw) v /= z;
  return logw;
}

std::pair<double, double> exact_dual_expectation(const ParticleList& xi, const Occupation& eta,
                                                 double t, const SipParams& params, std::size_t cap) {
  const Geometry& g = params.geometry;
  if (!g.is_torus()) throw DomainError("exact duality needs a torus");
  DualityEvaluator eval(params.m);
  const Occupation xi_occ = occupation_of(xi, g);

  const StateSpace eta_space(eta.total(), g, cap);
  const StateSpace xi_space(static_cast<std::int64_t>(xi.size()), g, cap);

  std::vector<double> f_eta(eta_space.size());
  for (std::size_t s = 0; s < eta_space.size(); ++s) f_eta[s] = eval.D(xi_occ, eta_space.occupation(s));
  const auto left = semigroup_apply(build_generator(eta_space, params), t, f_eta);

  std::vector<double> f_xi(xi_space.size());
  for (std::size_t s = 0; s < xi_space.size(); ++s) f_xi[s] = eval.D(xi_space.occupation(s), eta);
  const auto right = semigroup_apply(build_generator(xi_space, params), t, f_xi);

  return {left[eta_space.index_of(eta)], right[xi_space.index_of(xi_occ)]};
}

void write_generator(std::ostream& os, const StateSpace& space, const GeneratorMatrix& q) {
  os << "# states " << space.size() << " particles " << space.particles() << " sites "
     << space.volume() << '\n';
  for (std::size_t s = 0; s < space.size(); ++s) {
    os << "# state " << s << ':';
    for (auto k : space.counts(s)) os << ' ' << k;
    os << '\n';
  }
  os << "# row col rate\n";
  q.write_triplets(os);
}

}  // namespace sipsim
