#include "sipsim/stats.hpp"

#include <algorithm>
#include <cmath>

namespace sipsim {

namespace {

Estimate from_batch_means(std::span<const double> means) {
  const double b = static_cast<double>(means.size());
  double sum = 0.0;
  for (double v : means) sum += v;
  const double mean = sum / b;
  double ss = 0.0;
  for (double v : means) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (b - 1.0) / b)};
}

}  // namespace

Estimate batch_stats(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw InsufficientDataError("batch statistics need at least two groups");
  std::vector<double> means;
  means.reserve(groups.size());
  for (const auto& g : groups) {
    if (g.empty()) throw InsufficientDataError("empty batch");
    double s = 0.0;
    for (double v : g) s += v;
    means.push_back(s / static_cast<double>(g.size()));
  }
  return from_batch_means(means);
}

Estimate batch_mean(std::span<const double> samples, std::size_t min_batches) {
  const std::size_t n = samples.size();
  if (n < 2) throw InsufficientDataError("need at least two samples");
  const auto root = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  const std::size_t batches = std::min(n, std::max(min_batches, root));
  std::vector<double> means(batches);
  double total = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t lo = b * n / batches;
    const std::size_t hi = (b + 1) * n / batches;
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += samples[k];
    total += s;
    means[b] = s / static_cast<double>(hi - lo);
  }
  Estimate e = from_batch_means(means);
  e.mean = total / static_cast<double>(n);
  return e;
}

double combined_error(const Estimate& a, const Estimate& b) {
  return std::hypot(a.std_error, b.std_error);
}

}  // namespace sipsim
