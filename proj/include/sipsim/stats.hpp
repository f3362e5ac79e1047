#ifndef SIPSIM_STATS_HPP
#define SIPSIM_STATS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "sipsim/core.hpp"

namespace sipsim {

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Batch-means estimator: the mean of the group means, with standard error
/// sd(group means) / sqrt(#groups). Requires at least two groups.
Estimate batch_stats(const std::vector<std::vector<double>>& groups);

/// Splits a sample sequence into contiguous batches (at least `min_batches`,
/// about sqrt(n) for large n) and applies batch_stats. The mean is the plain
/// sample mean.
Estimate batch_mean(std::span<const double> samples, std::size_t min_batches = 30);

/// Combined standard error of a difference of independent estimates.
double combined_error(const Estimate& a, const Estimate& b);

}  // namespace sipsim

#endif  // SIPSIM_STATS_HPP
