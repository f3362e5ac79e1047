#ifndef SIPSIM_TESTS_SUPPORT_HPP
#define SIPSIM_TESTS_SUPPORT_HPP

#include <cmath>
#include <vector>

#include "sipsim/stats.hpp"

namespace testing {

inline bool within_sigma(const sipsim::Estimate& e, double target, double k = 3.0) {
  return std::abs(e.mean - target) <= k * e.std_error;
}

// Mean and standard error of the mean for i.i.d. samples.
inline sipsim::Estimate iid_estimate(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double var = ss / static_cast<double>(v.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

}  // namespace testing

#endif  // SIPSIM_TESTS_SUPPORT_HPP
