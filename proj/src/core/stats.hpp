#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/common.hpp"

namespace don {

// A Monte-Carlo estimate with its jackknife standard error.
struct McEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  int count = 0;
};

// Jackknife standard error of a statistic given its leave-one-out replicates.
inline double jackknife_se(const std::vector<double>& replicates, double full) {
  std::size_t n = replicates.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double r : replicates) mean += r;
  mean /= static_cast<double>(n);
  (void)full;
  double s = 0.0;
  for (double r : replicates) s += (r - mean) * (r - mean);
  return std::sqrt(s * (static_cast<double>(n) - 1.0) / static_cast<double>(n));
}

// Mean of x_i with jackknife stderr (coincides with the usual stderr of the mean).
inline McEstimate jackknife_mean(const std::vector<double>& x) {
  std::size_t n = x.size();
  require(n >= 1, "jackknife_mean: empty sample");
  double sum = 0.0;
  for (double v : x) sum += v;
  double mean = sum / static_cast<double>(n);
  if (n == 1) return {mean, 0.0, 1};
  std::vector<double> reps(n);
  for (std::size_t i = 0; i < n; ++i) reps[i] = (sum - x[i]) / static_cast<double>(n - 1);
  return {mean, jackknife_se(reps, mean), static_cast<int>(n)};
}

// Root-mean-square of x_i (x_i are squared magnitudes) with jackknife stderr of the RMS.
inline McEstimate jackknife_rms(const std::vector<double>& sq) {
  std::size_t n = sq.size();
  require(n >= 1, "jackknife_rms: empty sample");
  double sum = 0.0;
  for (double v : sq) sum += v;
  double rms = std::sqrt(sum / static_cast<double>(n));
  if (n == 1) return {rms, 0.0, 1};
  std::vector<double> reps(n);
  for (std::size_t i = 0; i < n; ++i)
    reps[i] = std::sqrt(std::max(0.0, (sum - sq[i]) / static_cast<double>(n - 1)));
  return {rms, jackknife_se(reps, rms), static_cast<int>(n)};
}

inline double median(std::vector<double> v) {
  require(!v.empty(), "median: empty");
  std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace don
