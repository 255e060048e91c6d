#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "scieval/error.hpp"

namespace scieval::ranking {

// %-rank on a 0-100 scale, 100 best: the complement of the fraction of
// other subjects with a strictly greater value,
//
//   rank = 100 * (1 - G / (N - 1)),   N = 1 -> 50.
//
// A subject whose value is exceeded by 20% of colleagues scores 80. Tied
// values receive identical ranks, and the rank depends on the values only
// through their ordering.

inline double percent_rank(std::span<const double> values, std::size_t subject) {
  if (subject >= values.size()) {
    throw ComputeError("percent_rank: subject index out of range");
  }
  const std::size_t n = values.size();
  if (n == 1) return 50.0;
  std::size_t greater = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != subject && values[i] > values[subject]) ++greater;
  }
  return 100.0 * (1.0 - static_cast<double>(greater) / static_cast<double>(n - 1));
}

// All subjects at once; O(n log n) against a sorted copy.
inline std::vector<double> percent_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<double> ranks(n, 50.0);
  if (n <= 1) return ranks;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t greater =
        sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), values[i]);
    ranks[i] = 100.0 * (1.0 - static_cast<double>(greater) / static_cast<double>(n - 1));
  }
  return ranks;
}

struct Partition {
  std::vector<std::size_t> top;
  std::vector<std::size_t> rest;
  double threshold = 0.0;  // k-th largest selection value
};

// Isolates the top `fraction` of subjects by value: k = ceil(fraction * N),
// threshold = k-th largest value, and every subject at or above the
// threshold is included, so boundary ties inflate the top group rather
// than being broken arbitrarily.
inline Partition select_top(std::span<const double> values, double fraction) {
  const std::size_t n = values.size();
  if (n == 0) throw ComputeError("select_top: empty population");
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ComputeError("select_top: fraction must lie in (0,1)");
  }
  const double kf = fraction * static_cast<double>(n);
  std::size_t k = static_cast<std::size_t>(std::llround(kf));
  if (static_cast<double>(k) + 1e-9 < kf) ++k;  // ceil, robust to 0.1*20 = 2.0000...4
  if (k < 1) k = 1;
  if (k > n) k = n;

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double threshold = sorted[k - 1];

  Partition part;
  part.threshold = threshold;
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] >= threshold) part.top.push_back(i);
    else part.rest.push_back(i);
  }
  return part;
}

inline double mean_rank_difference(std::span<const double> top_ranks,
                                   std::span<const double> rest_ranks) {
  if (top_ranks.empty() || rest_ranks.empty()) {
    throw ComputeError("mean_rank_difference: empty group");
  }
  auto mean = [](std::span<const double> xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
  };
  return mean(top_ranks) - mean(rest_ranks);
}

}  // namespace scieval::ranking
