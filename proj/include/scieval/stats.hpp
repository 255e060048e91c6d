#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "scieval/error.hpp"

namespace scieval::stats {

enum class Stars { none, one, two, three };

inline std::string_view to_string(Stars s) {
  switch (s) {
    case Stars::three: return "***";
    case Stars::two: return "**";
    case Stars::one: return "*";
    default: return "";
  }
}

// *** p < 0.01, ** p < 0.05, * p < 0.10; strict inequalities throughout.
inline Stars significance_stars(double p_value) {
  if (!(p_value >= 0.0 && p_value <= 1.0)) {
    throw ComputeError("significance_stars: p-value outside [0,1]");
  }
  if (p_value < 0.01) return Stars::three;
  if (p_value < 0.05) return Stars::two;
  if (p_value < 0.10) return Stars::one;
  return Stars::none;
}

struct RegressionResult {
  double gamma = 0.0;          // slope of log c on log p
  double intercept_log = 0.0;  // intercept on the log scale (natural log)
  double robust_se = 0.0;      // HC1 standard error of the slope
  double p_gamma_zero = 1.0;   // two-sided test of gamma = 0
  double p_gamma_one = 1.0;    // two-sided test of gamma = 1
  Stars stars = Stars::none;   // attached to the gamma = 0 test
  double adj_r2 = 0.0;
  double pearson_log = 0.0;    // correlation of the logged variables
  int n_obs = 0;
};

namespace detail {

inline double two_sided_p(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  boost::math::students_t_distribution<double> dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

}  // namespace detail

// OLS of log c on log p with heteroskedasticity-robust (HC1) slope errors:
// the White sandwich estimator with the n/(n-2) small-sample correction on
// the squared residuals. Logs are natural; the slope does not depend on
// the base, the reported intercept does. p-values come from the t
// distribution with n-2 degrees of freedom.
inline RegressionResult ols_loglog(
    std::span<const std::pair<double, double>> pairs) {
  const std::size_t n = pairs.size();
  if (n < 3) {
    throw ComputeError("ols_loglog: need at least 3 observations, got " +
                       std::to_string(n));
  }
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(pairs[i].first > 0.0) || !(pairs[i].second > 0.0)) {
      throw ComputeError("ols_loglog: inputs must be strictly positive");
    }
    x[i] = std::log(pairs[i].first);
    y[i] = std::log(pairs[i].second);
  }

  const double nx = static_cast<double>(n);
  const double x_mean = std::accumulate(x.begin(), x.end(), 0.0) / nx;
  const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / nx;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - x_mean;
    const double dy = y[i] - y_mean;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) {
    throw ComputeError("ols_loglog: zero variance in log p (degenerate design)");
  }

  RegressionResult res;
  res.n_obs = static_cast<int>(n);
  res.gamma = sxy / sxx;
  res.intercept_log = y_mean - res.gamma * x_mean;

  double ssr = 0.0;
  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i) {
    resid[i] = y[i] - (res.intercept_log + res.gamma * x[i]);
    ssr += resid[i] * resid[i];
  }

  // sandwich (X'X)^-1 (sum e_i^2 x_i x_i') (X'X)^-1 for X = [1, x - x_mean],
  // slope element, scaled by n/(n-2); the slope and its variance are
  // invariant under centering, which keeps the normal equations well
  // conditioned
  double m11 = 0.0, m12 = 0.0, m22 = 0.0;
  double sum_cx = 0.0, sum_cx2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cx = x[i] - x_mean;
    const double e2 = resid[i] * resid[i];
    m11 += e2;
    m12 += e2 * cx;
    m22 += e2 * cx * cx;
    sum_cx += cx;
    sum_cx2 += cx * cx;
  }
  const double det = nx * sum_cx2 - sum_cx * sum_cx;
  // row of (X'X)^-1 belonging to the slope: (1/det) * [-sum_cx, n]
  const double a = -sum_cx / det;
  const double b = nx / det;
  const double slope_var_white = a * (a * m11 + b * m12) + b * (a * m12 + b * m22);
  const double slope_var = slope_var_white * nx / (nx - 2.0);
  res.robust_se = slope_var > 0.0 ? std::sqrt(slope_var) : 0.0;

  const double df = nx - 2.0;
  if (res.robust_se > 0.0) {
    res.p_gamma_zero = detail::two_sided_p(res.gamma / res.robust_se, df);
    res.p_gamma_one = detail::two_sided_p((res.gamma - 1.0) / res.robust_se, df);
  } else {
    res.p_gamma_zero = res.gamma == 0.0 ? 1.0 : 0.0;
    res.p_gamma_one = res.gamma == 1.0 ? 1.0 : 0.0;
  }
  res.stars = significance_stars(res.p_gamma_zero);

  if (syy > 0.0) {
    const double r2 = 1.0 - ssr / syy;
    res.adj_r2 = 1.0 - (1.0 - r2) * (nx - 1.0) / (nx - 2.0);
    res.pearson_log = sxy / std::sqrt(sxx * syy);
  } else {
    // constant response: the zero-slope fit is exact
    res.adj_r2 = 1.0;
    res.pearson_log = 0.0;
  }
  return res;
}

// Rank-sum distance from the maximum-differentiation hypothesis. Subjects
// are ranked 1..N ascending by quality (ties get midranks); for a group of
// size g,
//
//   r_max  = sum of the g highest rank positions
//   r_min  = sum of the g lowest rank positions
//   r_eff  = the group's actual rank sum
//   r_diff = r_max - r_eff
//
// r_diff = 0 exactly when the group occupies the top g positions. The
// normalized distance r_diff / (r_max - r_min) lies in [0,1]; both groups'
// distances sum to 1, and the verdict favors the group with the smaller
// one. r_eff - r_min is the Mann-Whitney U statistic of the group, kept
// for cross-checking.

struct RankSumEntry {
  bool is_top = false;
  double quality = 0.0;
};

struct GroupRankSum {
  std::size_t size = 0;
  double r_eff = 0.0;
  double r_max = 0.0;
  double r_min = 0.0;
  double r_diff = 0.0;
  double normalized_distance = 0.0;
  double u_stat = 0.0;  // r_eff - r_min
};

enum class RankVerdict { top, others, tie };

inline std::string_view to_string(RankVerdict v) {
  switch (v) {
    case RankVerdict::top: return "top";
    case RankVerdict::others: return "others";
    default: return "tie";
  }
}

struct RankSumComparison {
  GroupRankSum top;
  GroupRankSum others;
  RankVerdict verdict = RankVerdict::tie;
};

inline RankSumComparison rank_sum_distance(std::span<const RankSumEntry> entries) {
  const std::size_t n = entries.size();
  if (n < 2) throw ComputeError("rank_sum_distance: need at least 2 subjects");
  std::size_t g_top = 0;
  for (const RankSumEntry& e : entries) {
    if (e.is_top) ++g_top;
  }
  const std::size_t g_oth = n - g_top;
  if (g_top == 0 || g_oth == 0) {
    throw ComputeError("rank_sum_distance: both groups must be non-empty");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return entries[a].quality < entries[b].quality;
  });

  double top_sum = 0.0, oth_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && entries[order[j]].quality == entries[order[i]].quality) ++j;
    // positions i+1 .. j share the midrank
    const double midrank = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (entries[order[k]].is_top) top_sum += midrank;
      else oth_sum += midrank;
    }
    i = j;
  }

  auto make_group = [n](std::size_t g, double r_eff) {
    GroupRankSum group;
    group.size = g;
    group.r_eff = r_eff;
    const double gd = static_cast<double>(g);
    const double nd = static_cast<double>(n);
    group.r_max = gd * (2.0 * nd - gd + 1.0) / 2.0;
    group.r_min = gd * (gd + 1.0) / 2.0;
    group.r_diff = group.r_max - r_eff;
    group.normalized_distance = group.r_diff / (group.r_max - group.r_min);
    group.u_stat = r_eff - group.r_min;
    return group;
  };

  RankSumComparison cmp;
  cmp.top = make_group(g_top, top_sum);
  cmp.others = make_group(g_oth, oth_sum);
  // r_max - r_min = g_top * g_oth for both groups, so comparing r_diff
  // directly is exact (rank sums are half-integers)
  if (cmp.top.r_diff < cmp.others.r_diff) cmp.verdict = RankVerdict::top;
  else if (cmp.top.r_diff > cmp.others.r_diff) cmp.verdict = RankVerdict::others;
  else cmp.verdict = RankVerdict::tie;
  return cmp;
}

}  // namespace scieval::stats
