#pragma once

// Ratio estimators over independent blocks (seeds). Internal.

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace implorenz::detail {

/// values[j] = sum_b num[b][j] / sum_b den[b]; influence[b][j] is block b's
/// linearized contribution, so stderr_j = sqrt(B/(B-1) sum_b influence^2).
struct RatioEstimate {
  std::vector<double> values;
  std::vector<double> stderrs;
  std::vector<std::vector<double>> influence;
};

inline double stderr_from_influence(const std::vector<double>& infl) {
  const std::size_t b = infl.size();
  if (b < 2) return std::numeric_limits<double>::quiet_NaN();
  double ss = 0;
  for (double x : infl) ss += x * x;
  return std::sqrt(ss * b / (b - 1.0));
}

inline RatioEstimate ratio_estimate(const std::vector<std::vector<double>>& num,
                                    const std::vector<double>& den) {
  RatioEstimate r;
  const std::size_t blocks = den.size();
  const std::size_t k = num.empty() ? 0 : num[0].size();
  r.values.assign(k, 0.0);
  r.stderrs.assign(k, std::numeric_limits<double>::quiet_NaN());
  const double dsum = std::accumulate(den.begin(), den.end(), 0.0);
  if (blocks == 0 || dsum == 0) return r;
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t j = 0; j < k; ++j) r.values[j] += num[b][j];
  for (double& v : r.values) v /= dsum;
  r.influence.assign(blocks, std::vector<double>(k));
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t j = 0; j < k; ++j) r.influence[b][j] = (num[b][j] - r.values[j] * den[b]) / dsum;
  std::vector<double> col(blocks);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t b = 0; b < blocks; ++b) col[b] = r.influence[b][j];
    r.stderrs[j] = stderr_from_influence(col);
  }
  return r;
}

struct LineFit {
  double slope = 0, intercept = 0, r2 = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  const std::size_t n = x.size();
  if (n < 2) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

}  // namespace implorenz::detail
