#pragma once

#include <algorithm>
#include <vector>

namespace dive::testing {

inline std::vector<double> normalized(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / s;
  return out;
}

// Primal AL1 objective over normalized vectors,
//   f(a) = sum_c w0 max(a dq - dp, 0) + max(dp - a dq, 0),
// is piecewise linear and convex in a, so its minimum lies at a = 0 or at a
// breakpoint dp[c] / dq[c].
inline double al1_oracle(const std::vector<double>& q, const std::vector<double>& p, double w0) {
  const auto dq = normalized(q);
  const auto dp = normalized(p);
  auto f = [&](double a) {
    double s = 0;
    for (std::size_t c = 0; c < dq.size(); ++c) {
      const double d = a * dq[c] - dp[c];
      s += d > 0 ? w0 * d : -d;
    }
    return s;
  };
  double best = f(0.0);
  for (std::size_t c = 0; c < dq.size(); ++c) {
    if (dq[c] > 0) best = std::min(best, f(dp[c] / dq[c]));
  }
  return best;
}

inline double l1_distance(const std::vector<double>& q, const std::vector<double>& p) {
  const auto dq = normalized(q);
  const auto dp = normalized(p);
  double s = 0;
  for (std::size_t c = 0; c < dq.size(); ++c) s += dq[c] > dp[c] ? dq[c] - dp[c] : dp[c] - dq[c];
  return s;
}

}  // namespace dive::testing
