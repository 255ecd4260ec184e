#include "medboot/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace medboot::stats {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double normal_two_sided_p(double z) { return std::erfc(std::fabs(z) * kInvSqrt2); }

double ks_uniform_distance(const std::vector<double>& values) {
  std::vector<double> v = values;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  double d = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double lo = v[i] - static_cast<double>(i) / static_cast<double>(m);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(m) - v[i];
    d = std::max(d, std::max(lo, hi));
  }
  return d;
}

double ks_uniform_critical(double alpha, std::size_t m) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) /
         std::sqrt(static_cast<double>(m));
}

BhResult bh_adjust(const std::vector<double>& pvalues, double q) {
  const std::size_t m = pvalues.size();
  BhResult out;
  out.adjusted.assign(m, 1.0);
  out.rejected.assign(m, false);
  if (m == 0) return out;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pvalues[a] < pvalues[b];
  });

  // Adjusted value for rank i is min over j >= i of m*p_(j)/(j+1), capped.
  double running = 1.0;
  std::vector<double> adj_sorted(m);
  for (std::size_t i = m; i-- > 0;) {
    const double cand = static_cast<double>(m) * pvalues[order[i]] /
                        static_cast<double>(i + 1);
    running = std::min(running, cand);
    adj_sorted[i] = std::min(running, 1.0);
  }
  for (std::size_t i = 0; i < m; ++i) out.adjusted[order[i]] = adj_sorted[i];

  // Step-up: reject everything up to the largest rank under its threshold.
  std::size_t k = 0;
  bool found = false;
  for (std::size_t i = 0; i < m; ++i) {
    if (pvalues[order[i]] <=
        static_cast<double>(i + 1) * q / static_cast<double>(m)) {
      k = i;
      found = true;
    }
  }
  if (found) {
    for (std::size_t i = 0; i <= k; ++i) out.rejected[order[i]] = true;
  }
  return out;
}

}  // namespace medboot::stats
