#pragma once

#include <cstddef>
#include <vector>

// Small numerically careful statistics helpers shared across the library.

namespace medboot::stats {

// Standard normal CDF, computed via erfc for accurate tails.
double normal_cdf(double x);

// Upper tail P(Z > x).
double normal_sf(double x);

// Two-sided normal p-value 2*P(Z > |z|).
double normal_two_sided_p(double z);

// Kolmogorov-Smirnov distance sup_x |ECDF(x) - x| against Uniform(0,1).
// Input values must lie in [0, 1]; the input is copied and sorted.
double ks_uniform_distance(const std::vector<double>& values);

// Critical KS distance K_alpha/sqrt(m) from the asymptotic Kolmogorov law,
// K_alpha = sqrt(-log(alpha/2)/2).
double ks_uniform_critical(double alpha, std::size_t m);

struct BhResult {
  std::vector<double> adjusted;  // BH-adjusted p-values, capped at 1
  std::vector<bool> rejected;    // step-up rejections at level q
};

// Benjamini-Hochberg step-up over p-values in (0, 1] at FDR level q.
BhResult bh_adjust(const std::vector<double>& pvalues, double q);

}  // namespace medboot::stats
