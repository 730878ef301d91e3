#pragma once

namespace lassoinfer {

// Standard normal CDF.
double normal_cdf(double x);

// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

// Upper tail P[Chi^2(1) > x].
double chisq1_sf(double x);

// Two-sided Gaussian p-value for a z statistic: 2 * (1 - Phi(|z|)).
double two_sided_normal_pvalue(double z);

// P[Binomial(n, q) >= k].
double binomial_upper_tail(int k, int n, double q);

// P[k-th largest of n iid Chi^2(1) draws > x], 1 <= k <= n.
double chisq1_order_statistic_sf(double x, int k, int n);

}  // namespace lassoinfer
