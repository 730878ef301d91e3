#include "lassoinfer/distributions.hpp"

#include <algorithm>
#include <cmath>

#include "lassoinfer/errors.hpp"

namespace lassoinfer {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887242097;

double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Acklam's rational approximation for the probit function, accurate to
// ~1.15e-9 before refinement.
double probit_approx(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("normal_quantile: p must lie in (0, 1)");
    double x = probit_approx(p);
    // One Halley step against the accurate CDF.
    for (int it = 0; it < 2; ++it) {
        const double e = normal_cdf(x) - p;
        const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double chisq1_sf(double x) {
    if (x <= 0.0) return 1.0;
    return std::erfc(std::sqrt(0.5 * x));
}

double two_sided_normal_pvalue(double z) {
    return std::min(1.0, std::erfc(std::abs(z) / kSqrt2));
}

double binomial_upper_tail(int k, int n, double q) {
    if (n < 0) throw InputError("binomial_upper_tail: n must be nonnegative");
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    if (q <= 0.0) return 0.0;
    if (q >= 1.0) return 1.0;
    if (k == 1) return -std::expm1(n * std::log1p(-q));
    const double lq = std::log(q);
    const double l1q = std::log1p(-q);
    double acc = 0.0;
    for (int i = k; i <= n; ++i) {
        const double term = std::exp(log_choose(n, i) + i * lq + (n - i) * l1q);
        acc += term;
        if (i > n * q && term < acc * 1e-18) break;
    }
    return std::min(1.0, acc);
}

double chisq1_order_statistic_sf(double x, int k, int n) {
    if (k < 1 || k > n) throw InputError("chisq1_order_statistic_sf: need 1 <= k <= n");
    return binomial_upper_tail(k, n, chisq1_sf(x));
}

}  // namespace lassoinfer
