#pragma once

namespace mandel {

/// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x),
/// by series for x < a + 1 and continued fraction otherwise.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

/// Chi-squared distribution with dof degrees of freedom.
double chi2_cdf(double x, int dof);
double chi2_sf(double x, int dof);

/// Inverse of the survival function: chi2_sf(result, dof) = 1 - p, found by
/// monotone bisection to relative tolerance 1e-10.
double chi2_quantile(double p, int dof);

/// P(X > x) for noncentral chi-squared X with the given dof and
/// noncentrality lambda, via the Poisson-weighted mixture of central tails,
/// truncated once the remaining Poisson mass drops below 1e-12.
double noncentral_chi2_sf(double x, int dof, double lambda);

/// Power of the test that rejects when the statistic exceeds the central
/// 1 - alpha quantile, under noncentrality lambda = stat.
double noncentral_chi2_power(double stat, int dof, double alpha);

}  // namespace mandel
