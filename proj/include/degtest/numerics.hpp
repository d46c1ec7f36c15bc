#pragma once

#include <cstdint>

// Special-function and distribution primitives. Everything here is pure and
// deterministic; no statistics policy.

namespace degtest::num {

// ln Gamma(x) for x > 0. Throws std::domain_error otherwise.
double log_gamma(double x);

// Regularized incomplete gamma functions P(a,x) (lower) and Q(a,x) (upper).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a,b).
double inc_beta(double a, double b, double x);

// Upper-tail probability P(X >= k) for X ~ Binomial(n, p).
// Uses the incomplete-beta route for n > 1000 and compensated log-space PMF
// summation for n <= 1000; both agree to ~1e-12.
double binomial_sf(long long k, long long n, double p);

// Same as binomial_sf but forcing one of the two computation routes.
// Exposed so tests can cross-validate the paths against each other.
double binomial_sf_beta(long long k, long long n, double p);
double binomial_sf_sum(long long k, long long n, double p);

// Upper-tail probability of the chi-squared distribution with df degrees of
// freedom.
double chi2_sf(double x, int df);

// Standard normal CDF and its inverse. The quantile requires p in (0,1)
// exclusive and round-trips through the CDF to better than 1e-9.
double normal_cdf(double z);
double normal_quantile(double p);

}  // namespace degtest::num
