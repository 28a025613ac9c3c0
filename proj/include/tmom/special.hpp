#pragma once

namespace tmom {

/// Logarithmic derivative of the gamma function.
double digamma(double x);

/// Second logarithmic derivative of the gamma function.
double trigamma(double x);

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal quantile (Wichura's AS 241, double precision).
double normal_quantile(double p);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

/// Quantile of the unit-rate gamma distribution with the given shape.
double gamma_quantile(double shape, double p);

}  // namespace tmom
