#include "mixrate/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace mixrate {

namespace {

constexpr double sqrt_2pi = 2.5066282746310005024;

/* Rational approximations for the inverse normal CDF (relative error
   below 1.2e-9 everywhere), refined below to machine precision. */
constexpr double ia[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                          -2.759285104469687e+02, 1.383577518672690e+02,
                          -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double ib[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                          -1.556989798598866e+02, 6.680131188771972e+01,
                          -1.328068155288572e+01};
constexpr double ic[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                          -2.400758277161838e+00, -2.549732539343734e+00,
                          4.374664141464968e+00,  2.938163982698783e+00};
constexpr double id[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                          2.445134137142996e+00, 3.754408661907416e+00};

double inverse_cdf_seed(double p) {
  const double plow = 0.02425;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((ic[0] * q + ic[1]) * q + ic[2]) * q + ic[3]) * q + ic[4]) * q +
            ic[5]) /
           ((((id[0] * q + id[1]) * q + id[2]) * q + id[3]) * q + 1.0);
  }
  if (p <= 1.0 - plow) {
    double q = p - 0.5, r = q * q;
    return (((((ia[0] * r + ia[1]) * r + ia[2]) * r + ia[3]) * r + ia[4]) * r +
            ia[5]) *
           q /
           (((((ib[0] * r + ib[1]) * r + ib[2]) * r + ib[3]) * r + ib[4]) * r +
            1.0);
  }
  double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((ic[0] * q + ic[1]) * q + ic[2]) * q + ic[3]) * q + ic[4]) * q +
           ic[5]) /
         ((((id[0] * q + id[1]) * q + id[2]) * q + id[3]) * q + 1.0);
}

}  // namespace

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / sqrt_2pi; }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile requires p strictly in (0,1)");
  double x = inverse_cdf_seed(p);
  /* Two Halley refinement steps push the seed to full double precision
     (the CDF round-trip error ends up at the last-ulp level). */
  for (int k = 0; k < 2; ++k) {
    double e = normal_cdf(x) - p;
    double u = e * sqrt_2pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

}  // namespace mixrate
