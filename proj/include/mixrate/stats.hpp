#pragma once

namespace mixrate {

/* Standard normal density, distribution function and its inverse.
   normal_quantile accepts p in the open interval (0,1). */
double normal_pdf(double z);
double normal_cdf(double z);
double normal_quantile(double p);

}  // namespace mixrate
