#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mixrate/law.hpp"
#include "mixrate/risk_measure.hpp"
#include "mixrate/simplex.hpp"

namespace mixrate {

/* Brute-force verification grid: all weight vectors (k_1/m, ..., k_s/m)
   with nonnegative integer k_j summing to m.  Grid size is
   binomial(m+s-1, s-1).  constraint_tol <= 0 selects the resolution-scaled
   default band documented at each minimizer below. */
struct GridSpec {
  int resolution = 100;
  double constraint_tol = 0.0;
};

struct OracleResult {
  double min_entropy = 0.0;  // +infinity iff no grid point is feasible
  std::optional<SimplexVector> argmin;
  long long feasible_count = 0;
};

/* sum_j p_j log(p_j / pi_j) with 0 log 0 = 0; +infinity when p places mass
   where pi has none. */
double relative_entropy(const SimplexVector& p, const SimplexVector& pi);

/* Exact number of grid points binomial(m+s-1, s-1). */
long long composition_count(int m, int s);

/* Minimize relative entropy to pi over grid weights whose mixture risk
   value lies within the feasibility band |evaluate(rho, p-mixture) - r| <=
   tol.  Default band: (2/m) * (spread of the pure single-component risk
   values), matching the grid's resolution in weight space.  Enumeration is
   lexicographic; ties keep the first argmin encountered.  Component count
   is capped at 6 (combinatorial growth). */
OracleResult grid_min_general(const RiskMeasureSpec& rho,
                              const std::vector<Law>& components,
                              const SimplexVector& pi, double r,
                              const GridSpec& grid);

/* Same minimization with the weight-linear constraint |sum_j p_j psi_j| <=
   tol instead of a risk evaluation per grid point; psi_values holds the
   component constraint values at the target r.  Default band:
   (2/m) * max_j |psi_j|. */
OracleResult grid_min_condition(const std::vector<double>& psi_values,
                                const SimplexVector& pi, const GridSpec& grid);

}  // namespace mixrate
