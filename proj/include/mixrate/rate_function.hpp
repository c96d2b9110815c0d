#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "mixrate/law.hpp"
#include "mixrate/risk_measure.hpp"
#include "mixrate/simplex.hpp"

namespace mixrate {

/* The attainable-value interval of the risk value over all mixtures of the
   components: its endpoints are the extreme component constraint roots,
   the true value r0 lies inside, and argmin/argmax record which components
   attain each endpoint (ties grouped within 1e-9). */
struct SupportBounds {
  double lower = 0.0;
  double upper = 0.0;
  double r0 = 0.0;
  std::vector<std::size_t> argmin_set, argmax_set;
};

enum class RateBranch { Degenerate, Interior, LowerBoundary, UpperBoundary, Outside };

const char* to_string(RateBranch branch);

/* One evaluation of the rate function: the (possibly infinite) value, the
   tilt multiplier on the interior branch, the minimizing weights wherever
   the value is finite, and which branch produced the value. */
struct RateResult {
  double value = 0.0;  // +infinity allowed
  std::optional<double> lambda_star;
  std::optional<SimplexVector> minimizer;
  RateBranch branch = RateBranch::Interior;
};

/* Drop all zero-weight components; the remaining weights already sum to
   one.  `kept` (optional) receives the original indices that survived. */
std::pair<SimplexVector, std::vector<Law>> reduce_support(
    const SimplexVector& pi, const std::vector<Law>& components,
    std::vector<std::size_t>* kept = nullptr);

/* The decay-rate function of the estimation error of a risk measure under
   empirically estimated mixture weights:

     H(r) = inf{ sum_j p_j log(p_j / pi_j) : the p-mixture has risk value r }.

   The infimum is solved through the weight-linear constraint form: on the
   open interval between the extreme component roots the minimizer is the
   exponentially tilted weight vector p_i ~ pi_i e^{-lambda psi_i} with the
   multiplier lambda*(r) chosen so the tilted constraint average vanishes,
   and H(r) = -log sum_j pi_j e^{-lambda*(r) psi_j(r)}.  At the endpoints the
   value is -log of the total weight of the components attaining them;
   outside it is +infinity.  When all component roots coincide the problem
   degenerates: H is 0 at the common value and +infinity elsewhere. */
class RateProblem {
 public:
  /* Degeneracy threshold on upper-lower, below the root solvers' accuracy. */
  static constexpr double degeneracy_threshold = 1e-9;

  /* Validates the constraint form (ConditionUnsupported otherwise), drops
     zero-weight components, computes the component roots, the bounds and
     r0, and cross-checks that the weighted constraint vanishes at r0. */
  RateProblem(RiskMeasureSpec rho, std::vector<Law> components, SimplexVector pi);

  const RiskMeasureSpec& rho() const { return rho_; }
  const std::vector<Law>& components() const { return components_; }
  const SimplexVector& pi() const { return pi_; }
  const PsiProfile& profile() const { return profile_; }
  const std::vector<std::size_t>& kept_indices() const { return kept_; }

  double r_zero() const { return bounds_.r0; }
  const SupportBounds& support_bounds() const { return bounds_; }
  bool degenerate() const;

  /* The tilt multiplier solving the tilted constraint equation
       sum_j pi_j psi_j e^{-lambda psi_j} / sum_j pi_j e^{-lambda psi_j} = 0
     by safeguarded Newton iteration inside a sign-change bracket (the left
     side is strictly decreasing in lambda: its derivative is minus the
     tilted variance of psi).  Requires lower < r < upper strictly. */
  double lambda_star(double r) const;

  /* The minimizing weights for lower <= r <= upper: the exponential tilt
     on the interior, the renormalized restriction of pi to the achieving
     set at either endpoint. */
  SimplexVector minimizer(double r) const;

  RateResult rate(double r) const;

  /* Two-component closed form: with psi_1, psi_2 of opposite signs at an
     interior r,  t = -pi_1 psi_1 / (pi_2 psi_2)  gives
       H(r) = -log( pi_1 t^{psi_1/(psi_2-psi_1)} + pi_2 t^{psi_2/(psi_2-psi_1)} ).
     Must agree with rate() to solver accuracy. */
  double rate_closed_s2(double r) const;

  /* Second derivative of H at r0:
       (sum_h pi_h psi_h'(r0))^2 / sum_h pi_h psi_h(r0)^2
     (the denominator is the variance of psi under pi because the weighted
     constraint average vanishes at r0). */
  double curvature() const;

  /* inf{H(r) : |r - r0| >= delta} by the two-point rule
     min(H(r0-delta), H(r0+delta)): H increases monotonically moving away
     from r0 along each side (a tested property of the tilt family), so the
     infimum over each half line sits at its inner edge. */
  double decay_constant(double delta) const;

 private:
  double interior_value(double lambda, const std::vector<double>& psis) const;

  RiskMeasureSpec rho_;
  std::vector<Law> components_;
  SimplexVector pi_;
  std::vector<std::size_t> kept_;
  PsiProfile profile_;
  SupportBounds bounds_;
};

/* Three-component closed form for constraint profiles with equally spaced
   components psi_i(r) = psi(r) + (i-1)a, a > 0.  For psi(r) in (-2a, 0) the
   tilted constraint equation becomes a quadratic in u = e^{-lambda a}:
     pi_3 (psi+2a) u^2 + pi_2 (psi+a) u + pi_1 psi = 0,
   whose positive root yields H(r) = -log sum_j pi_j u^{psi/a + (j-1)}. */
double rate_closed_s3_affine(const std::function<double(double)>& psi_at,
                             double a, const SimplexVector& pi, double r);

}  // namespace mixrate
