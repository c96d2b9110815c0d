#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mixrate/law.hpp"

namespace mixrate {

/* Convex nondecreasing loss, not identically constant, used by the
   shortfall risk measure.  Two shapes: l(x) = e^{theta x}, and a
   piecewise-linear convex function given by knots, the slopes of the
   knots+1 segments (nondecreasing, first >= 0, last > 0) and the value at
   the first knot. */
class LossFunction {
 public:
  enum class Kind { Exponential, PiecewiseLinearConvex };

  static LossFunction exponential(double theta);
  static LossFunction piecewise_linear(std::vector<double> knots,
                                       std::vector<double> slopes,
                                       double value_at_first_knot);

  Kind kind() const { return kind_; }
  double theta() const { return theta_; }

  double operator()(double x) const;

  /* Right-hand slope at x (the one-sided derivative). */
  double slope(double x) const;

  /* lim_{x -> -inf} of the loss: -inf when the leftmost slope is positive,
     otherwise the (finite) constant level left of the first knot. */
  double infimum() const;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& segment_slopes() const { return slopes_; }

 private:
  LossFunction() = default;

  Kind kind_ = Kind::Exponential;
  double theta_ = 0.0;
  std::vector<double> knots_, slopes_, knot_values_;
};

enum class RiskKind { Mean, Quantile, ExpectedShortfall, Shortfall, Entropic };

/* Which risk measure is in force, with its parameters. */
class RiskMeasureSpec {
 public:
  static RiskMeasureSpec mean();
  static RiskMeasureSpec quantile(double alpha);
  static RiskMeasureSpec expected_shortfall(double alpha);
  static RiskMeasureSpec shortfall(LossFunction loss, double threshold);
  static RiskMeasureSpec entropic(double theta);

  RiskKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double theta() const { return theta_; }
  double threshold() const { return threshold_; }
  const LossFunction& loss() const { return *loss_; }

 private:
  RiskMeasureSpec() = default;

  RiskKind kind_ = RiskKind::Mean;
  double alpha_ = 0.0;      // Quantile, ExpectedShortfall
  double theta_ = 0.0;      // Entropic
  double threshold_ = 0.0;  // Shortfall
  std::optional<LossFunction> loss_;  // Shortfall
};

/* Classification of how the weight-linear constraint function applies to a
   measure/components combination.  Unsupported carries a human-readable
   reason and is a value, not an error. */
enum class ConditionSupport { Linear, Quantile, Entropic, Shortfall, Unsupported };

struct ConditionCheck {
  ConditionSupport support;
  std::string reason;  // empty when supported

  bool ok() const { return support != ConditionSupport::Unsupported; }
};

ConditionCheck check_condition(const RiskMeasureSpec& rho,
                               const std::vector<Law>& components);

/* rho applied to a mixture.  Throws UnsupportedCombination when no
   evaluation path exists for the component kinds. */
double evaluate(const RiskMeasureSpec& rho, const Mixture& mix);

/* The constraint function of the weight-linear representation: a strictly
   decreasing function of r whose weighted sum over components vanishes
   exactly at the mixture's risk value.  Instantiations:
     Mean / ES (common quantile):  rho(law) - r
     Quantile(alpha):              alpha - F_law(r)
     Entropic(theta):              E[e^{theta X}] - e^{theta r}
     Shortfall(l, x0):             E[l(X - r)] - x0
   Throws ConditionUnsupported when no form applies to this law. */
double psi(const RiskMeasureSpec& rho, const Law& law, double r);

/* d/dr of psi; strictly negative.  Quantile needs a density. */
double psi_prime(const RiskMeasureSpec& rho, const Law& law, double r);

/* The unique root of psi(rho, law, .); closed form where available,
   otherwise bracketed bisection. */
double component_root(const RiskMeasureSpec& rho, const Law& law);

/* The component constraint functions of one problem bundled together:
   validated support classification, the root of each component's psi, and
   vectorized evaluation at any r. */
class PsiProfile {
 public:
  /* Throws ConditionUnsupported (with check_condition's reason) when the
     weight-linear form does not exist for this combination. */
  PsiProfile(RiskMeasureSpec rho, std::vector<Law> components);

  std::size_t size() const { return components_.size(); }
  const RiskMeasureSpec& rho() const { return rho_; }
  const std::vector<Law>& components() const { return components_; }
  ConditionSupport support() const { return support_; }
  const std::vector<double>& roots() const { return roots_; }

  std::vector<double> values_at(double r) const;
  std::vector<double> derivatives_at(double r) const;

 private:
  RiskMeasureSpec rho_;
  std::vector<Law> components_;
  ConditionSupport support_;
  std::vector<double> roots_;
};

}  // namespace mixrate
