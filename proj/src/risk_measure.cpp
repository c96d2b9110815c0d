#include "mixrate/risk_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "mixrate/errors.hpp"

namespace mixrate {

namespace {

constexpr double common_quantile_tolerance = 1e-9;

bool is_atomic(const Law& law) {
  return law.kind() == LawKind::PointMass || law.kind() == LawKind::FiniteDiscrete;
}

/* E[l(X - shift)] for atomic laws with an arbitrary loss: an exact sum. */
double atomic_expected_loss(const LossFunction& loss, const Law& law,
                            double shift) {
  if (law.kind() == LawKind::PointMass) return loss(law.location() - shift);
  double s = 0.0;
  for (std::size_t i = 0; i < law.atoms().size(); ++i)
    s += law.atom_probs()[i] * loss(law.atoms()[i] - shift);
  return s;
}

/* E[l(X - shift)] wherever an exact path exists.  Exponential losses reduce
   to the exponential moment (e^{-theta*shift} E[e^{theta X}]); any other
   loss shape is summed exactly over atoms. */
double expected_loss(const LossFunction& loss, const Law& law, double shift) {
  if (loss.kind() == LossFunction::Kind::Exponential)
    return std::exp(-loss.theta() * shift) * law.exp_moment(loss.theta());
  if (is_atomic(law)) return atomic_expected_loss(loss, law, shift);
  throw ConditionUnsupported(
      "piecewise-linear shortfall is only evaluated exactly on atomic "
      "components");
}

/* d/dshift of expected_loss, with the same support restrictions. */
double expected_loss_slope(const LossFunction& loss, const Law& law,
                           double shift) {
  if (loss.kind() == LossFunction::Kind::Exponential)
    return loss.theta() * std::exp(-loss.theta() * shift) *
           law.exp_moment(loss.theta());
  if (law.kind() == LawKind::PointMass)
    return loss.slope(law.location() - shift);
  if (law.kind() == LawKind::FiniteDiscrete) {
    double s = 0.0;
    for (std::size_t i = 0; i < law.atoms().size(); ++i)
      s += law.atom_probs()[i] * loss.slope(law.atoms()[i] - shift);
    return s;
  }
  throw ConditionUnsupported(
      "piecewise-linear shortfall is only evaluated exactly on atomic "
      "components");
}

/* Solve G(m) = x0 for the nonincreasing function G(m) = E[l(X - m)] by
   bracket expansion plus bisection.  `weighted` evaluates G. */
template <typename Fn>
double solve_shortfall_level(const Fn& weighted, double x0, double seed_lo,
                             double seed_hi) {
  double lo = seed_lo, hi = seed_hi;
  double glo = weighted(lo) - x0, ghi = weighted(hi) - x0;
  int guard = 0;
  while (glo < 0.0 && guard++ < 80) {  // need G(lo) >= x0
    lo -= std::max(1.0, std::abs(lo));
    glo = weighted(lo) - x0;
  }
  guard = 0;
  while (ghi > 0.0 && guard++ < 80) {  // need G(hi) <= x0
    hi += std::max(1.0, std::abs(hi));
    ghi = weighted(hi) - x0;
  }
  if (glo < 0.0 || ghi > 0.0)
    throw NonConvergence("shortfall level equation could not be bracketed");
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (weighted(mid) - x0 > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-13 * std::max(1.0, std::abs(mid))) break;
  }
  if (hi - lo > 1e-10)
    throw NonConvergence("shortfall level bisection failed to reach tolerance");
  return 0.5 * (lo + hi);
}

}  // namespace

LossFunction LossFunction::exponential(double theta) {
  if (!(theta > 0.0))
    throw std::invalid_argument("exponential loss parameter must be positive");
  LossFunction l;
  l.kind_ = Kind::Exponential;
  l.theta_ = theta;
  return l;
}

LossFunction LossFunction::piecewise_linear(std::vector<double> knots,
                                            std::vector<double> slopes,
                                            double value_at_first_knot) {
  if (knots.empty())
    throw std::invalid_argument("piecewise-linear loss needs at least one knot");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i - 1] < knots[i]))
      throw std::invalid_argument("loss knots must be strictly increasing");
  if (slopes.size() != knots.size() + 1)
    throw std::invalid_argument("piecewise-linear loss needs knots+1 slopes");
  if (!(slopes.front() >= 0.0))
    throw std::invalid_argument("loss slopes must be nonnegative");
  for (std::size_t i = 1; i < slopes.size(); ++i)
    if (!(slopes[i - 1] <= slopes[i]))
      throw std::invalid_argument("loss slopes must be nondecreasing (convexity)");
  if (!(slopes.back() > 0.0))
    throw std::invalid_argument("loss must not be identically constant");

  LossFunction l;
  l.kind_ = Kind::PiecewiseLinearConvex;
  l.knots_ = std::move(knots);
  l.slopes_ = std::move(slopes);
  l.knot_values_.resize(l.knots_.size());
  l.knot_values_[0] = value_at_first_knot;
  for (std::size_t i = 1; i < l.knots_.size(); ++i)
    l.knot_values_[i] =
        l.knot_values_[i - 1] + l.slopes_[i] * (l.knots_[i] - l.knots_[i - 1]);
  return l;
}

double LossFunction::operator()(double x) const {
  if (kind_ == Kind::Exponential) return std::exp(theta_ * x);
  if (x < knots_.front())
    return knot_values_.front() + slopes_.front() * (x - knots_.front());
  std::size_t i = knots_.size() - 1;
  while (i > 0 && knots_[i] > x) --i;
  return knot_values_[i] + slopes_[i + 1] * (x - knots_[i]);
}

double LossFunction::slope(double x) const {
  if (kind_ == Kind::Exponential) return theta_ * std::exp(theta_ * x);
  if (x < knots_.front()) return slopes_.front();
  std::size_t i = knots_.size() - 1;
  while (i > 0 && knots_[i] > x) --i;
  return slopes_[i + 1];
}

double LossFunction::infimum() const {
  if (kind_ == Kind::Exponential) return 0.0;
  if (slopes_.front() > 0.0) return -std::numeric_limits<double>::infinity();
  return knot_values_.front();
}

RiskMeasureSpec RiskMeasureSpec::mean() {
  RiskMeasureSpec s;
  s.kind_ = RiskKind::Mean;
  return s;
}

RiskMeasureSpec RiskMeasureSpec::quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("quantile level must lie strictly in (0,1)");
  RiskMeasureSpec s;
  s.kind_ = RiskKind::Quantile;
  s.alpha_ = alpha;
  return s;
}

RiskMeasureSpec RiskMeasureSpec::expected_shortfall(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("shortfall level must lie strictly in (0,1)");
  RiskMeasureSpec s;
  s.kind_ = RiskKind::ExpectedShortfall;
  s.alpha_ = alpha;
  return s;
}

RiskMeasureSpec RiskMeasureSpec::shortfall(LossFunction loss, double threshold) {
  /* The level equation E[l(X - m)] = x0 has a solution for every law iff
     x0 sits strictly inside the range of the loss (its supremum is always
     +inf because the loss is nonconstant and nondecreasing). */
  if (!(threshold > loss.infimum()))
    throw std::invalid_argument(
        "shortfall threshold must lie strictly inside the loss range");
  RiskMeasureSpec s;
  s.kind_ = RiskKind::Shortfall;
  s.threshold_ = threshold;
  s.loss_ = std::move(loss);
  return s;
}

RiskMeasureSpec RiskMeasureSpec::entropic(double theta) {
  if (!(theta > 0.0))
    throw std::invalid_argument("entropic parameter must be strictly positive");
  RiskMeasureSpec s;
  s.kind_ = RiskKind::Entropic;
  s.theta_ = theta;
  return s;
}

ConditionCheck check_condition(const RiskMeasureSpec& rho,
                               const std::vector<Law>& components) {
  switch (rho.kind()) {
    case RiskKind::Mean:
      return {ConditionSupport::Linear, ""};

    case RiskKind::Quantile:
      for (const Law& law : components)
        if (!law.has_continuous_strictly_increasing_cdf())
          return {ConditionSupport::Unsupported,
                  "quantile constraint requires continuous strictly increasing "
                  "component distributions"};
      return {ConditionSupport::Quantile, ""};

    case RiskKind::ExpectedShortfall: {
      /* The tail average combines linearly across components only when all
         component alpha-quantiles coincide; then psi = ES(law) - r. */
      double q0 = components.front().quantile(rho.alpha());
      for (const Law& law : components)
        if (std::abs(law.quantile(rho.alpha()) - q0) > common_quantile_tolerance)
          return {ConditionSupport::Unsupported,
                  "ES requires common alpha-quantile"};
      return {ConditionSupport::Linear, ""};
    }

    case RiskKind::Entropic:
      for (const Law& law : components)
        if (law.kind() == LawKind::Exponential && rho.theta() >= law.rate())
          return {ConditionSupport::Unsupported,
                  "entropic exponential moment diverges for a component"};
      return {ConditionSupport::Entropic, ""};

    case RiskKind::Shortfall:
      if (rho.loss().kind() == LossFunction::Kind::Exponential) {
        for (const Law& law : components)
          if (law.kind() == LawKind::Exponential &&
              rho.loss().theta() >= law.rate())
            return {ConditionSupport::Unsupported,
                    "shortfall loss moment diverges for a component"};
        return {ConditionSupport::Shortfall, ""};
      }
      for (const Law& law : components)
        if (!is_atomic(law))
          return {ConditionSupport::Unsupported,
                  "piecewise-linear shortfall requires atomic components"};
      return {ConditionSupport::Shortfall, ""};
  }
  return {ConditionSupport::Unsupported, "unknown risk measure kind"};
}

double evaluate(const RiskMeasureSpec& rho, const Mixture& mix) {
  switch (rho.kind()) {
    case RiskKind::Mean:
      return mixture_mean(mix);

    case RiskKind::Quantile:
      for (const Law& law : mix.components)
        if (!law.has_continuous_strictly_increasing_cdf())
          throw UnsupportedCombination(
              "quantile risk measure requires continuous strictly increasing "
              "component distributions");
      return mixture_quantile(mix, rho.alpha());

    case RiskKind::ExpectedShortfall: {
      /* Common-quantile case first: the mixture tail average is then the
         weighted component tail average, exactly, for every catalogued kind. */
      ConditionCheck check = check_condition(rho, mix.components);
      if (check.ok()) {
        double s = 0.0;
        for (std::size_t j = 0; j < mix.components.size(); ++j)
          s += mix.weights[j] * mix.components[j].expected_shortfall(rho.alpha());
        return s;
      }
      bool continuous = true;
      for (const Law& law : mix.components)
        continuous = continuous && law.has_continuous_strictly_increasing_cdf();
      if (continuous) {
        double q = mixture_quantile(mix, rho.alpha());
        return mixture_partial_expectation(mix, q) / (1.0 - rho.alpha());
      }
      throw UnsupportedCombination(
          "expected shortfall needs either a common alpha-quantile or all-"
          "continuous components");
    }

    case RiskKind::Entropic:
      return std::log(mixture_exp_moment(mix, rho.theta())) / rho.theta();

    case RiskKind::Shortfall: {
      const LossFunction& loss = rho.loss();
      if (loss.kind() == LossFunction::Kind::Exponential) {
        /* e^{-theta m} E[e^{theta X}] = x0 solves in closed form. */
        double moment = 0.0;
        for (std::size_t j = 0; j < mix.components.size(); ++j)
          moment += mix.weights[j] * mix.components[j].exp_moment(loss.theta());
        return (std::log(moment) - std::log(rho.threshold())) / loss.theta();
      }
      for (const Law& law : mix.components)
        if (!is_atomic(law))
          throw UnsupportedCombination(
              "piecewise-linear shortfall requires atomic components");
      auto weighted = [&](double m) {
        double s = 0.0;
        for (std::size_t j = 0; j < mix.components.size(); ++j)
          s += mix.weights[j] *
               atomic_expected_loss(loss, mix.components[j], m);
        return s;
      };
      /* Atom range seeds the bracket; expansion handles flat stretches. */
      double lo = mix.components.front().mean(), hi = lo;
      for (const Law& law : mix.components) {
        if (law.kind() == LawKind::PointMass) {
          lo = std::min(lo, law.location());
          hi = std::max(hi, law.location());
        } else {
          lo = std::min(lo, law.atoms().front());
          hi = std::max(hi, law.atoms().back());
        }
      }
      return solve_shortfall_level(weighted, rho.threshold(), lo - 1.0, hi + 1.0);
    }
  }
  throw UnsupportedCombination("unknown risk measure kind");
}

double psi(const RiskMeasureSpec& rho, const Law& law, double r) {
  /* Every form below is decreasing in r as written; an increasing variant
     would be sign-flipped here so downstream code can assume decrease. */
  switch (rho.kind()) {
    case RiskKind::Mean:
      return law.mean() - r;
    case RiskKind::Quantile:
      if (!law.has_continuous_strictly_increasing_cdf())
        throw ConditionUnsupported(
            "quantile constraint requires continuous strictly increasing "
            "component distributions");
      return rho.alpha() - law.cdf(r);
    case RiskKind::ExpectedShortfall:
      return law.expected_shortfall(rho.alpha()) - r;
    case RiskKind::Entropic:
      return law.exp_moment(rho.theta()) - std::exp(rho.theta() * r);
    case RiskKind::Shortfall:
      return expected_loss(rho.loss(), law, r) - rho.threshold();
  }
  throw ConditionUnsupported("unknown risk measure kind");
}

double psi_prime(const RiskMeasureSpec& rho, const Law& law, double r) {
  switch (rho.kind()) {
    case RiskKind::Mean:
    case RiskKind::ExpectedShortfall:
      return -1.0;
    case RiskKind::Quantile:
      return -law.density(r);  // throws NonDifferentiable over atoms
    case RiskKind::Entropic:
      return -rho.theta() * std::exp(rho.theta() * r);
    case RiskKind::Shortfall:
      return -expected_loss_slope(rho.loss(), law, r);
  }
  throw ConditionUnsupported("unknown risk measure kind");
}

double component_root(const RiskMeasureSpec& rho, const Law& law) {
  switch (rho.kind()) {
    case RiskKind::Mean:
      return law.mean();
    case RiskKind::Quantile:
      if (!law.has_continuous_strictly_increasing_cdf())
        throw ConditionUnsupported(
            "quantile constraint requires continuous strictly increasing "
            "component distributions");
      return law.quantile(rho.alpha());
    case RiskKind::ExpectedShortfall:
      return law.expected_shortfall(rho.alpha());
    case RiskKind::Entropic:
      return std::log(law.exp_moment(rho.theta())) / rho.theta();
    case RiskKind::Shortfall: {
      const LossFunction& loss = rho.loss();
      if (loss.kind() == LossFunction::Kind::Exponential)
        return (std::log(law.exp_moment(loss.theta())) -
                std::log(rho.threshold())) /
               loss.theta();
      if (!is_atomic(law))
        throw ConditionUnsupported(
            "piecewise-linear shortfall requires atomic components");
      auto single = [&](double m) { return expected_loss(loss, law, m); };
      double lo, hi;
      if (law.kind() == LawKind::PointMass) {
        lo = law.location() - 1.0;
        hi = law.location() + 1.0;
      } else {
        lo = law.atoms().front() - 1.0;
        hi = law.atoms().back() + 1.0;
      }
      return solve_shortfall_level(single, rho.threshold(), lo, hi);
    }
  }
  throw ConditionUnsupported("unknown risk measure kind");
}

PsiProfile::PsiProfile(RiskMeasureSpec rho, std::vector<Law> components)
    : rho_(std::move(rho)), components_(std::move(components)) {
  if (components_.empty())
    throw std::invalid_argument("constraint profile needs at least one component");
  ConditionCheck check = check_condition(rho_, components_);
  if (!check.ok()) throw ConditionUnsupported(check.reason);
  support_ = check.support;
  roots_.reserve(components_.size());
  for (const Law& law : components_)
    roots_.push_back(component_root(rho_, law));
}

std::vector<double> PsiProfile::values_at(double r) const {
  std::vector<double> v;
  v.reserve(components_.size());
  for (const Law& law : components_) v.push_back(psi(rho_, law, r));
  return v;
}

std::vector<double> PsiProfile::derivatives_at(double r) const {
  std::vector<double> v;
  v.reserve(components_.size());
  for (const Law& law : components_) v.push_back(psi_prime(rho_, law, r));
  return v;
}

}  // namespace mixrate
