#include "mixrate/rate_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mixrate/errors.hpp"

namespace mixrate {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

/* log(sum_i exp(terms_i)) with the usual max shift. */
double log_sum_exp(const std::vector<double>& terms) {
  double m = -inf;
  for (double t : terms) m = std::max(m, t);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

}  // namespace

const char* to_string(RateBranch branch) {
  switch (branch) {
    case RateBranch::Degenerate: return "degenerate";
    case RateBranch::Interior: return "interior";
    case RateBranch::LowerBoundary: return "lower-boundary";
    case RateBranch::UpperBoundary: return "upper-boundary";
    case RateBranch::Outside: return "outside";
  }
  return "?";
}

std::pair<SimplexVector, std::vector<Law>> reduce_support(
    const SimplexVector& pi, const std::vector<Law>& components,
    std::vector<std::size_t>* kept) {
  if (pi.size() != components.size())
    throw LengthMismatch("weights and components differ in length");
  std::vector<double> weights;
  std::vector<Law> laws;
  if (kept) kept->clear();
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (pi[i] > 0.0) {
      weights.push_back(pi[i]);
      laws.push_back(components[i]);
      if (kept) kept->push_back(i);
    }
  }
  if (weights.empty())
    throw EmptySupport("all mixture weights are zero");  // unreachable for a
                                                         // valid simplex
  return {SimplexVector(std::move(weights)), std::move(laws)};
}

RateProblem::RateProblem(RiskMeasureSpec rho, std::vector<Law> components,
                         SimplexVector pi)
    : rho_(std::move(rho)),
      components_(),
      pi_(std::move(pi)),
      kept_(),
      profile_([&] {
        auto reduced = reduce_support(pi_, components, &kept_);
        pi_ = std::move(reduced.first);
        components_ = std::move(reduced.second);
        return PsiProfile(rho_, components_);
      }()) {
  const std::vector<double>& roots = profile_.roots();
  auto lower_it = std::min_element(roots.begin(), roots.end());
  auto upper_it = std::max_element(roots.begin(), roots.end());
  bounds_.lower = *lower_it;
  bounds_.upper = *upper_it;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (std::abs(roots[i] - bounds_.lower) <= 1e-9) bounds_.argmin_set.push_back(i);
    if (std::abs(roots[i] - bounds_.upper) <= 1e-9) bounds_.argmax_set.push_back(i);
  }
  bounds_.r0 = evaluate(rho_, Mixture(components_, pi_));

  /* Cross-check: the weighted constraint must vanish at the true value. */
  std::vector<double> psis = profile_.values_at(bounds_.r0);
  double residual = 0.0;
  for (std::size_t j = 0; j < psis.size(); ++j) residual += pi_[j] * psis[j];
  if (std::abs(residual) > 1e-7)
    throw NonConvergence(
        "risk value and constraint profile disagree: weighted constraint at "
        "r0 is " + std::to_string(residual));
}

bool RateProblem::degenerate() const {
  return bounds_.upper - bounds_.lower <= degeneracy_threshold;
}

double RateProblem::lambda_star(double r) const {
  if (degenerate())
    throw OutOfInterior("problem is degenerate; no interior exists");
  if (!(r > bounds_.lower && r < bounds_.upper))
    throw OutOfInterior("r = " + std::to_string(r) +
                        " is not strictly inside the attainable interval");

  const std::vector<double> psis = profile_.values_at(r);
  const std::size_t s = psis.size();
  double scale = 0.0;
  for (double p : psis) scale = std::max(scale, std::abs(p));
  const double tol = 1e-13 * scale;

  /* Tilted average g and tilted variance of psi at a given lambda, with a
     max shift so large |lambda * psi| cannot overflow. */
  auto stats = [&](double lambda, double& g, double& var) {
    double m = -inf;
    for (std::size_t j = 0; j < s; ++j) m = std::max(m, -lambda * psis[j]);
    double d = 0.0, n = 0.0, q = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      double w = pi_[j] * std::exp(-lambda * psis[j] - m);
      d += w;
      n += w * psis[j];
      q += w * psis[j] * psis[j];
    }
    g = n / d;
    var = q / d - g * g;
  };

  double g, var;
  stats(0.0, g, var);
  if (std::abs(g) <= tol) return 0.0;

  /* g is strictly decreasing with limits max(psi) > 0 and min(psi) < 0, so
     a sign-change bracket exists; expand geometrically until found. */
  double lo = -1.0, hi = 1.0, glo, ghi, ignored;
  stats(lo, glo, ignored);
  while (glo < 0.0 && lo > -1e6) {
    lo *= 2.0;
    stats(lo, glo, ignored);
  }
  stats(hi, ghi, ignored);
  while (ghi > 0.0 && hi < 1e6) {
    hi *= 2.0;
    stats(hi, ghi, ignored);
  }
  if (glo < 0.0 || ghi > 0.0)
    throw NonConvergence("no sign change for the tilt multiplier within |lambda| <= 1e6");

  /* Safeguarded Newton: keep the bracket, fall back to its midpoint when a
     Newton step leaves it.  g' = -var < 0 on the bracket. */
  double x = 0.0;
  if (x <= lo || x >= hi) x = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    stats(x, g, var);
    if (std::abs(g) <= tol) return x;
    if (g > 0.0)
      lo = x;
    else
      hi = x;
    double step = (var > 0.0) ? x + g / var : inf;
    x = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::abs(x)))
      return x;
  }
  throw NonConvergence("tilt multiplier iteration exhausted its budget");
}

double RateProblem::interior_value(double lambda,
                                   const std::vector<double>& psis) const {
  std::vector<double> terms(psis.size());
  for (std::size_t j = 0; j < psis.size(); ++j)
    terms[j] = std::log(pi_[j]) - lambda * psis[j];
  /* The tilted normalizer is at most 1 at the optimal multiplier, so the
     value is nonnegative up to rounding; clamp the rounding residue. */
  return std::max(0.0, -log_sum_exp(terms));
}

SimplexVector RateProblem::minimizer(double r) const {
  if (degenerate()) {
    if (std::abs(r - bounds_.lower) <= degeneracy_threshold) return pi_;
    throw OutOfSupport("r = " + std::to_string(r) +
                       " is outside the attainable interval");
  }
  if (r < bounds_.lower || r > bounds_.upper)
    throw OutOfSupport("r = " + std::to_string(r) +
                       " is outside the attainable interval");

  auto boundary_weights = [&](const std::vector<std::size_t>& set) {
    double total = 0.0;
    for (std::size_t i : set) total += pi_[i];
    std::vector<double> w(pi_.size(), 0.0);
    for (std::size_t i : set) w[i] = pi_[i] / total;
    return SimplexVector(std::move(w));
  };
  if (r == bounds_.lower) return boundary_weights(bounds_.argmin_set);
  if (r == bounds_.upper) return boundary_weights(bounds_.argmax_set);

  const std::vector<double> psis = profile_.values_at(r);
  double lambda = lambda_star(r);
  std::vector<double> terms(psis.size());
  for (std::size_t j = 0; j < psis.size(); ++j)
    terms[j] = std::log(pi_[j]) - lambda * psis[j];
  double norm = log_sum_exp(terms);
  std::vector<double> w(psis.size());
  double total = 0.0;
  for (std::size_t j = 0; j < psis.size(); ++j) {
    w[j] = std::exp(terms[j] - norm);
    total += w[j];
  }
  for (double& v : w) v /= total;  // absorb the last-ulp residue
  return SimplexVector(std::move(w));
}

RateResult RateProblem::rate(double r) const {
  RateResult result;
  if (degenerate()) {
    result.branch = RateBranch::Degenerate;
    if (std::abs(r - bounds_.lower) <= degeneracy_threshold) {
      result.value = 0.0;
      result.minimizer = pi_;
    } else {
      result.value = inf;
    }
    return result;
  }
  if (r < bounds_.lower || r > bounds_.upper) {
    result.branch = RateBranch::Outside;
    result.value = inf;
    return result;
  }
  if (r == bounds_.lower || r == bounds_.upper) {
    bool is_lower = (r == bounds_.lower);
    const auto& set = is_lower ? bounds_.argmin_set : bounds_.argmax_set;
    double total = 0.0;
    for (std::size_t i : set) total += pi_[i];
    result.branch = is_lower ? RateBranch::LowerBoundary : RateBranch::UpperBoundary;
    result.value = -std::log(total);
    result.minimizer = minimizer(r);
    return result;
  }
  const std::vector<double> psis = profile_.values_at(r);
  double lambda = lambda_star(r);
  result.branch = RateBranch::Interior;
  result.lambda_star = lambda;
  result.value = interior_value(lambda, psis);
  result.minimizer = minimizer(r);
  return result;
}

double RateProblem::rate_closed_s2(double r) const {
  if (pi_.size() != 2)
    throw std::invalid_argument("two-component closed form needs exactly two components");
  if (degenerate())
    throw OutOfInterior("problem is degenerate; no interior exists");
  if (!(r > bounds_.lower && r < bounds_.upper))
    throw OutOfInterior("r = " + std::to_string(r) +
                        " is not strictly inside the attainable interval");
  const std::vector<double> psis = profile_.values_at(r);
  /* Interior r puts the two constraint values on opposite sides of zero,
     which makes t = -pi_1 psi_1 / (pi_2 psi_2) positive in either order. */
  if (!(psis[0] * psis[1] < 0.0))
    throw OutOfInterior("constraint values do not straddle zero");
  double log_t =
      std::log(std::abs(pi_[0] * psis[0])) - std::log(std::abs(pi_[1] * psis[1]));
  double gap = psis[1] - psis[0];
  std::vector<double> terms = {
      std::log(pi_[0]) + psis[0] / gap * log_t,
      std::log(pi_[1]) + psis[1] / gap * log_t,
  };
  return std::max(0.0, -log_sum_exp(terms));
}

double RateProblem::curvature() const {
  if (degenerate())
    throw DegenerateProblem(
        "all components share one attainable value; curvature is undefined");
  const std::vector<double> psis = profile_.values_at(bounds_.r0);
  const std::vector<double> primes = profile_.derivatives_at(bounds_.r0);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < psis.size(); ++j) {
    num += pi_[j] * primes[j];
    den += pi_[j] * psis[j] * psis[j];
  }
  if (!(den > 0.0))
    throw DegenerateProblem("constraint values all vanish at r0; curvature is undefined");
  return num * num / den;
}

double RateProblem::decay_constant(double delta) const {
  if (!(delta > 0.0))
    throw std::invalid_argument("deviation radius must be strictly positive");
  if (degenerate())
    throw DegenerateProblem(
        "all components share one attainable value; no deviation is possible");
  return std::min(rate(bounds_.r0 - delta).value, rate(bounds_.r0 + delta).value);
}

double rate_closed_s3_affine(const std::function<double(double)>& psi_at,
                             double a, const SimplexVector& pi, double r) {
  if (pi.size() != 3)
    throw std::invalid_argument("three-component closed form needs exactly three weights");
  if (!(a > 0.0))
    throw std::invalid_argument("component spacing a must be strictly positive");
  const double psi = psi_at(r);
  if (!(psi > -2.0 * a && psi < 0.0))
    throw OutOfInterior("psi(r) = " + std::to_string(psi) +
                        " is outside the interior band (-2a, 0)");
  /* Quadratic in u = e^{-lambda a}; the discriminant is positive because
     psi < 0 < psi + 2a makes the constant and leading terms have opposite
     signs. */
  double disc = pi[1] * pi[1] * (psi + a) * (psi + a) -
                4.0 * pi[0] * pi[2] * psi * (psi + 2.0 * a);
  if (!(disc >= 0.0))
    throw NonConvergence("tilt quadratic has negative discriminant");
  double u = (-pi[1] * (psi + a) + std::sqrt(disc)) / (2.0 * pi[2] * (psi + 2.0 * a));
  if (!(u > 0.0))
    throw NonConvergence("tilt quadratic produced a nonpositive root");
  double log_u = std::log(u);
  std::vector<double> terms = {
      std::log(pi[0]) + (psi / a) * log_u,
      std::log(pi[1]) + (psi / a + 1.0) * log_u,
      std::log(pi[2]) + (psi / a + 2.0) * log_u,
  };
  return std::max(0.0, -log_sum_exp(terms));
}

}  // namespace mixrate
