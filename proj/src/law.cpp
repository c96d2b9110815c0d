#include "mixrate/law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mixrate/errors.hpp"
#include "mixrate/stats.hpp"

namespace mixrate {

Law Law::exponential(double rate) {
  if (!(rate > 0.0))
    throw std::invalid_argument("exponential rate must be strictly positive");
  Law law;
  law.kind_ = LawKind::Exponential;
  law.rate_ = rate;
  return law;
}

Law Law::gaussian(double mean, double stdev) {
  if (!(stdev > 0.0))
    throw std::invalid_argument("gaussian stdev must be strictly positive");
  Law law;
  law.kind_ = LawKind::Gaussian;
  law.mean_ = mean;
  law.stdev_ = stdev;
  return law;
}

Law Law::point_mass(double location) {
  if (!std::isfinite(location))
    throw std::invalid_argument("point mass location must be finite");
  Law law;
  law.kind_ = LawKind::PointMass;
  law.location_ = location;
  return law;
}

Law Law::finite_discrete(std::vector<double> atoms, std::vector<double> probs) {
  if (atoms.size() != probs.size())
    throw LengthMismatch("finite_discrete atoms and probabilities differ in length");
  for (double a : atoms)
    if (!std::isfinite(a))
      throw std::invalid_argument("finite_discrete atoms must be finite");
  SimplexVector check(probs);  // validates nonnegativity and unit sum
  (void)check;

  /* Sort atoms ascending, carrying the probabilities along, so the CDF
     and staircase quantile below are simple cumulative scans. */
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return atoms[i] < atoms[j]; });
  Law law;
  law.kind_ = LawKind::FiniteDiscrete;
  law.atoms_.reserve(atoms.size());
  law.probs_.reserve(atoms.size());
  for (std::size_t i : order) {
    law.atoms_.push_back(atoms[i]);
    law.probs_.push_back(probs[i]);
  }
  return law;
}

double Law::cdf(double x) const {
  switch (kind_) {
    case LawKind::Exponential:
      return x < 0.0 ? 0.0 : -std::expm1(-rate_ * x);
    case LawKind::Gaussian:
      return normal_cdf((x - mean_) / stdev_);
    case LawKind::PointMass:
      return x >= location_ ? 1.0 : 0.0;
    case LawKind::FiniteDiscrete: {
      double c = 0.0;
      for (std::size_t i = 0; i < atoms_.size() && atoms_[i] <= x; ++i)
        c += probs_[i];
      return c;
    }
  }
  return 0.0;
}

double Law::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("quantile level must lie strictly in (0,1)");
  switch (kind_) {
    case LawKind::Exponential:
      return -std::log1p(-p) / rate_;
    case LawKind::Gaussian:
      return mean_ + stdev_ * normal_quantile(p);
    case LawKind::PointMass:
      return location_;
    case LawKind::FiniteDiscrete: {
      double c = 0.0;
      for (std::size_t i = 0; i < atoms_.size(); ++i) {
        c += probs_[i];
        if (c >= p) return atoms_[i];
      }
      return atoms_.back();  // only reachable through rounding of the sum
    }
  }
  return 0.0;
}

double Law::density(double x) const {
  switch (kind_) {
    case LawKind::Exponential:
      return x < 0.0 ? 0.0 : rate_ * std::exp(-rate_ * x);
    case LawKind::Gaussian:
      return normal_pdf((x - mean_) / stdev_) / stdev_;
    case LawKind::PointMass:
    case LawKind::FiniteDiscrete:
      throw NonDifferentiable("law carries atoms and has no density");
  }
  return 0.0;
}

double Law::mean() const {
  switch (kind_) {
    case LawKind::Exponential:
      return 1.0 / rate_;
    case LawKind::Gaussian:
      return mean_;
    case LawKind::PointMass:
      return location_;
    case LawKind::FiniteDiscrete: {
      double m = 0.0;
      for (std::size_t i = 0; i < atoms_.size(); ++i) m += probs_[i] * atoms_[i];
      return m;
    }
  }
  return 0.0;
}

double Law::partial_expectation(double t) const {
  switch (kind_) {
    case LawKind::Exponential:
      /* No mass below zero, so the integral saturates at the full mean. */
      if (t <= 0.0) return 1.0 / rate_;
      return (t + 1.0 / rate_) * std::exp(-rate_ * t);
    case LawKind::Gaussian: {
      double z = (t - mean_) / stdev_;
      return mean_ * (1.0 - normal_cdf(z)) + stdev_ * normal_pdf(z);
    }
    case LawKind::PointMass:
      return location_ >= t ? location_ : 0.0;
    case LawKind::FiniteDiscrete: {
      double s = 0.0;
      for (std::size_t i = 0; i < atoms_.size(); ++i)
        if (atoms_[i] >= t) s += probs_[i] * atoms_[i];
      return s;
    }
  }
  return 0.0;
}

double Law::exp_moment(double theta) const {
  switch (kind_) {
    case LawKind::Exponential:
      if (theta >= rate_)
        throw DivergentMoment("exponential moment diverges: theta " +
                              std::to_string(theta) + " >= rate " +
                              std::to_string(rate_));
      return rate_ / (rate_ - theta);
    case LawKind::Gaussian:
      return std::exp(theta * mean_ + 0.5 * theta * theta * stdev_ * stdev_);
    case LawKind::PointMass:
      return std::exp(theta * location_);
    case LawKind::FiniteDiscrete: {
      double s = 0.0;
      for (std::size_t i = 0; i < atoms_.size(); ++i)
        s += probs_[i] * std::exp(theta * atoms_[i]);
      return s;
    }
  }
  return 0.0;
}

double Law::expected_shortfall(double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("expected shortfall level must lie in (0,1)");
  switch (kind_) {
    case LawKind::Exponential:
      /* Memorylessness: the tail beyond the quantile is again exponential. */
      return quantile(alpha) + 1.0 / rate_;
    case LawKind::Gaussian: {
      double z = normal_quantile(alpha);
      return mean_ + stdev_ * normal_pdf(z) / (1.0 - alpha);
    }
    case LawKind::PointMass:
      return location_;
    case LawKind::FiniteDiscrete: {
      /* Generalized tail average: mass strictly above the quantile plus the
         part of the quantile atom needed to make up exactly 1-alpha. */
      double q = quantile(alpha);
      double tail = 0.0;
      for (std::size_t i = 0; i < atoms_.size(); ++i)
        if (atoms_[i] > q) tail += probs_[i] * atoms_[i];
      tail += q * (cdf(q) - alpha);
      return tail / (1.0 - alpha);
    }
  }
  return 0.0;
}

bool Law::has_continuous_strictly_increasing_cdf() const {
  return kind_ == LawKind::Exponential || kind_ == LawKind::Gaussian;
}

Mixture::Mixture(std::vector<Law> comps, SimplexVector w)
    : components(std::move(comps)), weights(std::move(w)) {
  if (components.empty())
    throw std::invalid_argument("mixture needs at least one component");
  if (components.size() != weights.size())
    throw LengthMismatch("mixture has " + std::to_string(components.size()) +
                         " components but " + std::to_string(weights.size()) +
                         " weights");
}

double mixture_cdf(const Mixture& mix, double x) {
  double c = 0.0;
  for (std::size_t j = 0; j < mix.components.size(); ++j)
    c += mix.weights[j] * mix.components[j].cdf(x);
  return c;
}

double mixture_quantile(const Mixture& mix, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("quantile level must lie strictly in (0,1)");
  for (const Law& law : mix.components)
    if (!law.has_continuous_strictly_increasing_cdf())
      throw UnsupportedLaw(
          "mixture quantile requires continuous strictly increasing component "
          "distributions");

  /* The mixture CDF is sandwiched between the extreme component CDFs, so
     the component quantiles at alpha bracket the mixture quantile. */
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Law& law : mix.components) {
    double q = law.quantile(alpha);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  if (hi - lo <= 1e-13) return 0.5 * (lo + hi);

  const int max_iterations = 200;
  for (int i = 0; i < max_iterations; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mixture_cdf(mix, mid) < alpha)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-13 * std::max(1.0, std::abs(mid))) break;
  }
  if (hi - lo > 1e-10)
    throw NonConvergence("mixture quantile bisection failed to reach tolerance");
  return 0.5 * (lo + hi);
}

double mixture_partial_expectation(const Mixture& mix, double t) {
  double s = 0.0;
  for (std::size_t j = 0; j < mix.components.size(); ++j)
    s += mix.weights[j] * mix.components[j].partial_expectation(t);
  return s;
}

double mixture_exp_moment(const Mixture& mix, double theta) {
  if (!(theta > 0.0))
    throw std::invalid_argument("exponential moment parameter must be positive");
  double s = 0.0;
  for (std::size_t j = 0; j < mix.components.size(); ++j)
    s += mix.weights[j] * mix.components[j].exp_moment(theta);
  return s;
}

double mixture_mean(const Mixture& mix) {
  double m = 0.0;
  for (std::size_t j = 0; j < mix.components.size(); ++j)
    m += mix.weights[j] * mix.components[j].mean();
  return m;
}

}  // namespace mixrate
