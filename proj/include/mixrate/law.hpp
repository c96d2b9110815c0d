#pragma once

#include <cstddef>
#include <vector>

#include "mixrate/simplex.hpp"

namespace mixrate {

enum class LawKind { Exponential, Gaussian, PointMass, FiniteDiscrete };

/* A one-dimensional probability law from a fixed catalogue with
   closed-form CDF, quantile, partial expectation and exponential moment.
   The catalogue is deliberately small so every functional below is exact
   (no quadrature anywhere). */
class Law {
 public:
  static Law exponential(double rate);             // density rate*e^{-rate*x}, x >= 0
  static Law gaussian(double mean, double stdev);  // N(mean, stdev^2)
  static Law point_mass(double location);          // unit mass at `location`
  static Law finite_discrete(std::vector<double> atoms, std::vector<double> probs);

  LawKind kind() const { return kind_; }

  double cdf(double x) const;

  /* Generalized inverse inf{x : F(x) >= p}, p in (0,1).  Exact for every
     kind; for atomic laws it is the usual staircase inverse. */
  double quantile(double p) const;

  /* Lebesgue density; throws NonDifferentiable for atomic laws. */
  double density(double x) const;

  double mean() const;

  /* Upper partial expectation over the closed half line [t, inf):
     atoms sitting exactly at t count toward the upper part. */
  double partial_expectation(double t) const;

  /* E[e^{theta X}]; throws DivergentMoment when infinite. */
  double exp_moment(double theta) const;

  /* Average of the worst (1-alpha) tail: (1/(1-alpha)) * the integral of x
     over the upper tail beyond the alpha-quantile, with the standard mass
     correction at the quantile so atomic laws are handled exactly. */
  double expected_shortfall(double alpha) const;

  /* True for kinds whose CDF is continuous and strictly increasing on the
     whole attainable range (Exponential, Gaussian). */
  bool has_continuous_strictly_increasing_cdf() const;

  /* Parameter access; meaningful only for the matching kind. */
  double rate() const { return rate_; }
  double gauss_mean() const { return mean_; }
  double gauss_stdev() const { return stdev_; }
  double location() const { return location_; }
  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& atom_probs() const { return probs_; }

 private:
  Law() = default;

  LawKind kind_ = LawKind::PointMass;
  double rate_ = 0.0;      // Exponential
  double mean_ = 0.0;      // Gaussian
  double stdev_ = 0.0;     // Gaussian
  double location_ = 0.0;  // PointMass
  std::vector<double> atoms_, probs_;  // FiniteDiscrete, atoms ascending
};

/* Convex combination of component laws.  The four functionals below are
   weight-linear, so they reduce to dot products with the component
   functionals. */
struct Mixture {
  std::vector<Law> components;
  SimplexVector weights;

  Mixture(std::vector<Law> comps, SimplexVector w);
};

double mixture_cdf(const Mixture& mix, double x);

/* Unique r with mixture_cdf(mix, r) = alpha, by bracketed bisection.
   Guaranteed absolute tolerance 1e-10 in r (the bracket is driven further,
   to ~1e-13, because downstream identities benefit and the extra
   iterations are free).  Requires every component CDF continuous and
   strictly increasing; throws UnsupportedLaw otherwise. */
double mixture_quantile(const Mixture& mix, double alpha);

double mixture_partial_expectation(const Mixture& mix, double t);

/* Sum of weighted component exponential moments, theta > 0.  Throws
   DivergentMoment when theta reaches an Exponential component's rate. */
double mixture_exp_moment(const Mixture& mix, double theta);

double mixture_mean(const Mixture& mix);

}  // namespace mixrate
