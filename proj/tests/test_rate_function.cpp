#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mixrate/errors.hpp"
#include "mixrate/law.hpp"
#include "mixrate/oracle.hpp"
#include "mixrate/rate_function.hpp"
#include "mixrate/risk_measure.hpp"

using mixrate::Law;
using mixrate::RateBranch;
using mixrate::RateProblem;
using mixrate::RateResult;
using mixrate::RiskMeasureSpec;
using mixrate::SimplexVector;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// mean of a fair coin on {0, 1}
RateProblem coin_mean() {
  return RateProblem(RiskMeasureSpec::mean(),
                     {Law::point_mass(0.0), Law::point_mass(1.0)},
                     SimplexVector({0.5, 0.5}));
}

// 0.95-quantile of a two-exponential mixture
RateProblem exp_quantile() {
  return RateProblem(RiskMeasureSpec::quantile(0.95),
                     {Law::exponential(1.0), Law::exponential(2.0)},
                     SimplexVector({0.3, 0.7}));
}

// entropic risk over a fair coin on {0, 1}
RateProblem coin_entropic() {
  return RateProblem(RiskMeasureSpec::entropic(1.0),
                     {Law::point_mass(0.0), Law::point_mass(1.0)},
                     SimplexVector({0.5, 0.5}));
}

// mean of a uniform three-point law on {0, 1, 2}
RateProblem three_point_mean() {
  return RateProblem(
      RiskMeasureSpec::mean(),
      {Law::point_mass(0.0), Law::point_mass(1.0), Law::point_mass(2.0)},
      SimplexVector({1.0 / 3, 1.0 / 3, 1.0 / 3}));
}

// binary relative entropy of Bernoulli(p) against Bernoulli(1/2)
double coin_entropy(double p) {
  return p * std::log(p / 0.5) + (1.0 - p) * std::log((1.0 - p) / 0.5);
}

}  // namespace

TEST_CASE("support reduction drops zero-weight components") {
  auto [weights, laws] = mixrate::reduce_support(
      SimplexVector({0.0, 1.0}), {Law::point_mass(3.0), Law::point_mass(7.0)});
  CHECK(weights.size() == 1);
  CHECK(weights[0] == 1.0);
  CHECK(laws[0].location() == 7.0);

  std::vector<std::size_t> kept;
  mixrate::reduce_support(
      SimplexVector({0.5, 0.0, 0.5}),
      {Law::point_mass(0.0), Law::point_mass(4.0), Law::point_mass(1.0)},
      &kept);
  CHECK(kept == std::vector<std::size_t>({0, 2}));
}

TEST_CASE("zero-weight components do not influence the rate problem") {
  RateProblem reduced(
      RiskMeasureSpec::mean(),
      {Law::point_mass(0.0), Law::point_mass(1.0), Law::point_mass(5.0)},
      SimplexVector({0.5, 0.5, 0.0}));
  CHECK(reduced.kept_indices() == std::vector<std::size_t>({0, 1}));
  CHECK(reduced.pi().size() == 2);
  // the dropped component does not widen the attainable interval
  CHECK(reduced.support_bounds().upper == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(reduced.rate(0.25).value ==
        doctest::Approx(coin_mean().rate(0.25).value).epsilon(1e-12));
}

TEST_CASE("true risk value and attainable interval per fixture") {
  RateProblem a = coin_mean();
  CHECK(a.r_zero() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a.support_bounds().lower == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(a.support_bounds().upper == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.support_bounds().argmin_set == std::vector<std::size_t>({0}));
  CHECK(a.support_bounds().argmax_set == std::vector<std::size_t>({1}));

  RateProblem b = exp_quantile();
  double u = (-0.3 + std::sqrt(0.23)) / 1.4;  // quadratic for the 0.95 level
  CHECK(b.r_zero() == doctest::Approx(-std::log(u)).epsilon(1e-9));
  CHECK(b.support_bounds().lower ==
        doctest::Approx(-std::log(0.05) / 2.0).epsilon(1e-10));
  CHECK(b.support_bounds().upper ==
        doctest::Approx(-std::log(0.05)).epsilon(1e-10));

  RateProblem c = coin_entropic();
  CHECK(c.r_zero() ==
        doctest::Approx(std::log(0.5 * (1.0 + std::exp(1.0)))).epsilon(1e-12));
  CHECK(std::abs(c.support_bounds().lower) <= 1e-12);
  CHECK(c.support_bounds().upper == doctest::Approx(1.0).epsilon(1e-12));

  RateProblem d = three_point_mean();
  CHECK(d.r_zero() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(d.support_bounds().lower) <= 1e-12);
  CHECK(d.support_bounds().upper == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("tilt multiplier at reference points") {
  RateProblem a = coin_mean();
  // at r = 1/4 the tilted coin needs weight 3/4 on heads: lambda = log 3
  CHECK(a.lambda_star(0.25) == doctest::Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(std::abs(a.lambda_star(a.r_zero())) <= 1e-10);

  RateProblem d = three_point_mean();
  // at r = 1/2 the quadratic in u = e^{-lambda} gives u = (-1+sqrt(13))/6
  double u = (-1.0 + std::sqrt(13.0)) / 6.0;
  CHECK(d.lambda_star(0.5) == doctest::Approx(-std::log(u)).epsilon(1e-10));

  RateProblem b = exp_quantile();
  CHECK(std::abs(b.lambda_star(b.r_zero())) <= 1e-8);

  CHECK_THROWS_AS(a.lambda_star(0.0), mixrate::OutOfInterior);
  CHECK_THROWS_AS(a.lambda_star(1.0), mixrate::OutOfInterior);
  CHECK_THROWS_AS(a.lambda_star(-0.5), mixrate::OutOfInterior);
}

TEST_CASE("minimizing weights") {
  RateProblem a = coin_mean();
  SimplexVector tilt = a.minimizer(0.25);
  CHECK(tilt[0] == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(tilt[1] == doctest::Approx(0.25).epsilon(1e-10));

  // endpoints renormalize the prior onto the achieving components
  SimplexVector lower = a.minimizer(0.0);
  CHECK(lower[0] == 1.0);
  CHECK(lower[1] == 0.0);
  SimplexVector upper = a.minimizer(1.0);
  CHECK(upper[1] == 1.0);

  CHECK_THROWS_AS(a.minimizer(-0.25), mixrate::OutOfSupport);
  CHECK_THROWS_AS(a.minimizer(1.25), mixrate::OutOfSupport);
}

TEST_CASE("minimizer satisfies the constraint and attains the entropy value") {
  RateProblem b = exp_quantile();
  const auto& bounds = b.support_bounds();
  for (double frac : {0.15, 0.4, 0.6, 0.85}) {
    double r = bounds.lower + (bounds.upper - bounds.lower) * frac;
    RateResult res = b.rate(r);
    REQUIRE(res.minimizer.has_value());
    std::vector<double> psis = b.profile().values_at(r);
    double constraint = 0.0;
    for (std::size_t j = 0; j < psis.size(); ++j)
      constraint += (*res.minimizer)[j] * psis[j];
    CHECK(std::abs(constraint) <= 1e-9);
    CHECK(mixrate::relative_entropy(*res.minimizer, b.pi()) ==
          doctest::Approx(res.value).epsilon(1e-9));
  }
}

TEST_CASE("rate function values and branches on the coin fixture") {
  RateProblem a = coin_mean();

  RateResult interior = a.rate(0.25);
  CHECK(interior.branch == RateBranch::Interior);
  CHECK(interior.value == doctest::Approx(coin_entropy(0.25)).epsilon(1e-10));
  CHECK(interior.lambda_star.has_value());

  RateResult zero = a.rate(a.r_zero());
  CHECK(zero.value <= 1e-12);

  RateResult low = a.rate(0.0);
  CHECK(low.branch == RateBranch::LowerBoundary);
  CHECK(low.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK_FALSE(low.lambda_star.has_value());

  RateResult high = a.rate(1.0);
  CHECK(high.branch == RateBranch::UpperBoundary);
  CHECK(high.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  RateResult outside = a.rate(-0.1);
  CHECK(outside.branch == RateBranch::Outside);
  CHECK(outside.value == inf);
  CHECK_FALSE(outside.minimizer.has_value());

  CHECK(std::string(to_string(RateBranch::Interior)) == "interior");
  CHECK(std::string(to_string(RateBranch::Outside)) == "outside");
}

TEST_CASE("rate value on the three-point fixture matches the tilt closed form") {
  RateProblem d = three_point_mean();
  double u = (-1.0 + std::sqrt(13.0)) / 6.0;
  // H(1/2) = -log( (u^{-1/2} + u^{1/2} + u^{3/2}) / 3 )
  double expected =
      -std::log((std::pow(u, -0.5) + std::pow(u, 0.5) + std::pow(u, 1.5)) / 3.0);
  CHECK(d.rate(0.5).value == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("general solver agrees with the two-component closed form") {
  for (RateProblem problem : {coin_mean(), exp_quantile(), coin_entropic()}) {
    const auto& bounds = problem.support_bounds();
    double max_dev = 0.0;
    for (int i = 0; i < 50; ++i) {
      double r =
          bounds.lower + (bounds.upper - bounds.lower) * (i + 0.5) / 50.0;
      max_dev = std::max(max_dev,
                         std::abs(problem.rate(r).value - problem.rate_closed_s2(r)));
    }
    CHECK(max_dev <= 1e-10);
  }
}

TEST_CASE("two-component closed form rejects misuse") {
  CHECK_THROWS_AS(three_point_mean().rate_closed_s2(0.5), std::invalid_argument);
  CHECK_THROWS_AS(coin_mean().rate_closed_s2(-0.5), mixrate::OutOfInterior);
}

TEST_CASE("three-component affine closed form matches the general solver") {
  RateProblem d = three_point_mean();
  auto psi_first = [](double r) { return 0.0 - r; };
  double max_dev = 0.0;
  for (int i = 0; i < 50; ++i) {
    double r = 2.0 * (i + 0.5) / 50.0;
    double closed = mixrate::rate_closed_s3_affine(psi_first, 1.0, d.pi(), r);
    max_dev = std::max(max_dev, std::abs(d.rate(r).value - closed));
  }
  CHECK(max_dev <= 1e-10);
  CHECK_THROWS_AS(mixrate::rate_closed_s3_affine(psi_first, 1.0, d.pi(), 2.5),
                  mixrate::OutOfInterior);
  CHECK_THROWS_AS(mixrate::rate_closed_s3_affine(psi_first, 1.0, d.pi(), 0.0),
                  mixrate::OutOfInterior);
}

TEST_CASE("curvature formula against finite differences") {
  RateProblem a = coin_mean();
  CHECK(a.curvature() == doctest::Approx(4.0).epsilon(1e-10));

  RateProblem c = coin_entropic();
  // psi_j(r) = e^{mu_j} - e^r at the atoms 0 and 1
  double er0 = 0.5 * (1.0 + std::exp(1.0));
  double num = er0 * er0;  // (mean of psi'(r0))^2 = (e^{r0})^2
  double den = 0.5 * (1.0 - er0) * (1.0 - er0) +
               0.5 * (std::exp(1.0) - er0) * (std::exp(1.0) - er0);
  CHECK(c.curvature() == doctest::Approx(num / den).epsilon(1e-10));

  RateProblem d = three_point_mean();
  CHECK(d.curvature() == doctest::Approx(1.5).epsilon(1e-10));

  for (RateProblem problem :
       {coin_mean(), exp_quantile(), coin_entropic(), three_point_mean()}) {
    double h = 1e-4;
    double r0 = problem.r_zero();
    double fd = (problem.rate(r0 + h).value - 2.0 * problem.rate(r0).value +
                 problem.rate(r0 - h).value) /
                (h * h);
    CHECK(std::abs(problem.curvature() - fd) <= 1e-3 * problem.curvature());
  }
}

TEST_CASE("decay constant uses the nearer of the two deviation edges") {
  RateProblem a = coin_mean();
  CHECK(a.decay_constant(0.25) ==
        doctest::Approx(coin_entropy(0.25)).epsilon(1e-10));
  CHECK(a.decay_constant(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-10));
  CHECK(a.decay_constant(0.6) == inf);

  RateProblem b = exp_quantile();
  double delta = 0.2;
  double left = b.rate(b.r_zero() - delta).value;
  double right = b.rate(b.r_zero() + delta).value;
  CHECK(b.decay_constant(delta) ==
        doctest::Approx(std::min(left, right)).epsilon(1e-12));
}

TEST_CASE("rate is unimodal around the true value") {
  RateProblem b = exp_quantile();
  const auto& bounds = b.support_bounds();
  double prev = inf;
  bool passed_r0 = false;
  for (int i = 0; i <= 40; ++i) {
    double r = bounds.lower + (bounds.upper - bounds.lower) * i / 40.0;
    double value = b.rate(r).value;
    if (!passed_r0 && r >= b.r_zero()) passed_r0 = true;
    if (i > 0) {
      if (passed_r0 && r - (bounds.upper - bounds.lower) / 40.0 >= b.r_zero()) {
        CHECK(value >= prev - 1e-12);  // nondecreasing right of r0
      } else if (!passed_r0) {
        CHECK(value <= prev + 1e-12);  // nonincreasing left of r0
      }
    }
    prev = value;
  }
}

TEST_CASE("rate approaches the boundary value near the endpoints") {
  RateProblem a = coin_mean();
  double boundary = std::log(2.0);
  // the gap decays like eps*log(1/eps), so the tolerance tracks the offset
  CHECK(std::abs(a.rate(1e-8).value - boundary) <= 1e-5);
  CHECK(std::abs(a.rate(1.0 - 1e-8).value - boundary) <= 1e-5);
  CHECK(std::abs(a.rate(1e-6).value - boundary) <= 5e-5);
  CHECK(std::abs(a.rate(1.0 - 1e-6).value - boundary) <= 5e-5);
}

TEST_CASE("identical components degenerate to a point") {
  RateProblem same(RiskMeasureSpec::mean(),
                   {Law::point_mass(1.0), Law::point_mass(1.0)},
                   SimplexVector({0.5, 0.5}));
  CHECK(same.degenerate());
  RateResult at = same.rate(1.0);
  CHECK(at.branch == RateBranch::Degenerate);
  CHECK(at.value == 0.0);
  RateResult off = same.rate(0.9);
  CHECK(off.value == inf);
  CHECK_THROWS_AS(same.curvature(), mixrate::DegenerateProblem);
  CHECK_THROWS_AS(same.decay_constant(0.1), mixrate::DegenerateProblem);
  CHECK_THROWS_AS(same.lambda_star(1.0), mixrate::OutOfInterior);
}

TEST_CASE("constructing a rate problem rejects unsupported constraints") {
  CHECK_THROWS_AS(RateProblem(RiskMeasureSpec::expected_shortfall(0.95),
                              {Law::exponential(1.0), Law::exponential(2.0)},
                              SimplexVector({0.3, 0.7})),
                  mixrate::ConditionUnsupported);
  CHECK_THROWS_AS(RateProblem(RiskMeasureSpec::quantile(0.5),
                              {Law::point_mass(0.0), Law::point_mass(1.0)},
                              SimplexVector({0.5, 0.5})),
                  mixrate::ConditionUnsupported);
}
