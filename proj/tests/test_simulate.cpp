#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mixrate/errors.hpp"
#include "mixrate/law.hpp"
#include "mixrate/rate_function.hpp"
#include "mixrate/risk_measure.hpp"
#include "mixrate/simulate.hpp"

using mixrate::Law;
using mixrate::RandomStream;
using mixrate::RateProblem;
using mixrate::RiskMeasureSpec;
using mixrate::SimplexVector;
using mixrate::SimulationPlan;

namespace {

RateProblem coin_mean() {
  return RateProblem(RiskMeasureSpec::mean(),
                     {Law::point_mass(0.0), Law::point_mass(1.0)},
                     SimplexVector({0.5, 0.5}));
}

RateProblem exp_quantile() {
  return RateProblem(RiskMeasureSpec::quantile(0.95),
                     {Law::exponential(1.0), Law::exponential(2.0)},
                     SimplexVector({0.3, 0.7}));
}

}  // namespace

TEST_CASE("replica seeds are reproducible and spread out") {
  CHECK(mixrate::replica_seed(7, 100, 3) == mixrate::replica_seed(7, 100, 3));
  CHECK(mixrate::replica_seed(7, 100, 3) != mixrate::replica_seed(7, 100, 4));
  CHECK(mixrate::replica_seed(7, 100, 3) != mixrate::replica_seed(7, 200, 3));
  CHECK(mixrate::replica_seed(7, 100, 3) != mixrate::replica_seed(8, 100, 3));
}

TEST_CASE("random stream emits reproducible values in the unit interval") {
  RandomStream a(42), b(42), c(43);
  bool all_equal = true;
  for (int i = 0; i < 1000; ++i) {
    double u = a.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    all_equal = all_equal && (u == b.uniform01());
  }
  CHECK(all_equal);
  CHECK(a.uniform01() != c.uniform01());
}

TEST_CASE("sampled weights are empirical frequencies on the simplex") {
  SimplexVector sure({1.0, 0.0});
  RandomStream stream(11);
  SimplexVector fixed = mixrate::sample_weights(sure, 25, stream);
  CHECK(fixed[0] == 1.0);
  CHECK(fixed[1] == 0.0);

  // every entry is an integer multiple of 1/n
  SimplexVector pi({0.3, 0.7});
  for (int draw = 0; draw < 100; ++draw) {
    SimplexVector hat = mixrate::sample_weights(pi, 40, stream);
    for (std::size_t j = 0; j < hat.size(); ++j) {
      double scaled = hat[j] * 40.0;
      CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-12));
    }
  }

  // law of large numbers at a comfortable margin (6 sigma ~ 0.0095)
  SimplexVector big = mixrate::sample_weights(SimplexVector({0.5, 0.5}),
                                              100000, stream);
  CHECK(std::abs(big[0] - 0.5) <= 0.01);
}

TEST_CASE("empirical risk re-evaluates the measure under sampled weights") {
  RateProblem a = coin_mean();
  CHECK(mixrate::empirical_risk(a, SimplexVector({0.6, 0.4})) ==
        doctest::Approx(0.4).epsilon(1e-14));

  RateProblem b = exp_quantile();
  CHECK(mixrate::empirical_risk(b, SimplexVector({0.3, 0.7})) ==
        doctest::Approx(b.r_zero()).epsilon(1e-10));
}

TEST_CASE("empirical risk concentrates near the true value as n grows") {
  RateProblem b = exp_quantile();
  RandomStream stream(555);
  std::vector<double> values;
  for (int replica = 0; replica < 11; ++replica) {
    SimplexVector hat = mixrate::sample_weights(b.pi(), 100000, stream);
    values.push_back(mixrate::empirical_risk(b, hat));
  }
  std::nth_element(values.begin(), values.begin() + 5, values.end());
  CHECK(std::abs(values[5] - b.r_zero()) <= 0.01);
}

TEST_CASE("simulation plan validates its parameters") {
  RateProblem a = coin_mean();
  CHECK_THROWS_AS(SimulationPlan(a, 0.0, {50}, 100, 1), std::invalid_argument);
  CHECK_THROWS_AS(SimulationPlan(a, -0.1, {50}, 100, 1), std::invalid_argument);
  CHECK_THROWS_AS(SimulationPlan(a, 0.1, {}, 100, 1), std::invalid_argument);
  CHECK_THROWS_AS(SimulationPlan(a, 0.1, {50, 50}, 100, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(SimulationPlan(a, 0.1, {100, 50}, 100, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(SimulationPlan(a, 0.1, {0}, 100, 1), std::invalid_argument);
  CHECK_THROWS_AS(SimulationPlan(a, 0.1, {50}, 0, 1), std::invalid_argument);
}

TEST_CASE("tail probability is zero once the deviation exceeds the range") {
  RateProblem a = coin_mean();
  // every empirical value lies in [0,1], so |risk - 1/2| never reaches 0.8
  SimulationPlan plan(a, 0.8, {50}, 500, 99);
  auto [estimate, standard_error] = mixrate::tail_probability(plan, 50);
  CHECK(estimate == 0.0);
  CHECK(standard_error == 0.0);
}

TEST_CASE("Monte Carlo tails agree with exact binomial tails") {
  RateProblem a = coin_mean();
  SimulationPlan plan(a, 0.15, {50}, 20000, 2024);
  auto [mc, se] = mixrate::tail_probability(plan, 50);
  double exact = mixrate::exact_tail_probability(a, 0.15, 50);
  CHECK(std::abs(mc - exact) <= 4.0 * std::max(se, 1e-4));
  CHECK(se > 0.0);
}

TEST_CASE("exact binomial tails require a two-component problem") {
  RateProblem d(
      RiskMeasureSpec::mean(),
      {Law::point_mass(0.0), Law::point_mass(1.0), Law::point_mass(2.0)},
      SimplexVector({1.0 / 3, 1.0 / 3, 1.0 / 3}));
  CHECK_THROWS_AS(mixrate::exact_tail_probability(d, 0.25, 50),
                  std::invalid_argument);
}

TEST_CASE("exact tail at n = 50 matches an integer-exact binomial sum") {
  RateProblem a = coin_mean();
  // binomial coefficients C(50, k) are integers below 2^53, so the Pascal
  // recurrence and the sum are exact in double arithmetic
  double total = 0.0;
  double coeff = 1.0;  // C(50, 0)
  for (int k = 0; k <= 50; ++k) {
    double risk = static_cast<double>(k) / 50.0;
    if (std::abs(risk - 0.5) >= 0.25) total += coeff;
    coeff = coeff * (50 - k) / (k + 1);
  }
  double expected = total / std::pow(2.0, 50);
  CHECK(mixrate::exact_tail_probability(a, 0.25, 50) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("decay summary in exact mode reproduces reference values") {
  RateProblem a = coin_mean();
  SimulationPlan plan(a, 0.25, {50, 100, 150, 200}, 1, 12345);
  mixrate::DecayEstimate decay = mixrate::decay_slope(plan, true);

  REQUIRE(decay.per_n.size() == 4);
  CHECK(decay.h_delta_reference ==
        doctest::Approx(a.rate(0.25).value).epsilon(1e-12));
  const double reference[4] = {0.161847399880, 0.143888710166, 0.144553118480,
                               0.139031028483};
  for (int i = 0; i < 4; ++i) {
    CHECK(decay.per_n[i].minus_log_p_over_n ==
          doctest::Approx(reference[i]).epsilon(1e-9));
    CHECK(decay.per_n[i].standard_error == 0.0);
  }
  CHECK(decay.point_value == doctest::Approx(reference[3]).epsilon(1e-9));
  CHECK(decay.slope == doctest::Approx(0.132871207726).epsilon(1e-9));
}

TEST_CASE("exponent estimates bracket the decay constant from above") {
  RateProblem a = coin_mean();
  SimulationPlan plan(a, 0.25, {50, 100, 150, 200}, 1, 12345);
  mixrate::DecayEstimate decay = mixrate::decay_slope(plan, true);
  double h = decay.h_delta_reference;
  // the exponent dominates the decay constant and tightens with n
  CHECK(decay.point_value >= h);
  CHECK(decay.point_value <= h + 0.01);
  CHECK(decay.per_n.back().minus_log_p_over_n <
        decay.per_n.front().minus_log_p_over_n);
}

TEST_CASE("unobservable tails raise the degenerate-data error") {
  RateProblem a = coin_mean();
  // at delta = 0.25 the n = 150 tail is ~4e-10: no Monte Carlo hit survives
  SimulationPlan plan(a, 0.25, {150}, 2000, 31);
  CHECK_THROWS_AS(mixrate::decay_slope(plan, false), mixrate::DegenerateData);
}

TEST_CASE("Monte Carlo results do not depend on the worker count") {
  RateProblem a = coin_mean();
  SimulationPlan plan(a, 0.15, {40}, 4000, 77);
  setenv("MIXRATE_WORKERS", "1", 1);
  auto serial = mixrate::tail_probability(plan, 40);
  setenv("MIXRATE_WORKERS", "4", 1);
  auto parallel = mixrate::tail_probability(plan, 40);
  unsetenv("MIXRATE_WORKERS");
  CHECK(serial.first == parallel.first);
  CHECK(serial.second == parallel.second);
}
