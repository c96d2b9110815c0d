#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "mixrate/rate_function.hpp"
#include "mixrate/simplex.hpp"

namespace mixrate {

/* Deterministic uniform variates.  The engine sequence is fixed by the
   standard and the [0,1) mapping is hand-rolled from raw 64-bit draws, so
   identical seeds give identical streams on every platform and toolchain
   (std::uniform_real_distribution makes no such promise). */
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 gen_;
};

/* Stateless seed derivation for replica streams: every (seed, n, replica)
   triple gets its own decorrelated stream, which makes results independent
   of how replicas are partitioned across workers. */
std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t n,
                           std::uint64_t replica);

/* A decay-verification run: sample sizes, replicas per size, the deviation
   radius and the master seed. */
struct SimulationPlan {
  RateProblem problem;
  double delta;
  std::vector<long> n_grid;  // strictly increasing
  long replicas;
  std::uint64_t seed;

  SimulationPlan(RateProblem prob, double d, std::vector<long> grid,
                 long reps, std::uint64_t s);
};

/* Relative frequencies of n i.i.d. categorical draws with law pi. */
SimplexVector sample_weights(const SimplexVector& pi, long n, RandomStream& stream);

/* The risk value of the mixture re-weighted by the empirical frequencies;
   always lies in the problem's attainable interval. */
double empirical_risk(const RateProblem& problem, const SimplexVector& pihat);

/* Monte Carlo estimate of P(|empirical_risk - r0| >= delta) at sample size
   n, with its binomial standard error.  Replicas run in parallel under the
   per-replica seeding contract, so the estimate does not depend on the
   worker count. */
std::pair<double, double> tail_probability(const SimulationPlan& plan, long n);

/* Exact tail probability for two-component problems: the empirical weight
   of the second component is Binomial(n, pi_2)/n, so the event decomposes
   over k = 0..n and the probability is an exact log-space binomial sum. */
double exact_tail_probability(const RateProblem& problem, double delta, long n);

struct DecayPoint {
  long n;
  double estimate;
  double standard_error;
  double minus_log_p_over_n;
};

/* Decay of the tail probabilities over the sample-size grid: the per-n
   records, the per-n exponent at the largest n (point_value), a least-
   squares slope of -log p against n (the intercept absorbs the
   subexponential prefactor), and the model-side reference decay constant. */
struct DecayEstimate {
  std::vector<DecayPoint> per_n;
  double point_value;
  double slope;
  double h_delta_reference;
};

/* Runs the plan at every n (exact binomial tails instead of Monte Carlo
   when exact_binomial is set; requires two components).  Throws
   DegenerateData when any tail probability comes out zero. */
DecayEstimate decay_slope(const SimulationPlan& plan, bool exact_binomial = false);

}  // namespace mixrate
