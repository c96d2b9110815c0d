#include "mixrate/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mixrate/errors.hpp"
#include "mixrate/parallel.hpp"

namespace mixrate {

namespace {

/* mix64 finalizer: bijective avalanche over 64-bit words. */
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;

}  // namespace

std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t n,
                           std::uint64_t replica) {
  std::uint64_t h = mix64(seed + golden * (n + 1));
  return mix64(h + golden * (replica + 1));
}

SimulationPlan::SimulationPlan(RateProblem prob, double d, std::vector<long> grid,
                               long reps, std::uint64_t s)
    : problem(std::move(prob)), delta(d), n_grid(std::move(grid)),
      replicas(reps), seed(s) {
  if (!(delta > 0.0))
    throw std::invalid_argument("deviation radius must be strictly positive");
  if (n_grid.empty())
    throw std::invalid_argument("sample-size grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1)
      throw std::invalid_argument("sample sizes must be at least 1");
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw std::invalid_argument("sample-size grid must be strictly increasing");
  }
  if (replicas < 1)
    throw std::invalid_argument("replica count must be at least 1");
}

SimplexVector sample_weights(const SimplexVector& pi, long n, RandomStream& stream) {
  if (n < 1) throw std::invalid_argument("sample size must be at least 1");
  std::vector<double> cumulative(pi.size());
  double c = 0.0;
  for (std::size_t j = 0; j < pi.size(); ++j) {
    c += pi[j];
    cumulative[j] = c;
  }
  cumulative.back() = 1.0;  // guard the last cell against rounding

  std::vector<long> counts(pi.size(), 0);
  for (long i = 0; i < n; ++i) {
    double u = stream.uniform01();
    std::size_t j = 0;
    while (j + 1 < cumulative.size() && u >= cumulative[j]) ++j;
    ++counts[j];
  }
  std::vector<double> freq(pi.size());
  for (std::size_t j = 0; j < pi.size(); ++j)
    freq[j] = static_cast<double>(counts[j]) / static_cast<double>(n);
  return SimplexVector(std::move(freq));
}

double empirical_risk(const RateProblem& problem, const SimplexVector& pihat) {
  return evaluate(problem.rho(), Mixture(problem.components(), pihat));
}

std::pair<double, double> tail_probability(const SimulationPlan& plan, long n) {
  const long replicas = plan.replicas;
  const double r0 = plan.problem.r_zero();
  std::vector<unsigned char> hit(static_cast<std::size_t>(replicas), 0);
  parallel_for(static_cast<std::size_t>(replicas), worker_count(),
               [&](std::size_t rep) {
                 RandomStream stream(replica_seed(
                     plan.seed, static_cast<std::uint64_t>(n), rep));
                 SimplexVector pihat =
                     sample_weights(plan.problem.pi(), n, stream);
                 double risk = empirical_risk(plan.problem, pihat);
                 hit[rep] = std::abs(risk - r0) >= plan.delta ? 1 : 0;
               });
  long long hits = 0;
  for (unsigned char h : hit) hits += h;
  double estimate = static_cast<double>(hits) / static_cast<double>(replicas);
  double stderr_estimate =
      std::sqrt(estimate * (1.0 - estimate) / static_cast<double>(replicas));
  return {estimate, stderr_estimate};
}

double exact_tail_probability(const RateProblem& problem, double delta, long n) {
  if (problem.pi().size() != 2)
    throw std::invalid_argument(
        "exact binomial tails require exactly two components");
  if (n < 1) throw std::invalid_argument("sample size must be at least 1");
  const double r0 = problem.r_zero();
  const double p2 = problem.pi()[1];
  const double log_p2 = std::log(p2), log_p1 = std::log(problem.pi()[0]);

  /* Sum the binomial log-masses of every count k whose empirical risk
     deviates; no monotonicity of the risk in k is assumed. */
  double total = 0.0;
  for (long k = 0; k <= n; ++k) {
    std::vector<double> w = {static_cast<double>(n - k) / n,
                             static_cast<double>(k) / n};
    double risk = empirical_risk(problem, SimplexVector(std::move(w)));
    if (std::abs(risk - r0) < delta) continue;
    double log_mass = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                      std::lgamma(n - k + 1.0);
    if (k > 0) log_mass += k * log_p2;
    if (k < n) log_mass += (n - k) * log_p1;
    total += std::exp(log_mass);
  }
  return std::min(total, 1.0);
}

DecayEstimate decay_slope(const SimulationPlan& plan, bool exact_binomial) {
  DecayEstimate estimate;
  estimate.h_delta_reference = plan.problem.decay_constant(plan.delta);

  for (long n : plan.n_grid) {
    DecayPoint point;
    point.n = n;
    if (exact_binomial) {
      point.estimate = exact_tail_probability(plan.problem, plan.delta, n);
      point.standard_error = 0.0;
    } else {
      auto [est, se] = tail_probability(plan, n);
      point.estimate = est;
      point.standard_error = se;
    }
    if (!(point.estimate > 0.0))
      throw DegenerateData("tail probability is zero at n = " +
                           std::to_string(n) +
                           "; decrease delta or the sample sizes");
    point.minus_log_p_over_n = -std::log(point.estimate) / n;
    estimate.per_n.push_back(point);
  }

  estimate.point_value = estimate.per_n.back().minus_log_p_over_n;

  /* Least squares of -log p against n; with a single grid point the trend
     degenerates to the point exponent. */
  if (estimate.per_n.size() < 2) {
    estimate.slope = estimate.point_value;
    return estimate;
  }
  double mean_n = 0.0, mean_y = 0.0;
  for (const DecayPoint& p : estimate.per_n) {
    mean_n += p.n;
    mean_y += -std::log(p.estimate);
  }
  mean_n /= estimate.per_n.size();
  mean_y /= estimate.per_n.size();
  double sxy = 0.0, sxx = 0.0;
  for (const DecayPoint& p : estimate.per_n) {
    double dn = p.n - mean_n;
    sxy += dn * (-std::log(p.estimate) - mean_y);
    sxx += dn * dn;
  }
  estimate.slope = sxy / sxx;
  return estimate;
}

}  // namespace mixrate
