#include "mixrate/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mixrate/errors.hpp"

namespace mixrate {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr int max_oracle_components = 6;

/* Visit every composition (k_1,...,k_s) of m in ascending lexicographic
   order, reusing one buffer. */
template <typename Visit>
void for_each_composition(int m, int s, const Visit& visit) {
  std::vector<int> k(static_cast<std::size_t>(s), 0);
  struct Rec {
    std::vector<int>& k;
    const Visit& visit;
    int s;
    void go(int idx, int rem) const {
      if (idx == s - 1) {
        k[static_cast<std::size_t>(idx)] = rem;
        visit(k);
        return;
      }
      for (int v = 0; v <= rem; ++v) {
        k[static_cast<std::size_t>(idx)] = v;
        go(idx + 1, rem - v);
      }
    }
  } rec{k, visit, s};
  rec.go(0, m);
}

void check_grid(const GridSpec& grid, std::size_t s) {
  if (grid.resolution < 1)
    throw std::invalid_argument("grid resolution must be at least 1");
  if (s > max_oracle_components)
    throw std::invalid_argument("verification grid supports at most 6 components");
}

}  // namespace

double relative_entropy(const SimplexVector& p, const SimplexVector& pi) {
  if (p.size() != pi.size())
    throw LengthMismatch("relative entropy requires equal-length weight vectors");
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] == 0.0) continue;  // 0 log 0 = 0
    if (pi[j] == 0.0) return inf;
    s += p[j] * std::log(p[j] / pi[j]);
  }
  return s;
}

long long composition_count(int m, int s) {
  /* binomial(m+s-1, s-1), exact in integers (each partial product is an
     integral binomial coefficient). */
  long long c = 1;
  for (int i = 1; i <= s - 1; ++i) c = c * (m + i) / i;
  return c;
}

OracleResult grid_min_general(const RiskMeasureSpec& rho,
                              const std::vector<Law>& components,
                              const SimplexVector& pi, double r,
                              const GridSpec& grid) {
  check_grid(grid, pi.size());
  if (components.size() != pi.size())
    throw LengthMismatch("weights and components differ in length");
  const int m = grid.resolution;
  const int s = static_cast<int>(pi.size());

  double tol = grid.constraint_tol;
  if (!(tol > 0.0)) {
    /* Default band: grid spacing 1/m moves the risk value by at most the
       spread of the pure-component values per coordinate step; 2/m of that
       spread keeps the nearest feasible neighbor of any true solution in
       the band. */
    double lo = inf, hi = -inf;
    for (std::size_t j = 0; j < components.size(); ++j) {
      std::vector<double> unit(components.size(), 0.0);
      unit[j] = 1.0;
      double v = evaluate(rho, Mixture(components, SimplexVector(unit)));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    tol = 2.0 / m * (hi - lo);
  }

  OracleResult result;
  result.min_entropy = inf;
  std::vector<double> p(static_cast<std::size_t>(s));
  for_each_composition(m, s, [&](const std::vector<int>& k) {
    for (int j = 0; j < s; ++j) p[static_cast<std::size_t>(j)] = double(k[j]) / m;
    SimplexVector candidate(p);
    if (std::abs(evaluate(rho, Mixture(components, candidate)) - r) > tol) return;
    ++result.feasible_count;
    double h = relative_entropy(candidate, pi);
    if (h < result.min_entropy) {
      result.min_entropy = h;
      result.argmin = candidate;
    }
  });
  return result;
}

OracleResult grid_min_condition(const std::vector<double>& psi_values,
                                const SimplexVector& pi, const GridSpec& grid) {
  check_grid(grid, pi.size());
  if (psi_values.size() != pi.size())
    throw LengthMismatch("constraint values and weights differ in length");
  const int m = grid.resolution;
  const int s = static_cast<int>(pi.size());

  double tol = grid.constraint_tol;
  if (!(tol > 0.0)) {
    double scale = 0.0;
    for (double v : psi_values) scale = std::max(scale, std::abs(v));
    tol = 2.0 / m * scale;
  }

  OracleResult result;
  result.min_entropy = inf;
  std::vector<double> p(static_cast<std::size_t>(s));
  for_each_composition(m, s, [&](const std::vector<int>& k) {
    double constraint = 0.0;
    for (int j = 0; j < s; ++j) {
      p[static_cast<std::size_t>(j)] = double(k[j]) / m;
      constraint += p[static_cast<std::size_t>(j)] * psi_values[static_cast<std::size_t>(j)];
    }
    if (std::abs(constraint) > tol) return;
    SimplexVector candidate(p);
    ++result.feasible_count;
    double h = relative_entropy(candidate, pi);
    if (h < result.min_entropy) {
      result.min_entropy = h;
      result.argmin = candidate;
    }
  });
  return result;
}

}  // namespace mixrate
