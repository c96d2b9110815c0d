#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixrate/law.hpp"
#include "mixrate/risk_measure.hpp"
#include "mixrate/simplex.hpp"

namespace mixrate {

/* Grid options for rate-curve runs; when absent the curve covers the
   attainable interval padded by 10% on each side. */
struct RateCurveOptions {
  double r_min = 0.0;
  double r_max = 0.0;
  int points = 41;
  bool has_range = false;
};

struct OracleOptions {
  int m = 400;      // grid resolution
  int points = 10;  // interior r values checked
};

struct SimulateOptions {
  std::optional<double> delta;
  std::vector<long> n_grid = {50, 100, 150, 200};
  long replicas = 10000;
  std::uint64_t seed = 12345;
  bool exact_binomial = false;
};

/* One parsed problem configuration: the risk measure, the component laws,
   the true weights, and per-subcommand options. */
struct ProblemConfig {
  RiskMeasureSpec risk_measure;
  std::vector<Law> components;
  SimplexVector weights;
  RateCurveOptions rate_curve;
  OracleOptions oracle;
  SimulateOptions simulate;
};

/* Schema (all numbers JSON numbers, all kinds lowercase strings):
   {
     "risk_measure": {"kind":"mean"}
                   | {"kind":"quantile","alpha":0.95}
                   | {"kind":"expected_shortfall","alpha":0.95}
                   | {"kind":"entropic","theta":1.0}
                   | {"kind":"shortfall","threshold":1.0,"loss":
                       {"kind":"exponential","theta":1.0}
                     | {"kind":"piecewise_linear","knots":[...],
                        "slopes":[...],"value_at_first_knot":0.0}},
     "components": [{"kind":"exponential","rate":1.0},
                    {"kind":"gaussian","mean":0.0,"stdev":1.0},
                    {"kind":"point_mass","location":0.0},
                    {"kind":"finite_discrete","atoms":[...],"probs":[...]}],
     "weights":    [0.3, 0.7],
     "rate_curve": {"r_min":0.0,"r_max":1.0,"points":41},          (optional)
     "oracle":     {"m":400,"points":10},                          (optional)
     "simulate":   {"delta":0.25,"n_grid":[50,100,150,200],
                    "replicas":10000,"seed":12345,
                    "exact_binomial":false}                        (optional)
   }
   Parse failures throw std::invalid_argument with the offending path. */
ProblemConfig parse_problem_config(const nlohmann::json& doc);

Law parse_law(const nlohmann::json& doc);
RiskMeasureSpec parse_risk_measure(const nlohmann::json& doc);

nlohmann::json law_to_json(const Law& law);
nlohmann::json risk_measure_to_json(const RiskMeasureSpec& rho);

/* The re-parseable problem core (risk_measure, components, weights) for
   embedding in outputs. */
nlohmann::json problem_echo(const ProblemConfig& config);

}  // namespace mixrate
