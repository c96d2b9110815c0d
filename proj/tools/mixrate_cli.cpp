/* Command-line front end: rate-function curves, closed-form comparisons,
   curvature reports, brute-force verification and decay simulations for
   risk measures on finite mixtures with estimated weights.

   Exit codes: 0 ok, 2 configuration/parse failure, 3 unsupported
   measure/law combination, 4 verification failure, 5 degenerate data. */

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixrate/config.hpp"
#include "mixrate/errors.hpp"
#include "mixrate/oracle.hpp"
#include "mixrate/parallel.hpp"
#include "mixrate/rate_function.hpp"
#include "mixrate/simulate.hpp"

namespace {

using nlohmann::json;

constexpr double inf = std::numeric_limits<double>::infinity();

/* All floating-point output carries 12 significant digits so emitted files
   are stable enough for byte comparison. */
std::string fmt(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return buffer;
}

/* JSON has no infinities; represent them as strings. */
json json_number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

struct Output {
  std::ofstream file;
  std::ostream* stream = &std::cout;

  void open(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw std::invalid_argument("cannot open output file " + path);
    stream = &file;
  }
};

mixrate::ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  return mixrate::parse_problem_config(json::parse(in));
}

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "problem configuration (JSON)")
      ->required();
  cmd->add_option("--out", args.out_path, "output file (default: stdout)");
  cmd->add_option("--format", args.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

/* ------------------------------------------------------------------ */

int cmd_rate_curve(const CommonArgs& common, std::optional<double> r_min,
                   std::optional<double> r_max, std::optional<int> points) {
  mixrate::ProblemConfig config = load_config(common.config_path);
  mixrate::RateProblem problem(config.risk_measure, config.components,
                               config.weights);
  const mixrate::SupportBounds& bounds = problem.support_bounds();

  double lo, hi;
  if (r_min && r_max) {
    lo = *r_min;
    hi = *r_max;
  } else if (config.rate_curve.has_range) {
    lo = config.rate_curve.r_min;
    hi = config.rate_curve.r_max;
  } else {
    double width = bounds.upper - bounds.lower;
    double pad = width > 0 ? 0.1 * width : 0.5;
    lo = bounds.lower - pad;
    hi = bounds.upper + pad;
  }
  int n = points ? *points : config.rate_curve.points;
  if (n < 2) throw std::invalid_argument("rate curve needs at least 2 points");
  if (!(lo < hi)) throw std::invalid_argument("r-min must be below r-max");

  std::optional<double> curvature;
  try {
    curvature = problem.curvature();
  } catch (const mixrate::Error&) {
    // degenerate or non-differentiable at r0; report the curve anyway
  }
  std::cerr << "r0 = " << fmt(bounds.r0) << ", attainable interval = ["
            << fmt(bounds.lower) << ", " << fmt(bounds.upper) << "]"
            << ", curvature at r0 = "
            << (curvature ? fmt(*curvature) : std::string("undefined")) << "\n";

  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  std::vector<mixrate::RateResult> rows(grid.size());
  mixrate::parallel_for(grid.size(), mixrate::worker_count(),
                        [&](std::size_t i) { rows[i] = problem.rate(grid[i]); });

  Output output;
  output.open(common.out_path);
  const std::size_t s = problem.pi().size();
  if (common.format == "csv") {
    *output.stream << "r,H,branch,lambda_star";
    for (std::size_t j = 1; j <= s; ++j) *output.stream << ",p" << j;
    *output.stream << "\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const mixrate::RateResult& row = rows[i];
      *output.stream << fmt(grid[i]) << "," << fmt(row.value) << ","
                     << to_string(row.branch) << ","
                     << fmt(row.lambda_star ? *row.lambda_star
                                            : std::numeric_limits<double>::quiet_NaN());
      for (std::size_t j = 0; j < s; ++j)
        *output.stream << ","
                       << fmt(row.minimizer
                                  ? (*row.minimizer)[j]
                                  : std::numeric_limits<double>::quiet_NaN());
      *output.stream << "\n";
    }
  } else {
    json rows_json = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const mixrate::RateResult& row = rows[i];
      json entry = {{"r", grid[i]},
                    {"H", json_number(row.value)},
                    {"branch", to_string(row.branch)}};
      if (row.lambda_star) entry["lambda_star"] = *row.lambda_star;
      if (row.minimizer) entry["minimizer"] = row.minimizer->values();
      rows_json.push_back(entry);
    }
    json doc = {{"r0", bounds.r0},
                {"lower", bounds.lower},
                {"upper", bounds.upper},
                {"curvature", curvature ? json_number(*curvature) : json()},
                {"rows", rows_json},
                {"config_echo", mixrate::problem_echo(config)}};
    *output.stream << doc.dump(2) << "\n";
  }
  return 0;
}

/* ------------------------------------------------------------------ */

int cmd_oracle_check(const CommonArgs& common, std::optional<int> m_override,
                     std::optional<int> points_override, bool corrupt_psi_sign) {
  mixrate::ProblemConfig config = load_config(common.config_path);
  if (config.weights.size() > 6) {
    std::cerr << "oracle-check supports at most 6 components\n";
    return 3;
  }
  mixrate::RateProblem problem(config.risk_measure, config.components,
                               config.weights);
  if (problem.degenerate())
    throw mixrate::DegenerateProblem(
        "all components share one attainable value; nothing to verify");

  const int m = m_override ? *m_override : config.oracle.m;
  const int points = points_override ? *points_override : config.oracle.points;
  if (m < 1 || points < 1)
    throw std::invalid_argument("oracle grid needs m >= 1 and points >= 1");

  /* Interior r grid with a 20% margin on each side: near the boundary the
     feasible band thins out and the discrete minimum is not informative. */
  const mixrate::SupportBounds& bounds = problem.support_bounds();
  double width = bounds.upper - bounds.lower;
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] =
        bounds.lower +
        width * (0.2 + 0.6 * (points > 1 ? double(i) / (points - 1) : 0.5));

  /* Deviation bounds scale with the grid resolution: the discrete minimum
     sits within O(1/m) of the true infimum for the linear constraint and
     within twice that for the nonlinear one (looser feasibility band). */
  const double condition_bound = 4.0 / m;
  const double general_bound = 8.0 / m;

  struct Row {
    double r, rate, cond, gen, dev_cond, dev_gen;
    bool flagged;
  };
  std::vector<Row> rows(grid.size());
  mixrate::parallel_for(grid.size(), mixrate::worker_count(), [&](std::size_t i) {
    double r = grid[i];
    double rate = problem.rate(r).value;
    std::vector<double> psis = problem.profile().values_at(r);
    if (corrupt_psi_sign) psis[0] = -psis[0];  // negative control
    mixrate::GridSpec spec{m, 0.0};
    mixrate::OracleResult cond =
        mixrate::grid_min_condition(psis, problem.pi(), spec);
    mixrate::OracleResult gen = mixrate::grid_min_general(
        problem.rho(), problem.components(), problem.pi(), r, spec);
    Row row;
    row.r = r;
    row.rate = rate;
    row.cond = cond.min_entropy;
    row.gen = gen.min_entropy;
    row.dev_cond = std::abs(rate - cond.min_entropy);
    row.dev_gen = std::abs(rate - gen.min_entropy);
    row.flagged = !(row.dev_cond <= condition_bound) ||
                  !(row.dev_gen <= general_bound);
    rows[i] = row;
  });

  Output output;
  output.open(common.out_path);
  bool any_flagged = false;
  double max_dev = 0.0;
  if (common.format == "csv") {
    *output.stream
        << "r,rate,oracle_condition,oracle_general,dev_condition,dev_general,flagged\n";
    for (const Row& row : rows) {
      *output.stream << fmt(row.r) << "," << fmt(row.rate) << ","
                     << fmt(row.cond) << "," << fmt(row.gen) << ","
                     << fmt(row.dev_cond) << "," << fmt(row.dev_gen) << ","
                     << (row.flagged ? "1" : "0") << "\n";
    }
  } else {
    json rows_json = json::array();
    for (const Row& row : rows)
      rows_json.push_back({{"r", row.r},
                           {"rate", json_number(row.rate)},
                           {"oracle_condition", json_number(row.cond)},
                           {"oracle_general", json_number(row.gen)},
                           {"dev_condition", json_number(row.dev_cond)},
                           {"dev_general", json_number(row.dev_gen)},
                           {"flagged", row.flagged}});
    json doc = {{"m", m},
                {"condition_bound", condition_bound},
                {"general_bound", general_bound},
                {"rows", rows_json},
                {"config_echo", mixrate::problem_echo(config)}};
    *output.stream << doc.dump(2) << "\n";
  }
  for (const Row& row : rows) {
    any_flagged = any_flagged || row.flagged;
    max_dev = std::max(max_dev, std::max(row.dev_cond, row.dev_gen));
  }
  std::cerr << "max deviation " << fmt(max_dev) << " against bounds "
            << fmt(condition_bound) << " (condition) / " << fmt(general_bound)
            << " (general)\n";
  return any_flagged ? 4 : 0;
}

/* ------------------------------------------------------------------ */

int cmd_simulate(const CommonArgs& common, std::optional<double> delta_override,
                 std::optional<std::uint64_t> seed_override, bool exact_flag) {
  mixrate::ProblemConfig config = load_config(common.config_path);
  mixrate::RateProblem problem(config.risk_measure, config.components,
                               config.weights);

  std::optional<double> delta = delta_override ? delta_override
                                               : config.simulate.delta;
  if (!delta)
    throw std::invalid_argument("simulate requires a deviation radius "
                                "(--delta or simulate.delta)");
  bool exact = exact_flag || config.simulate.exact_binomial;
  if (exact && problem.pi().size() != 2) {
    std::cerr << "exact binomial tails require exactly two components\n";
    return 3;
  }
  mixrate::SimulationPlan plan(
      problem, *delta, config.simulate.n_grid, config.simulate.replicas,
      seed_override ? *seed_override : config.simulate.seed);
  mixrate::DecayEstimate decay = mixrate::decay_slope(plan, exact);

  Output output;
  output.open(common.out_path);
  if (common.format == "csv") {
    *output.stream << "n,estimate,stderr,minus_log_p_over_n,h_delta_reference\n";
    for (const mixrate::DecayPoint& point : decay.per_n)
      *output.stream << point.n << "," << fmt(point.estimate) << ","
                     << fmt(point.standard_error) << ","
                     << fmt(point.minus_log_p_over_n) << ","
                     << fmt(decay.h_delta_reference) << "\n";
  } else {
    json rows = json::array();
    for (const mixrate::DecayPoint& point : decay.per_n)
      rows.push_back({{"n", point.n},
                      {"estimate", point.estimate},
                      {"stderr", point.standard_error},
                      {"minus_log_p_over_n", point.minus_log_p_over_n}});
    json doc = {{"rows", rows},
                {"summary",
                 {{"point_value", decay.point_value},
                  {"slope", decay.slope},
                  {"h_delta", json_number(decay.h_delta_reference)},
                  {"ratio", json_number(decay.point_value /
                                        decay.h_delta_reference)}}},
                {"config_echo", mixrate::problem_echo(config)}};
    *output.stream << doc.dump(2) << "\n";
  }
  std::cerr << "final -log(p)/n = " << fmt(decay.point_value) << ", h_delta = "
            << fmt(decay.h_delta_reference) << ", ratio = "
            << fmt(decay.point_value / decay.h_delta_reference)
            << ", regression slope = " << fmt(decay.slope) << "\n";
  return 0;
}

/* ------------------------------------------------------------------ */

int cmd_curvature(const CommonArgs& common) {
  mixrate::ProblemConfig config = load_config(common.config_path);
  mixrate::RateProblem problem(config.risk_measure, config.components,
                               config.weights);
  const mixrate::SupportBounds& bounds = problem.support_bounds();
  double curvature = problem.curvature();

  /* Independent check: a central second difference of the rate function,
     with the step shrunk if r0 sits very close to an endpoint. */
  double h = 1e-4;
  double room = std::min(bounds.r0 - bounds.lower, bounds.upper - bounds.r0);
  if (room < 4.0 * h) h = 0.25 * room;
  double fd = (problem.rate(bounds.r0 + h).value -
               2.0 * problem.rate(bounds.r0).value +
               problem.rate(bounds.r0 - h).value) /
              (h * h);
  double gap = std::abs(curvature - fd) / std::abs(curvature);

  Output output;
  output.open(common.out_path);
  if (common.format == "csv") {
    *output.stream << "r0,curvature,finite_difference,relative_gap\n"
                   << fmt(bounds.r0) << "," << fmt(curvature) << "," << fmt(fd)
                   << "," << fmt(gap) << "\n";
  } else {
    json doc = {{"r0", bounds.r0},
                {"curvature", curvature},
                {"finite_difference", fd},
                {"relative_gap", gap},
                {"config_echo", mixrate::problem_echo(config)}};
    *output.stream << doc.dump(2) << "\n";
  }
  return 0;
}

/* ------------------------------------------------------------------ */

int cmd_closed_form_check(const CommonArgs& common, std::optional<int> points) {
  mixrate::ProblemConfig config = load_config(common.config_path);
  mixrate::RateProblem problem(config.risk_measure, config.components,
                               config.weights);
  if (problem.degenerate())
    throw mixrate::DegenerateProblem(
        "all components share one attainable value; no closed form applies");
  const mixrate::SupportBounds& bounds = problem.support_bounds();
  const std::size_t s = problem.pi().size();
  const int n = points ? *points : 50;
  if (n < 1) throw std::invalid_argument("closed-form check needs points >= 1");

  std::function<double(double)> closed;
  if (s == 2) {
    closed = [&](double r) { return problem.rate_closed_s2(r); };
  } else if (s == 3) {
    /* The three-component closed form applies when the constraint values
       are equally spaced with an r-independent gap; probe a few interior
       points to detect that shape. */
    double a = 0.0;
    bool affine = true;
    for (int i = 1; i <= 5 && affine; ++i) {
      double r = bounds.lower +
                 (bounds.upper - bounds.lower) * (0.1 + 0.8 * (i - 1) / 4.0);
      std::vector<double> psis = problem.profile().values_at(r);
      double d1 = psis[1] - psis[0], d2 = psis[2] - psis[1];
      double scale = std::max({std::abs(psis[0]), std::abs(psis[1]),
                               std::abs(psis[2]), 1.0});
      if (std::abs(d2 - d1) > 1e-9 * scale) affine = false;
      if (i == 1)
        a = d1;
      else if (std::abs(d1 - a) > 1e-9 * scale)
        affine = false;
    }
    if (!affine || !(a > 0.0)) {
      std::cerr << "closed-form-check: three-component constraint profile is "
                   "not affine with positive spacing\n";
      return 3;
    }
    closed = [&, a](double r) {
      return mixrate::rate_closed_s3_affine(
          [&](double x) { return problem.profile().values_at(x)[0]; }, a,
          problem.pi(), r);
    };
  } else {
    std::cerr << "closed-form-check supports 2 components, or 3 with an affine "
                 "constraint profile\n";
    return 3;
  }

  Output output;
  output.open(common.out_path);
  double max_dev = 0.0;
  const double tolerance = 1e-8;
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    grid[static_cast<std::size_t>(i)] =
        bounds.lower + (bounds.upper - bounds.lower) * (i + 0.5) / n;
  if (common.format == "csv")
    *output.stream << "r,general,closed_form,abs_dev\n";
  json rows = json::array();
  for (double r : grid) {
    double general = problem.rate(r).value;
    double value = closed(r);
    double dev = std::abs(general - value);
    max_dev = std::max(max_dev, dev);
    if (common.format == "csv")
      *output.stream << fmt(r) << "," << fmt(general) << "," << fmt(value)
                     << "," << fmt(dev) << "\n";
    else
      rows.push_back({{"r", r},
                      {"general", general},
                      {"closed_form", value},
                      {"abs_dev", dev}});
  }
  if (common.format == "json") {
    json doc = {{"max_abs_dev", max_dev},
                {"tolerance", tolerance},
                {"rows", rows},
                {"config_echo", mixrate::problem_echo(config)}};
    *output.stream << doc.dump(2) << "\n";
  }
  std::cerr << "max |general - closed| = " << fmt(max_dev) << "\n";
  return max_dev <= tolerance ? 0 : 4;
}

/* ------------------------------------------------------------------ */

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mixrate::ConditionUnsupported& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return 3;
  } catch (const mixrate::UnsupportedCombination& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return 3;
  } catch (const mixrate::UnsupportedLaw& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return 3;
  } catch (const mixrate::DivergentMoment& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return 3;
  } catch (const mixrate::NonDifferentiable& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return 3;
  } catch (const mixrate::DegenerateData& e) {
    std::cerr << "degenerate: " << e.what() << "\n";
    return 5;
  } catch (const mixrate::DegenerateProblem& e) {
    std::cerr << "degenerate: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Decay-rate functions, verification oracles and tail-probability "
      "simulations for risk measures on finite mixtures with estimated "
      "weights"};
  app.require_subcommand(1);

  CommonArgs rc_args;
  std::optional<double> rc_r_min, rc_r_max;
  std::optional<int> rc_points;
  CLI::App* rate_curve =
      app.add_subcommand("rate-curve", "evaluate the rate function on an r grid");
  add_common(rate_curve, rc_args);
  rate_curve->add_option("--r-min", rc_r_min, "grid lower end");
  rate_curve->add_option("--r-max", rc_r_max, "grid upper end");
  rate_curve->add_option("--points", rc_points, "grid size");

  CommonArgs oc_args;
  std::optional<int> oc_m, oc_points;
  bool oc_corrupt = false;
  CLI::App* oracle_check = app.add_subcommand(
      "oracle-check", "compare the rate function against brute-force grid minima");
  add_common(oracle_check, oc_args);
  oracle_check->add_option("--m", oc_m, "grid resolution");
  oracle_check->add_option("--points", oc_points, "interior r values checked");
  oracle_check
      ->add_flag("--corrupt-psi-sign", oc_corrupt,
                 "negative control: flip one constraint sign")
      ->group("");

  CommonArgs sim_args;
  std::optional<double> sim_delta;
  std::optional<std::uint64_t> sim_seed;
  bool sim_exact = false;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "estimate tail probabilities across sample sizes");
  add_common(simulate, sim_args);
  simulate->add_option("--delta", sim_delta, "deviation radius");
  simulate->add_option("--seed", sim_seed, "master seed");
  simulate->add_flag("--exact-binomial", sim_exact,
                     "exact binomial tails (two components)");

  CommonArgs curv_args;
  CLI::App* curvature = app.add_subcommand(
      "curvature", "second derivative of the rate function at r0");
  add_common(curvature, curv_args);

  CommonArgs cf_args;
  std::optional<int> cf_points;
  CLI::App* closed_form = app.add_subcommand(
      "closed-form-check", "compare the general solver against closed forms");
  add_common(closed_form, cf_args);
  closed_form->add_option("--points", cf_points, "interior grid size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (rate_curve->parsed())
    return run_guarded(
        [&] { return cmd_rate_curve(rc_args, rc_r_min, rc_r_max, rc_points); });
  if (oracle_check->parsed())
    return run_guarded(
        [&] { return cmd_oracle_check(oc_args, oc_m, oc_points, oc_corrupt); });
  if (simulate->parsed())
    return run_guarded(
        [&] { return cmd_simulate(sim_args, sim_delta, sim_seed, sim_exact); });
  if (curvature->parsed())
    return run_guarded([&] { return cmd_curvature(curv_args); });
  if (closed_form->parsed())
    return run_guarded([&] { return cmd_closed_form_check(cf_args, cf_points); });
  return 2;  // unreachable: require_subcommand(1)
}
