#include "mixrate/config.hpp"

#include <stdexcept>

namespace mixrate {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config error at " + path + ": " + what);
}

double need_number(const json& doc, const std::string& key, const std::string& path) {
  if (!doc.contains(key) || !doc[key].is_number())
    fail(path + "." + key, "expected a number");
  return doc[key].get<double>();
}

std::string need_string(const json& doc, const std::string& key,
                        const std::string& path) {
  if (!doc.contains(key) || !doc[key].is_string())
    fail(path + "." + key, "expected a string");
  return doc[key].get<std::string>();
}

std::vector<double> need_number_array(const json& doc, const std::string& key,
                                      const std::string& path) {
  if (!doc.contains(key) || !doc[key].is_array())
    fail(path + "." + key, "expected an array of numbers");
  std::vector<double> values;
  for (const json& v : doc[key]) {
    if (!v.is_number()) fail(path + "." + key, "expected an array of numbers");
    values.push_back(v.get<double>());
  }
  return values;
}

LossFunction parse_loss(const json& doc, const std::string& path) {
  if (!doc.is_object()) fail(path, "expected an object");
  std::string kind = need_string(doc, "kind", path);
  if (kind == "exponential")
    return LossFunction::exponential(need_number(doc, "theta", path));
  if (kind == "piecewise_linear")
    return LossFunction::piecewise_linear(
        need_number_array(doc, "knots", path),
        need_number_array(doc, "slopes", path),
        need_number(doc, "value_at_first_knot", path));
  fail(path + ".kind", "unknown loss kind '" + kind + "'");
}

}  // namespace

Law parse_law(const json& doc) {
  const std::string path = "components[]";
  if (!doc.is_object()) fail(path, "expected an object");
  std::string kind = need_string(doc, "kind", path);
  if (kind == "exponential") return Law::exponential(need_number(doc, "rate", path));
  if (kind == "gaussian")
    return Law::gaussian(need_number(doc, "mean", path),
                         need_number(doc, "stdev", path));
  if (kind == "point_mass")
    return Law::point_mass(need_number(doc, "location", path));
  if (kind == "finite_discrete")
    return Law::finite_discrete(need_number_array(doc, "atoms", path),
                                need_number_array(doc, "probs", path));
  fail(path + ".kind", "unknown law kind '" + kind + "'");
}

RiskMeasureSpec parse_risk_measure(const json& doc) {
  const std::string path = "risk_measure";
  if (!doc.is_object()) fail(path, "expected an object");
  std::string kind = need_string(doc, "kind", path);
  if (kind == "mean") return RiskMeasureSpec::mean();
  if (kind == "quantile")
    return RiskMeasureSpec::quantile(need_number(doc, "alpha", path));
  if (kind == "expected_shortfall")
    return RiskMeasureSpec::expected_shortfall(need_number(doc, "alpha", path));
  if (kind == "entropic")
    return RiskMeasureSpec::entropic(need_number(doc, "theta", path));
  if (kind == "shortfall") {
    if (!doc.contains("loss")) fail(path + ".loss", "missing loss object");
    return RiskMeasureSpec::shortfall(parse_loss(doc["loss"], path + ".loss"),
                                      need_number(doc, "threshold", path));
  }
  fail(path + ".kind", "unknown risk measure kind '" + kind + "'");
}

ProblemConfig parse_problem_config(const json& doc) {
  if (!doc.is_object()) fail("$", "expected a top-level object");
  if (!doc.contains("risk_measure")) fail("risk_measure", "missing");
  if (!doc.contains("components") || !doc["components"].is_array() ||
      doc["components"].empty())
    fail("components", "expected a nonempty array");

  std::vector<Law> components;
  for (const json& c : doc["components"]) components.push_back(parse_law(c));

  std::vector<double> weights = need_number_array(doc, "weights", "$");
  if (weights.size() != components.size())
    fail("weights", "length differs from components");

  ProblemConfig config{parse_risk_measure(doc["risk_measure"]),
                       std::move(components),
                       SimplexVector(std::move(weights)),
                       {},
                       {},
                       {}};

  if (doc.contains("rate_curve")) {
    const json& rc = doc["rate_curve"];
    if (!rc.is_object()) fail("rate_curve", "expected an object");
    if (rc.contains("r_min") || rc.contains("r_max")) {
      config.rate_curve.r_min = need_number(rc, "r_min", "rate_curve");
      config.rate_curve.r_max = need_number(rc, "r_max", "rate_curve");
      config.rate_curve.has_range = true;
      if (!(config.rate_curve.r_min < config.rate_curve.r_max))
        fail("rate_curve", "r_min must be below r_max");
    }
    if (rc.contains("points"))
      config.rate_curve.points = static_cast<int>(need_number(rc, "points", "rate_curve"));
    if (config.rate_curve.points < 2) fail("rate_curve.points", "must be at least 2");
  }

  if (doc.contains("oracle")) {
    const json& oc = doc["oracle"];
    if (!oc.is_object()) fail("oracle", "expected an object");
    if (oc.contains("m"))
      config.oracle.m = static_cast<int>(need_number(oc, "m", "oracle"));
    if (oc.contains("points"))
      config.oracle.points = static_cast<int>(need_number(oc, "points", "oracle"));
    if (config.oracle.m < 1) fail("oracle.m", "must be at least 1");
    if (config.oracle.points < 1) fail("oracle.points", "must be at least 1");
  }

  if (doc.contains("simulate")) {
    const json& sc = doc["simulate"];
    if (!sc.is_object()) fail("simulate", "expected an object");
    if (sc.contains("delta"))
      config.simulate.delta = need_number(sc, "delta", "simulate");
    if (sc.contains("n_grid")) {
      config.simulate.n_grid.clear();
      for (double v : need_number_array(sc, "n_grid", "simulate"))
        config.simulate.n_grid.push_back(static_cast<long>(v));
    }
    if (sc.contains("replicas"))
      config.simulate.replicas = static_cast<long>(need_number(sc, "replicas", "simulate"));
    if (sc.contains("seed"))
      config.simulate.seed =
          static_cast<std::uint64_t>(need_number(sc, "seed", "simulate"));
    if (sc.contains("exact_binomial")) {
      if (!sc["exact_binomial"].is_boolean())
        fail("simulate.exact_binomial", "expected a boolean");
      config.simulate.exact_binomial = sc["exact_binomial"].get<bool>();
    }
  }

  return config;
}

json law_to_json(const Law& law) {
  switch (law.kind()) {
    case LawKind::Exponential:
      return {{"kind", "exponential"}, {"rate", law.rate()}};
    case LawKind::Gaussian:
      return {{"kind", "gaussian"}, {"mean", law.gauss_mean()},
              {"stdev", law.gauss_stdev()}};
    case LawKind::PointMass:
      return {{"kind", "point_mass"}, {"location", law.location()}};
    case LawKind::FiniteDiscrete:
      return {{"kind", "finite_discrete"}, {"atoms", law.atoms()},
              {"probs", law.atom_probs()}};
  }
  return {};
}

json risk_measure_to_json(const RiskMeasureSpec& rho) {
  switch (rho.kind()) {
    case RiskKind::Mean:
      return {{"kind", "mean"}};
    case RiskKind::Quantile:
      return {{"kind", "quantile"}, {"alpha", rho.alpha()}};
    case RiskKind::ExpectedShortfall:
      return {{"kind", "expected_shortfall"}, {"alpha", rho.alpha()}};
    case RiskKind::Entropic:
      return {{"kind", "entropic"}, {"theta", rho.theta()}};
    case RiskKind::Shortfall: {
      json loss;
      if (rho.loss().kind() == LossFunction::Kind::Exponential) {
        loss = {{"kind", "exponential"}, {"theta", rho.loss().theta()}};
      } else {
        const LossFunction& l = rho.loss();
        loss = {{"kind", "piecewise_linear"},
                {"knots", l.knots()},
                {"slopes", l.segment_slopes()},
                {"value_at_first_knot", l(l.knots().front())}};
      }
      return {{"kind", "shortfall"}, {"threshold", rho.threshold()},
              {"loss", loss}};
    }
  }
  return {};
}

json problem_echo(const ProblemConfig& config) {
  json components = json::array();
  for (const Law& law : config.components) components.push_back(law_to_json(law));
  return {{"risk_measure", risk_measure_to_json(config.risk_measure)},
          {"components", components},
          {"weights", config.weights.values()}};
}

}  // namespace mixrate
