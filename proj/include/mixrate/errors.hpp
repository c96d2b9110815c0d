#pragma once

#include <stdexcept>
#include <string>

namespace mixrate {

/* Base class for all domain errors thrown by the library.  Callers that
   only care about "something went wrong on the math side" can catch this;
   the derived types below give the precise failure mode. */
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/* A law kind cannot serve the requested functional (e.g. quantile
   inversion of a distribution with atoms). */
struct UnsupportedLaw : Error {
  explicit UnsupportedLaw(const std::string& what) : Error(what) {}
};

/* An iterative solver exhausted its budget without meeting tolerance. */
struct NonConvergence : Error {
  explicit NonConvergence(const std::string& what) : Error(what) {}
};

/* An exponential moment does not exist for the requested parameter. */
struct DivergentMoment : Error {
  explicit DivergentMoment(const std::string& what) : Error(what) {}
};

/* The risk measure has no evaluation path for the given component laws. */
struct UnsupportedCombination : Error {
  explicit UnsupportedCombination(const std::string& what) : Error(what) {}
};

/* The weight-linear constraint form does not exist for this measure/law
   combination, so the tilt machinery cannot be applied. */
struct ConditionUnsupported : Error {
  explicit ConditionUnsupported(const std::string& what) : Error(what) {}
};

/* A derivative was requested where none exists (atoms under quantiles). */
struct NonDifferentiable : Error {
  explicit NonDifferentiable(const std::string& what) : Error(what) {}
};

/* An operation defined only strictly inside the attainable-value interval
   was called on a boundary or exterior point. */
struct OutOfInterior : Error {
  explicit OutOfInterior(const std::string& what) : Error(what) {}
};

/* An operation defined only on the attainable-value interval was called
   outside of it. */
struct OutOfSupport : Error {
  explicit OutOfSupport(const std::string& what) : Error(what) {}
};

/* The problem collapses (all components share one attainable value), so
   the requested quantity is undefined. */
struct DegenerateProblem : Error {
  explicit DegenerateProblem(const std::string& what) : Error(what) {}
};

/* Support reduction removed every index; cannot happen for valid weights. */
struct EmptySupport : Error {
  explicit EmptySupport(const std::string& what) : Error(what) {}
};

/* Two vectors that must have equal length do not. */
struct LengthMismatch : Error {
  explicit LengthMismatch(const std::string& what) : Error(what) {}
};

/* Simulation produced data from which the requested estimate cannot be
   formed (e.g. a tail probability estimated as exactly zero). */
struct DegenerateData : Error {
  explicit DegenerateData(const std::string& what) : Error(what) {}
};

}  // namespace mixrate
