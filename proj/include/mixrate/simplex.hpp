#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mixrate {

/* Nonnegative weights summing to one.  Used both for the true mixture
   weights and for candidate/empirical weight vectors.  Validated on
   construction: every entry >= 0 and |sum - 1| <= sum_tolerance. */
class SimplexVector {
 public:
  static constexpr double sum_tolerance = 1e-12;

  explicit SimplexVector(std::vector<double> weights)
      : weights_(std::move(weights)) {
    if (weights_.empty())
      throw std::invalid_argument("simplex vector must have at least one entry");
    double sum = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0))
        throw std::invalid_argument("simplex entries must be nonnegative, got " +
                                    std::to_string(w));
      sum += w;
    }
    if (std::abs(sum - 1.0) > sum_tolerance)
      throw std::invalid_argument("simplex entries must sum to one, got " +
                                  std::to_string(sum));
  }

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<double>& values() const { return weights_; }

  bool operator==(const SimplexVector& other) const {
    return weights_ == other.weights_;
  }

 private:
  std::vector<double> weights_;
};

}  // namespace mixrate
