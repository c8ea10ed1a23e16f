#pragma once

#include <cmath>
#include <limits>

namespace corrnet::detail {

/// Neumaier compensated sum. Order-dependent like any float sum, so callers
/// keep a fixed accumulation order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void scale(double factor) {
    sum_ *= factor;
    comp_ *= factor;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Accumulates sum_i weight_i * exp(log_term_i) without overflow; the result
/// is returned in the log domain.
class LogSumAccumulator {
 public:
  void add(double log_term, double weight = 1.0) {
    if (log_term == -std::numeric_limits<double>::infinity() || weight == 0.0) return;
    if (log_term > max_) {
      if (max_ != -std::numeric_limits<double>::infinity()) sum_.scale(std::exp(max_ - log_term));
      max_ = log_term;
    }
    sum_.add(weight * std::exp(log_term - max_));
  }
  double log_value() const {
    if (max_ == -std::numeric_limits<double>::infinity()) return max_;
    return max_ + std::log(sum_.value());
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  CompensatedSum sum_;
};

}  // namespace corrnet::detail
