#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace qvshrink {

/// Neumaier-compensated accumulator. Risk comparisons at p ~ 5000 need the
/// extra digits; plain left-to-right summation loses them.
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

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_total(const Eigen::Ref<const Eigen::VectorXd>& v) {
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc.add(v[i]);
  return acc.value();
}

inline double compensated_mean(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return compensated_total(v) / static_cast<double>(v.size());
}

}  // namespace qvshrink
