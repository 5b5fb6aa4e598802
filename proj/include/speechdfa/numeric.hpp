#pragma once

#include <cmath>
#include <vector>

namespace speechdfa {

// Neumaier compensated accumulator. Long sums (profiles over 10^5+ samples,
// residual totals) stay accurate to ~1 ulp independent of operand magnitudes,
// which keeps results reproducible to the 1e-12 level the fit tolerances need.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Median of a copy of `values` (even count averages the middle pair).
// Throws speechdfa::Error on empty input.
double median(std::vector<double> values);

}  // namespace speechdfa
