#pragma once

#include <cmath>
#include <complex>

namespace mcshane {

// Neumaier-compensated accumulator. The result depends only on the order of
// add() calls, so a fixed term order gives bitwise-reproducible sums.
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

  double get() const { return sum_ + comp_; }

 private:
  double sum_ = 0;
  double comp_ = 0;
};

class CompensatedComplexSum {
 public:
  void add(std::complex<double> v) {
    re_.add(v.real());
    im_.add(v.imag());
  }

  std::complex<double> get() const { return {re_.get(), im_.get()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

}  // namespace mcshane
