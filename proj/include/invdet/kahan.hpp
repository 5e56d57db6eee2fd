#pragma once

#include <complex>

namespace invdet {

// Kahan compensated accumulator. Term counts grow combinatorially in the
// series evaluations, so plain summation would drift.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// Complex accumulator compensating real and imaginary parts independently.
class KahanComplex {
 public:
  void add(std::complex<double> z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  KahanSum re_;
  KahanSum im_;
};

}  // namespace invdet
