#pragma once

#include <cmath>
#include <complex>

namespace dirup {

/// Neumaier's variant of Kahan summation.
template <typename Scalar>
class CompensatedSum {
 public:
  CompensatedSum() = default;

  void add(Scalar x) {
    const Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(Scalar x) {
    add(x);
    return *this;
  }

  Scalar value() const { return sum_ + comp_; }

 private:
  Scalar sum_{0};
  Scalar comp_{0};
};

template <typename Scalar>
class CompensatedSum<std::complex<Scalar>> {
 public:
  void add(const std::complex<Scalar>& x) {
    re_.add(x.real());
    im_.add(x.imag());
  }

  CompensatedSum& operator+=(const std::complex<Scalar>& x) {
    add(x);
    return *this;
  }

  std::complex<Scalar> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum<Scalar> re_;
  CompensatedSum<Scalar> im_;
};

}  // namespace dirup
