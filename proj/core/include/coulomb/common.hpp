#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace coulomb {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Precondition violation or unsupported input.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical result could not be trusted (conditioning, resolution).
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Compensated (Neumaier) summation.
template <class T>
class KahanSum {
 public:
  KahanSum() = default;
  explicit KahanSum(T init) : sum_(init) {}

  void add(T x) {
    T t = sum_ + x;
    if constexpr (std::is_same_v<T, double>) {
      if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
      else
        comp_ += (x - t) + sum_;
    } else {
      comp_.real(comp_.real() + neumaier(sum_.real(), x.real(), t.real()));
      comp_.imag(comp_.imag() + neumaier(sum_.imag(), x.imag(), t.imag()));
    }
    sum_ = t;
  }
  KahanSum& operator+=(T x) {
    add(x);
    return *this;
  }
  T value() const { return sum_ + comp_; }

 private:
  static double neumaier(double s, double x, double t) {
    return std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
  }
  T sum_{};
  T comp_{};
};

}  // namespace coulomb
