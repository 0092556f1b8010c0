// Forward-mode automatic differentiation over a fixed-size parameter vector.
// A Dual carries a value plus its partial derivatives with respect to the N
// calibration parameters; arithmetic propagates both.
//
// Conventions:
//   - comparisons act on value parts only
//   - min/max take the derivative of the selected branch; ties select the
//     first argument
//   - division by a scalar whose value is exactly 0 is an error rather than
//     infinity propagation
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace emberline {

template <std::size_t N>
struct Dual {
  double value = 0.0;
  std::array<double, N> grad{};

  Dual() = default;
  Dual(double v) : value(v) {}  // NOLINT: implicit lift of constants
  Dual(double v, const std::array<double, N>& g) : value(v), grad(g) {}

  static Dual constant(double x) { return Dual(x); }
  static Dual parameter(std::size_t i, double x) {
    if (i >= N) {
      throw std::out_of_range("Dual::parameter: index " + std::to_string(i) +
                              " out of range for " + std::to_string(N) + " parameters");
    }
    Dual d(x);
    d.grad[i] = 1.0;
    return d;
  }

  Dual operator-() const {
    Dual r(-value);
    for (std::size_t i = 0; i < N; ++i) r.grad[i] = -grad[i];
    return r;
  }

  Dual& operator+=(const Dual& o) {
    value += o.value;
    for (std::size_t i = 0; i < N; ++i) grad[i] += o.grad[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    value -= o.value;
    for (std::size_t i = 0; i < N; ++i) grad[i] -= o.grad[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (std::size_t i = 0; i < N; ++i) grad[i] = grad[i] * o.value + value * o.grad[i];
    value *= o.value;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    if (o.value == 0.0) throw std::domain_error("Dual: division by scalar with value 0");
    for (std::size_t i = 0; i < N; ++i) {
      grad[i] = (grad[i] * o.value - value * o.grad[i]) / (o.value * o.value);
    }
    value /= o.value;
    return *this;
  }
};

template <std::size_t N>
Dual<N> lift_constant(double x) {
  return Dual<N>(x);
}

template <std::size_t N>
Dual<N> lift_parameter(std::size_t i, double x) {
  return Dual<N>::parameter(i, x);
}

inline double value_of(double x) { return x; }
template <std::size_t N>
double value_of(const Dual<N>& d) {
  return d.value;
}

template <std::size_t N>
Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <std::size_t N>
Dual<N> operator+(Dual<N> a, double b) { a.value += b; return a; }
template <std::size_t N>
Dual<N> operator+(double a, Dual<N> b) { b.value += a; return b; }

template <std::size_t N>
Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <std::size_t N>
Dual<N> operator-(Dual<N> a, double b) { a.value -= b; return a; }
template <std::size_t N>
Dual<N> operator-(double a, const Dual<N>& b) {
  Dual<N> r(a - b.value);
  for (std::size_t i = 0; i < N; ++i) r.grad[i] = -b.grad[i];
  return r;
}

template <std::size_t N>
Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <std::size_t N>
Dual<N> operator*(Dual<N> a, double b) {
  a.value *= b;
  for (std::size_t i = 0; i < N; ++i) a.grad[i] *= b;
  return a;
}
template <std::size_t N>
Dual<N> operator*(double a, Dual<N> b) { return b * a; }

template <std::size_t N>
Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }
template <std::size_t N>
Dual<N> operator/(Dual<N> a, double b) {
  if (b == 0.0) throw std::domain_error("Dual: division by scalar with value 0");
  a.value /= b;
  for (std::size_t i = 0; i < N; ++i) a.grad[i] /= b;
  return a;
}
template <std::size_t N>
Dual<N> operator/(double a, const Dual<N>& b) { return Dual<N>(a) / b; }

template <std::size_t N>
bool operator==(const Dual<N>& a, const Dual<N>& b) { return a.value == b.value; }
template <std::size_t N>
bool operator==(const Dual<N>& a, double b) { return a.value == b; }
template <std::size_t N>
bool operator==(double a, const Dual<N>& b) { return a == b.value; }
template <std::size_t N>
bool operator!=(const Dual<N>& a, const Dual<N>& b) { return a.value != b.value; }
template <std::size_t N>
bool operator<(const Dual<N>& a, const Dual<N>& b) { return a.value < b.value; }
template <std::size_t N>
bool operator<(const Dual<N>& a, double b) { return a.value < b; }
template <std::size_t N>
bool operator<(double a, const Dual<N>& b) { return a < b.value; }
template <std::size_t N>
bool operator>(const Dual<N>& a, const Dual<N>& b) { return a.value > b.value; }
template <std::size_t N>
bool operator>(const Dual<N>& a, double b) { return a.value > b; }
template <std::size_t N>
bool operator>(double a, const Dual<N>& b) { return a > b.value; }
template <std::size_t N>
bool operator<=(const Dual<N>& a, const Dual<N>& b) { return a.value <= b.value; }
template <std::size_t N>
bool operator<=(const Dual<N>& a, double b) { return a.value <= b; }
template <std::size_t N>
bool operator>=(const Dual<N>& a, const Dual<N>& b) { return a.value >= b.value; }
template <std::size_t N>
bool operator>=(const Dual<N>& a, double b) { return a.value >= b; }

template <std::size_t N>
Dual<N> exp(const Dual<N>& a) {
  Dual<N> r(std::exp(a.value));
  for (std::size_t i = 0; i < N; ++i) r.grad[i] = r.value * a.grad[i];
  return r;
}

template <std::size_t N>
Dual<N> log(const Dual<N>& a) {
  Dual<N> r(std::log(a.value));
  for (std::size_t i = 0; i < N; ++i) r.grad[i] = a.grad[i] / a.value;
  return r;
}

template <std::size_t N>
Dual<N> sin(const Dual<N>& a) {
  Dual<N> r(std::sin(a.value));
  const double c = std::cos(a.value);
  for (std::size_t i = 0; i < N; ++i) r.grad[i] = c * a.grad[i];
  return r;
}

template <std::size_t N>
Dual<N> cos(const Dual<N>& a) {
  Dual<N> r(std::cos(a.value));
  const double s = -std::sin(a.value);
  for (std::size_t i = 0; i < N; ++i) r.grad[i] = s * a.grad[i];
  return r;
}

// Branch selection: ties take the first argument's derivative.
template <std::size_t N>
Dual<N> max(const Dual<N>& a, const Dual<N>& b) { return a.value >= b.value ? a : b; }
template <std::size_t N>
Dual<N> max(const Dual<N>& a, double b) { return a.value >= b ? a : Dual<N>(b); }
template <std::size_t N>
Dual<N> max(double a, const Dual<N>& b) { return a >= b.value ? Dual<N>(a) : b; }
template <std::size_t N>
Dual<N> min(const Dual<N>& a, const Dual<N>& b) { return a.value <= b.value ? a : b; }
template <std::size_t N>
Dual<N> min(const Dual<N>& a, double b) { return a.value <= b ? a : Dual<N>(b); }
template <std::size_t N>
Dual<N> min(double a, const Dual<N>& b) { return a <= b.value ? Dual<N>(a) : b; }

}  // namespace emberline
