#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "emberline/dual.hpp"

using namespace emberline;

using D = Dual<6>;

TEST_CASE("lift_constant") {
  const D c = lift_constant<6>(3.5);
  CHECK(c.value == 3.5);
  for (double g : c.grad) CHECK(g == 0.0);

  // 0 is the additive identity
  const D x = lift_parameter<6>(2, 1.25);
  const D y = x + lift_constant<6>(0.0);
  CHECK(y.value == x.value);
  for (std::size_t i = 0; i < 6; ++i) CHECK(y.grad[i] == x.grad[i]);
}

TEST_CASE("lift_parameter seeds a unit gradient") {
  const D p = lift_parameter<6>(0, 0.3);
  CHECK(p.value == 0.3);
  CHECK(p.grad[0] == 1.0);
  for (std::size_t i = 1; i < 6; ++i) CHECK(p.grad[i] == 0.0);
  CHECK_THROWS_AS(lift_parameter<6>(6, 1.0), std::out_of_range);
}

TEST_CASE("product rule: constant times parameter") {
  const double a = 2.5;
  const double b = -0.75;
  const D prod = lift_constant<6>(a) * lift_parameter<6>(3, b);
  CHECK(prod.value == a * b);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(prod.grad[i] == (i == 3 ? a : 0.0));
  }
}

TEST_CASE("chain rule through exp, log, sin, cos") {
  using std::exp;
  const double x = 0.8;
  const D e = exp(lift_parameter<6>(1, x));
  CHECK(e.value == std::exp(x));
  CHECK(e.grad[1] == std::exp(x));

  const D c = cos(lift_parameter<6>(4, 0.0));
  CHECK(c.value == 1.0);
  CHECK(c.grad[4] == 0.0);

  const D s = sin(lift_parameter<6>(0, 0.3));
  CHECK(s.value == std::sin(0.3));
  CHECK(s.grad[0] == std::cos(0.3));

  const D l = log(lift_parameter<6>(2, 2.0));
  CHECK(l.value == std::log(2.0));
  CHECK(l.grad[2] == 0.5);
}

TEST_CASE("zero-grad dual arithmetic matches double arithmetic bitwise") {
  const double a = 0.37;
  const double b = 1.91;
  const double expect = std::exp(a * b) / (a + b) - std::log(b) * std::cos(a - b);
  const D da = lift_constant<6>(a);
  const D db = lift_constant<6>(b);
  const D got = exp(da * db) / (da + db) - log(db) * cos(da - db);
  CHECK(got.value == expect);
  for (double g : got.grad) CHECK(g == 0.0);
}

TEST_CASE("quotient and polynomial derivatives") {
  // d/dx (x*x + 2x) at 3 = 8
  const D x = lift_parameter<6>(0, 3.0);
  const D f = x * x + 2.0 * x;
  CHECK(f.value == 15.0);
  CHECK(f.grad[0] == 8.0);

  // d/dx (1/x) at 2 = -1/4
  const D inv = 1.0 / lift_parameter<6>(1, 2.0);
  CHECK(inv.value == 0.5);
  CHECK(inv.grad[1] == doctest::Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("division by a zero-valued dual is an error") {
  const D zero = lift_constant<6>(0.0);
  const D one = lift_constant<6>(1.0);
  CHECK_THROWS_AS(one / zero, std::domain_error);
  CHECK_THROWS_AS(1.0 / zero, std::domain_error);
  CHECK_THROWS_AS(one / 0.0, std::domain_error);
  D acc = one;
  CHECK_THROWS_AS(acc /= zero, std::domain_error);
}

TEST_CASE("min/max ties take the first argument's derivative") {
  using std::max;
  using std::min;
  const D a = lift_parameter<6>(0, 1.0);
  const D b = lift_parameter<6>(1, 1.0);
  const D mx = max(a, b);
  CHECK(mx.grad[0] == 1.0);
  CHECK(mx.grad[1] == 0.0);
  const D mn = min(a, b);
  CHECK(mn.grad[0] == 1.0);
  CHECK(mn.grad[1] == 0.0);

  // non-tie selects the larger/smaller value's branch
  const D lo = lift_parameter<6>(2, -1.0);
  const D hi = lift_parameter<6>(3, 2.0);
  CHECK(max(lo, hi).grad[3] == 1.0);
  CHECK(max(lo, hi).grad[2] == 0.0);
  CHECK(min(lo, hi).grad[2] == 1.0);
  CHECK(min(lo, hi).grad[3] == 0.0);
}

TEST_CASE("comparisons use the value part") {
  const D a = lift_parameter<6>(0, 1.0);
  const D b = lift_parameter<6>(1, 2.0);
  CHECK(a < b);
  CHECK(b > a);
  CHECK(a <= b);
  CHECK(a != b);
  CHECK(a == lift_parameter<6>(5, 1.0));  // equal values, different grads
  CHECK(a < 1.5);
  CHECK(b >= 2.0);
}

TEST_CASE("linearity of the gradient for lifted constants") {
  const double a = 2.0;
  const double b = -3.0;
  const D f = lift_parameter<6>(0, 0.7);
  const D g = lift_parameter<6>(1, 0.2);
  const D combo = lift_constant<6>(a) * f + lift_constant<6>(b) * g;
  CHECK(combo.grad[0] == a * f.grad[0]);
  CHECK(combo.grad[1] == b * g.grad[1]);
}

TEST_CASE("value_of helpers") {
  CHECK(value_of(2.5) == 2.5);
  CHECK(value_of(lift_parameter<6>(0, 2.5)) == 2.5);
}
