#include <cmath>

#include "doctest.h"
#include "rkl/operators.hpp"
#include "rkl/rng.hpp"
#include "support.hpp"

using namespace rkl;

TEST_CASE("far from the support the operator follows the leading term") {
  auto k = cosine_kernel(2);
  auto mu = disk_bump(2, 1.0, 1.0);
  Vec x{10.0, 0.0};
  double far = far_field_asymptotic(k, 0.0, mu, x);
  CHECK(far == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(principal_value(k, mu, x) == doctest::Approx(far).epsilon(0.01));
  CHECK(kind_of([&] { far_field_asymptotic(k, 0.0, mu, Vec{0.5, 0.0}); }) == ErrorKind::not_in_far_field);
}

TEST_CASE("x1/|x|^2 is harmonic, so a radial disk acts like a point mass outside") {
  auto k = cosine_kernel(2);
  auto mu = disk_bump(2, 1.0, 1.0);
  for (Vec x : {Vec{4.0, 0.0}, Vec{1.5, 0.7}, Vec{-2.0, 3.0}}) {
    double exact = x[0] / x.norm2();
    CHECK(fractional(k, 1.0, mu, x) == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("x1/|x|^3 is harmonic in R^3") {
  auto k = cosine_kernel(3);
  auto mu = disk_bump(3, 1.0, 1.0);
  Vec x{3.0, 1.0, -2.0};
  CHECK(fractional(k, 1.0, mu, x) == doctest::Approx(x[0] / std::pow(x.norm(), 3)).epsilon(1e-6));
  CHECK(far_field_asymptotic(k, 1.0, mu, Vec{10.0, 0.0, 0.0}) == doctest::Approx(0.01));
}

TEST_CASE("riesz-type potential of a uniform disk at its centre") {
  // integral over B(0,1) of (1/pi) |y|^{-1} dy = 2
  auto k = constant_kernel(2, 1.0);
  CHECK(fractional(k, 1.0, disk_bump(2, 1.0, 1.0), Vec{0.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-9));
  // and a tiny bump far away is a point mass
  CHECK(fractional(k, 1.0, disk_bump(2, 0.01, 1.0), Vec{5.0, 0.0}) == doctest::Approx(0.2).epsilon(1e-5));
}

TEST_CASE("odd kernels vanish at the centre of a radial measure") {
  auto mu = gaussian(2, 0.5, 4.0);
  for (const auto& k : {cosine_kernel(2), odd_harmonic_kernel(3)}) {
    CHECK(std::abs(principal_value(k, mu, Vec{0.0, 0.0})) < 1e-9);
  }
}

TEST_CASE("the operator is linear in the measure") {
  auto k = example22_kernel();
  auto a = disk_bump(2, 0.5, 1.0, Vec{1.0, 0.0});
  auto c = disk_bump(2, 0.5, -0.4, Vec{-3.0, 0.0});
  auto s = add(a, c);
  for (Vec x : {Vec{0.2, 0.3}, Vec{4.0, -1.0}, Vec{-3.1, 0.1}}) {
    double lhs = principal_value(k, s, x);
    double rhs = principal_value(k, a, x) + principal_value(k, c, x);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("truncation sweep agrees with the direct principal value") {
  auto mu = gaussian(2, 0.5, 4.0);
  for (const auto& k : {example22_kernel(), cosine_kernel(2)}) {
    Vec x{0.3, -0.2};
    auto pv = pv_singular(k, mu, x);
    double direct = principal_value(k, mu, x);
    // truncations drift linearly in eps here, so the value comes from extrapolation
    CHECK_FALSE(pv.converged);
    CHECK(pv.extrapolated);
    CHECK(pv.value == doctest::Approx(direct).epsilon(1e-10));
    CHECK(pv.sequence.size() == pv.epsilons.size());
  }
}

TEST_CASE("richardson extrapolation recovers a slowly converging sequence") {
  // three coarse truncations are far from the limit; extrapolation closes most of the gap
  auto k = cosine_kernel(2);
  auto mu = gaussian(2, 0.5, 4.0);
  Vec x{0.4, 0.1};
  TruncationSchedule s;
  s.epsilons = {0.2, 0.1, 0.05};
  s.extrapolation = Extrapolation::richardson;
  auto r = pv_singular(k, mu, x, s);
  double direct = principal_value(k, mu, x);
  double raw = r.sequence.back();
  CHECK(std::abs(r.value - direct) < std::abs(raw - direct));
  s.extrapolation = Extrapolation::none;
  auto n = pv_singular(k, mu, x, s);
  CHECK_FALSE(n.extrapolated);
}

TEST_CASE("principal value on a support boundary is refused") {
  auto k = cosine_kernel(2);
  auto mu = disk_bump(2, 1.0, 1.0);
  CHECK(kind_of([&] { principal_value(k, mu, Vec{1.0, 0.0}); }) == ErrorKind::no_convergence);
  // non mean-zero kernels diverge inside the support
  CHECK(kind_of([&] { principal_value(constant_kernel(2, 1.0), mu, Vec{0.2, 0.0}); }).has_value());
}

TEST_CASE("fractional order must lie in (0, n)") {
  auto k = cosine_kernel(2);
  auto mu = disk_bump(2, 1.0, 1.0);
  CHECK(kind_of([&] { fractional(k, 2.0, mu, Vec{3.0, 0.0}); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([&] { fractional(k, -0.5, mu, Vec{3.0, 0.0}); }) == ErrorKind::invalid_argument);
  TruncationSchedule bad;
  bad.epsilons = {0.1, 0.2};
  CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::invalid_argument);
}

TEST_CASE("truncations of a positive kernel increase towards the limit") {
  auto k = constant_kernel(2, 1.0);
  auto mu = disk_bump(2, 1.0, 1.0);
  OperatorEvaluator ev(k, 0.5, mu);
  Vec x{0.3, 0.2};
  double prev = 0.0;
  for (double eps : {0.5, 0.1, 0.01, 1e-3}) {
    double t = ev.truncated(x, eps);
    CHECK(t > prev);
    prev = t;
  }
  CHECK(prev < ev.value(x));
  // the remainder inside B(x, eps) is (1/pi) 2 pi eps^{1/2} / (1/2) = 4 eps^{1/2}
  CHECK(ev.value(x) - ev.truncated(x, 1e-3) == doctest::Approx(4 * std::sqrt(1e-3)).epsilon(1e-8));
}

TEST_CASE("dilation residuals vanish") {
  Rng rng(23);
  auto mu = add(gaussian(2, 0.5, 3.0), disk_bump(2, 0.4, -0.5, Vec{4.0, 1.0}));
  for (const auto& k : {example22_kernel(), cosine_kernel(2)}) {
    auto one = dilation_residual(k, 0.0, mu, 1.0, Vec{0.3, 0.4});
    CHECK(one.residual < 1e-12);
    for (int i = 0; i < 4; ++i) {
      double t = std::exp(2 * rng.uniform() - 1);
      Vec x{3 * rng.uniform() - 1, 3 * rng.uniform() - 1};
      CHECK(dilation_residual(k, 0.0, mu, t, x).relative < 1e-6);
      CHECK(dilation_residual(k, 0.7, mu, t, x).relative < 1e-6);
    }
  }
}
