#include <cmath>

#include "doctest.h"
#include "rkl/error.hpp"
#include "rkl/rng.hpp"
#include "rkl/sphere.hpp"

using namespace rkl;

TEST_CASE("directions renormalize small drift and reject the rest") {
  Direction d(Vec{0.6, 0.8 + 1e-9});
  CHECK(d.vec().norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(Direction(Vec{0.6, 0.9}), Error);
  CHECK_THROWS_AS(Direction(Vec{1.0}), Error);
  CHECK(Direction::from_angle(kPi / 2).angle() == doctest::Approx(kPi / 2));
  // the arc-length convention puts (1, 0) at 2pi, not 0
  CHECK(Direction(Vec{1.0, 0.0}).angle() == doctest::Approx(kTwoPi));
}

TEST_CASE("rotations: validation, composition, inverse") {
  CHECK_THROWS_AS(Rotation::from_matrix(2, {1, 0, 0, -1}), Error);  // reflection
  CHECK_THROWS_AS(Rotation::from_matrix(2, {1, 0.1, 0, 1}), Error);
  CHECK_THROWS_AS(Rotation::identity(5), Error);
  Rotation a = Rotation::planar(0.4), b = Rotation::planar(1.1);
  CHECK(a.compose(b).angle() == doctest::Approx(1.5));
  CHECK(a.compose(a.inverse()).angle() == doctest::Approx(0.0).epsilon(1e-15));
  Rotation z = Rotation::axis_angle(Direction(Vec{0, 0, 1}), kPi / 2);
  Vec v = z.apply(Vec{1, 0, 0});
  CHECK(v[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(v[1] == doctest::Approx(1.0));
  Rotation m = Rotation::from_matrix(3, {0, -1, 0, 1, 0, 0, 0, 0, 1});
  CHECK(m.apply(Vec{1, 0, 0})[1] == doctest::Approx(1.0));
}

TEST_CASE("rotation norm equals the chord 2 sin(s/2) in the plane and in space") {
  for (double s : {1e-3, 0.1, 1.0, 3.0}) {
    CHECK(rotation_norm(Rotation::planar(s)) == doctest::Approx(2 * std::sin(s / 2)).epsilon(1e-12));
    Rotation r = Rotation::axis_angle(Direction(Vec{1, 2, 2} * (1.0 / 3.0)), s);
    CHECK(rotation_norm(r) == doctest::Approx(2 * std::sin(s / 2)).epsilon(1e-9));
  }
}

TEST_CASE("sphere quadrature integrates low-degree polynomials") {
  for (int n = 2; n <= 4; ++n) {
    const SphericalQuadrature& q = default_quadrature(n);
    CHECK(integrate(q, [](const Vec&) { return 1.0; }) == doctest::Approx(sphere_area(n)).epsilon(1e-12));
    // integral of x_1^2 is area / n; x_1^4 is 3 area / (n (n + 2))
    CHECK(integrate(q, [](const Vec& u) { return u[0] * u[0]; }) ==
          doctest::Approx(sphere_area(n) / n).epsilon(1e-12));
    CHECK(integrate(q, [n](const Vec& u) { return std::pow(u[n - 1], 4); }) ==
          doctest::Approx(3 * sphere_area(n) / (n * (n + 2))).epsilon(1e-12));
    CHECK(std::abs(integrate(q, [](const Vec& u) { return u[0] * u[1]; })) < 1e-13);
  }
  CHECK_THROWS_AS(quad_sphere(5), Error);
}

TEST_CASE("quadrature nodes lie on the sphere") {
  for (int n = 2; n <= 4; ++n)
    for (const Vec& v : default_quadrature(n).nodes) CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("circle quadrature handles |cos| without losing accuracy") {
  const SphericalQuadrature& q = default_quadrature(2);
  CHECK(integrate(q, [](const Vec& u) { return std::abs(u[0]); }) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("integrate reports the node of a non-finite sample") {
  const SphericalQuadrature& q = default_quadrature(3);
  try {
    integrate(q, [](const Vec& u) { return u[2] > 0.9 ? INFINITY : 0.0; });
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(e.point().size() == 3);
    CHECK(e.point()[2] > 0.9);
  }
}

TEST_CASE("rotating a direction keeps it on the sphere") {
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    Direction d(rng.unit_vector(3));
    Direction axis(rng.unit_vector(3));
    Direction r = apply_rotation(Rotation::axis_angle(axis, 6 * rng.uniform()), d);
    CHECK(r.vec().norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
}
