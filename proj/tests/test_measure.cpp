#include <cmath>
#include <vector>

#include "doctest.h"
#include "rkl/measure.hpp"
#include "rkl/rng.hpp"
#include "support.hpp"

using namespace rkl;

namespace {

// area of the intersection of two disks with radii a, b and centres d apart
double lens_area(double a, double b, double d) {
  if (d >= a + b) return 0.0;
  if (d <= std::abs(a - b)) return kPi * std::min(a, b) * std::min(a, b);
  double p = a * a * std::acos((d * d + a * a - b * b) / (2 * d * a));
  double q = b * b * std::acos((d * d + b * b - a * a) / (2 * d * b));
  double r = 0.5 * std::sqrt((-d + a + b) * (d + a - b) * (d - a + b) * (d + a + b));
  return p + q - r;
}

}  // namespace

TEST_CASE("ray segments through a ball with a hole") {
  std::vector<Ball> c{{Vec{2.0, 0.0}, 1.0, true}};
  auto s = ray_segments(Vec{0.0, 0.0}, Vec{1.0, 0.0}, c, 10.0);
  REQUIRE(s.size() == 1);
  CHECK(s[0].lo == doctest::Approx(1.0));
  CHECK(s[0].hi == doctest::Approx(3.0));
  c.push_back({Vec{2.0, 0.0}, 0.5, false});
  s = ray_segments(Vec{0.0, 0.0}, Vec{1.0, 0.0}, c, 10.0);
  REQUIRE(s.size() == 2);
  CHECK(s[0].hi == doctest::Approx(1.5));
  CHECK(s[1].lo == doctest::Approx(2.5));
  // truncated by rmax and missing entirely
  CHECK(ray_segments(Vec{0.0, 0.0}, Vec{1.0, 0.0}, c, 1.2)[0].hi == doctest::Approx(1.2));
  CHECK(ray_segments(Vec{0.0, 0.0}, Vec{0.0, 1.0}, c, 10.0).empty());
}

TEST_CASE("tangent angles from a point outside a disk") {
  auto t = tangent_angles(Vec{0.0, 0.0}, Vec{2.0, 0.0}, 1.0);
  REQUIRE(t.size() == 2);
  for (double a : t) CHECK(std::abs(std::sin(a)) == doctest::Approx(0.5));
  CHECK(tangent_angles(Vec{2.0, 0.5}, Vec{2.0, 0.0}, 1.0).empty());
}

TEST_CASE("disk bump and gaussian masses") {
  auto d = disk_bump(2, 1.0, 1.0);
  CHECK(d.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.radial_cdf(0.5) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(radius_for_mass(d, 0.25) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(disk_bump(3, 1.0, 1.0).radial_cdf(0.5) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(disk_bump(4, 2.0, 3.0).total_variation() == doctest::Approx(3.0).epsilon(1e-14));

  auto g = gaussian(2, 1.0, 8.0);
  CHECK(g.total_variation() == doctest::Approx(1.0 - std::exp(-32.0)).epsilon(1e-14));
  CHECK(radius_for_mass(g, 0.5) == doctest::Approx(std::sqrt(2 * std::log(2.0))).epsilon(1e-10));
  // in R^3 the cdf of a standard gaussian is erf(r/sqrt2) - sqrt(2/pi) r e^{-r^2/2}
  auto g3 = gaussian(3, 1.0, 9.0);
  double r = 1.3;
  CHECK(g3.radial_cdf(r) ==
        doctest::Approx(std::erf(r / std::sqrt(2.0)) - std::sqrt(2 / kPi) * r * std::exp(-r * r / 2)).epsilon(1e-12));
}

TEST_CASE("an off-centre disk cut by a ball gives the lens area") {
  auto d = disk_bump(2, 1.0, kPi, Vec{3.0, 0.0});  // unit density
  for (double R : {2.2, 2.7, 3.0, 3.5}) {
    CHECK(d.integrate_ball(Ball{Vec{0.0, 0.0}, R, true}, true) == doctest::Approx(lens_area(1.0, R, 3.0)).epsilon(1e-9));
    CHECK(d.radial_cdf(R) == doctest::Approx(lens_area(1.0, R, 3.0)).epsilon(1e-9));
  }
}

TEST_CASE("dilation moves mass between balls") {
  Rng rng(17);
  auto mu = add(gaussian(2, 0.5, 3.0), disk_bump(2, 0.5, -0.7, Vec{4.0, 1.0}));
  for (double t : {0.3, 1.0, 2.5}) {
    auto mt = scale(mu, t);
    CHECK(mt.total_mass() == doctest::Approx(mu.total_mass()).epsilon(1e-12));
    for (int i = 0; i < 10; ++i) {
      Vec c{8 * rng.uniform() - 2, 4 * rng.uniform() - 2};
      double rad = 0.2 + 3 * rng.uniform();
      double lhs = mt.integrate_ball(Ball{c * t, rad * t, true}, true);
      double rhs = mu.integrate_ball(Ball{c, rad, true}, true);
      CHECK(std::abs(lhs - rhs) < 1e-8);
      CHECK(mt.density(c * t) == doctest::Approx(mu.density(c) / (t * t)).epsilon(1e-12));
    }
  }
}

TEST_CASE("splitting at a radius preserves the total") {
  auto mu = gaussian(2, 1.0, 6.0);
  for (double R : {0.5, 1.0, 3.0}) {
    auto s = split_at_radius(mu, R);
    CHECK(s.inner.total_variation() == doctest::Approx(mu.radial_cdf(R)).epsilon(1e-10));
    CHECK(s.inner.total_variation() + s.outer.total_variation() ==
          doctest::Approx(mu.total_variation()).epsilon(1e-12));
    CHECK(s.outer.density(Vec{R * 0.5, 0.0}) == 0.0);
    CHECK(s.inner.density(Vec{R * 0.5, 0.0}) == doctest::Approx(mu.density(Vec{R * 0.5, 0.0})));
  }
  auto off = disk_bump(2, 1.0, 1.0, Vec{3.0, 0.0});
  auto s = split_at_radius(off, 3.0);
  CHECK(s.inner.total_mass() + s.outer.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("dipoles cancel in mass but not in variation") {
  auto d = dipole(2, 2.0, 0.5, 1.0);
  CHECK(d.total_mass() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(d.total_variation() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(d.density(Vec{2.0, 0.0}) > 0.0);
  CHECK(d.density(Vec{-2.0, 0.0}) < 0.0);
  CHECK(kind_of([] { dipole(2, 0.3, 0.5, 1.0); }) == ErrorKind::invalid_argument);
}

TEST_CASE("custom densities are integrated numerically") {
  // |x_1| on the unit disk has mass 4/3
  auto c = custom_density(2, [](const Vec& y) { return std::abs(y[0]); }, 1.0);
  CHECK(c.total_mass() == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
  CHECK(scale(c, 2.0).total_mass() == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
  CHECK(c.radial_cdf(0.5) == doctest::Approx(4.0 / 3.0 / 8.0).epsilon(1e-9));
}

TEST_CASE("catalog names") {
  CHECK(measure_from_name("disk_bump(1, 2)").total_mass() == doctest::Approx(2.0));
  CHECK(measure_from_name("dipole(2, 0.5, 1)").total_variation() == doctest::Approx(2.0));
  CHECK(measure_from_name("gaussian(1, 8)", 3).dim() == 3);
  CHECK(kind_of([] { measure_from_name("disk_bump(1)"); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([] { measure_from_name("blob(1, 2)"); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([] { measure_from_name("disk_bump(1, x)"); }) == ErrorKind::invalid_argument);
}

TEST_CASE("invalid measures") {
  CHECK(kind_of([] { disk_bump(2, 0.0, 1.0); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([] { disk_bump(5, 1.0, 1.0); }) == ErrorKind::unsupported_dimension);
  CHECK(kind_of([] { gaussian(2, -1.0, 3.0); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([] { scale(disk_bump(2, 1.0, 1.0), 0.0); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([] { radius_for_mass(disk_bump(2, 1.0, 1.0), 1.5); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([] { add(disk_bump(2, 1.0, 1.0), disk_bump(2, 1.0, -1.0)); }) == ErrorKind::invalid_argument);
  auto z = zero_measure(2);
  CHECK(z.total_variation() == 0.0);
  CHECK(z.density(Vec{0.0, 0.0}) == 0.0);
}
