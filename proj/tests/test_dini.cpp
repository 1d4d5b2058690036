#include <cmath>
#include <limits>
#include <string>

#include "doctest.h"
#include "rkl/dini.hpp"
#include "rkl/error.hpp"
#include "rkl/kernel.hpp"
#include "support.hpp"

using namespace rkl;

namespace {

ModulusCurve power_curve(double c, double beta, double lo, int count) {
  ModulusCurve m;
  m.kind = ModulusKind::translation;
  m.deltas = log_grid(lo, 1.0, count);
  for (double d : m.deltas) m.values.push_back(c * std::pow(d, beta));
  return m;
}

}  // namespace

TEST_CASE("rotation integral of the rough example matches the closed form") {
  auto k = example22_kernel();
  for (double s : {1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0, 3.0}) {
    CHECK(rotation_integral(k, s) == doctest::Approx(example22_g(s)).epsilon(1e-9));
  }
  // g behaves like 4 s^{1/2} near zero
  CHECK(example22_g(1e-8) / std::sqrt(1e-8) == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("cosine moduli are linear") {
  auto k = cosine_kernel(2);
  for (double s : {1e-3, 0.1, 1.0}) CHECK(rotation_integral(k, s) == doctest::Approx(8 * std::sin(s / 2)).epsilon(1e-10));
  for (double d : {1e-3, 1e-2, 0.3}) CHECK(rotation_modulus(k, d) == doctest::Approx(4 * d).epsilon(1e-9));
}

TEST_CASE("extreme angle inverts the chord") {
  for (double d : {1e-6, 0.1, 1.0, 1.9}) CHECK(2 * std::sin(extreme_angle(d) / 2) == doctest::Approx(d).epsilon(1e-14));
  CHECK(extreme_angle(2.5) == doctest::Approx(kPi));
}

TEST_CASE("rough example modulus follows the closed form at the extreme angle") {
  auto k = example22_kernel();
  for (double d : {1e-3, 1e-2, 1e-1}) {
    CHECK(rotation_modulus(k, d) == doctest::Approx(example22_g(extreme_angle(d))).epsilon(1e-9));
  }
}

TEST_CASE("regularity ratio of the rough example decays like delta^{-1/2}") {
  auto k = example22_kernel();
  double r1 = regularity_ratio(k, 1e-3, 16), r2 = regularity_ratio(k, 1e-2, 16);
  double slope = std::log(r2 / r1) / std::log(10.0);
  CHECK(slope == doctest::Approx(-0.5).epsilon(0.1));
  // the cosine kernel stays bounded
  auto c = cosine_kernel(2);
  double a = regularity_ratio(c, 1e-3, 16), b = regularity_ratio(c, 1e-1, 16);
  CHECK(a < 1.0);
  CHECK(b < 1.0);
  CHECK(a / b == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("dini integral of a pure power law is c / (beta - alpha)") {
  auto m = power_curve(3.0, 0.5, 1e-4, 33);
  auto r = dini_integral(m, 0.0, 1e-4);
  CHECK(r.beta == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.coeff == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.value == doctest::Approx(6.0).epsilon(1e-12));
  CHECK_FALSE(r.tail_diverging);
  auto ra = dini_integral(m, 0.25, 1e-4);
  CHECK(ra.value == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(dini_integral(m, 0.0, 1e-6).value == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("a modulus too flat near zero has a diverging dini tail") {
  auto m = power_curve(1.0, 0.005, 1e-4, 33);
  auto r = dini_integral(m, 0.0, 1e-4);
  CHECK(r.tail_diverging);
  CHECK(r.value == std::numeric_limits<double>::infinity());
  CHECK(std::isfinite(r.body));
  // alpha above the exponent also diverges
  CHECK(dini_integral(power_curve(1.0, 0.5, 1e-4, 33), 0.6, 1e-4).tail_diverging);
}

TEST_CASE("short curves are rejected") {
  auto m = power_curve(1.0, 0.5, 1e-2, 7);
  CHECK(kind_of([&] { dini_integral(m, 0.0, 1e-2); }) == ErrorKind::insufficient_data);
  auto z = power_curve(0.0, 1.0, 1e-3, 12);
  CHECK(dini_integral(z, 0.0, 1e-3).value == 0.0);
}

TEST_CASE("rough example dini integral is finite and the tail is stable") {
  auto k = example22_kernel();
  auto grid = log_grid(1e-4, 1.0, 33);
  auto rot = rotation_curve(k, grid, 8);
  auto a = dini_integral(rot, 0.0, 1e-4);
  CHECK(std::isfinite(a.value));
  CHECK(a.beta == doctest::Approx(0.5).epsilon(0.02));
  // dropping the smallest decade changes the tail fit only a little
  ModulusCurve coarse = rot;
  coarse.deltas.erase(coarse.deltas.begin(), coarse.deltas.begin() + 8);
  coarse.values.erase(coarse.values.begin(), coarse.values.begin() + 8);
  auto b = dini_integral(coarse, 0.0, coarse.deltas.front());
  CHECK(b.value == doctest::Approx(a.value).epsilon(0.01));
}

TEST_CASE("A(r) of the rough example scales like r^{1/2}") {
  auto k = example22_kernel();
  auto tr = translation_curve(k, log_grid(1e-4, 0.5, 30), 16);
  double a1 = tail_function_A(k, 0.01, tr).value, a4 = tail_function_A(k, 0.04, tr).value;
  CHECK(a4 / a1 == doctest::Approx(2.0).epsilon(0.1));
  CHECK(kind_of([&] { tail_function_A(k, 0.01, rotation_curve(k, log_grid(1e-3, 1, 10))); }) ==
        ErrorKind::invalid_argument);
}

TEST_CASE("translation and rotation moduli are comparable") {
  auto grid = log_grid(1e-3, 1.0, 19);
  for (const auto& k : {cosine_kernel(2), example22_kernel(), odd_harmonic_kernel(3)}) {
    auto rot = rotation_curve(k, grid, 8);
    auto tr = translation_curve(k, grid, 16);
    auto eq = modulus_equivalence(rot, tr, 1e-3, 0.5);
    CHECK(eq.c < 4.0);
    CHECK(eq.verdicts_agree);
    CHECK(eq.rotation_dini_finite);
    for (std::size_t i = 1; i < rot.values.size(); ++i) CHECK(rot.values[i] >= rot.values[i - 1]);
  }
}

TEST_CASE("hormander integral settles for the cosine kernel") {
  auto k = cosine_kernel(2);
  auto h1 = hormander_estimate(k, Vec{0.1, 0.0}, 100.0);
  auto h2 = hormander_estimate(k, Vec{0.1, 0.0}, 400.0);
  CHECK(std::isfinite(h1.value));
  CHECK(h2.value >= h1.value);
  CHECK(h2.value == doctest::Approx(h1.value).epsilon(0.01));
  // the value does not depend on |y| by homogeneity
  auto h3 = hormander_estimate(k, Vec{0.4, 0.0}, 400.0 * 4);
  CHECK(h3.value == doctest::Approx(h2.value).epsilon(1e-6));
  // shells decay like 1/radius for a Lipschitz kernel
  REQUIRE(h2.shells.size() >= 4);
  CHECK(h2.shells[3] / h2.shells[2] == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("modulus csv has the expected header") {
  auto c = rotation_curve(cosine_kernel(2), log_grid(1e-2, 1, 8));
  std::string csv = c.to_csv();
  CHECK(csv.rfind("# ", 0) == 0);
  CHECK(csv.find("\ndelta,value,kind,q_exponent,budget\n") != std::string::npos);
}
