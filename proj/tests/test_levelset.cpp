#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "rkl/levelset.hpp"
#include "support.hpp"

using namespace rkl;

TEST_CASE("pure kernel level sets") {
  // {|x|^{-2} > 1} is the unit disk; {|x|^{-1} > 1} too
  CHECK(pure_kernel_level_measure(constant_kernel(2, 1.0), 0.0, 1.0) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(pure_kernel_level_measure(constant_kernel(2, 1.0), 1.0, 1.0) == doctest::Approx(kPi).epsilon(1e-12));
  auto k = example22_kernel();
  for (double lam : {1e-3, 1.0, 1e3}) {
    CHECK(lam * pure_kernel_level_measure(k, 0.0, lam) == doctest::Approx(std::sqrt(kTwoPi) / 2).epsilon(1e-10));
  }
  CHECK(pure_kernel_level_measure(cosine_kernel(2), 0.0, 0.5, 3.0) == doctest::Approx(12.0).epsilon(1e-12));
  // alpha = 1: r = 2, (1/2) ||cos||_2^2 = pi / 2
  CHECK(pure_kernel_level_measure(cosine_kernel(2), 1.0, 1.0) == doctest::Approx(kPi / 2).epsilon(1e-12));
  // the rough kernel is not in L^2
  CHECK(kind_of([&] { pure_kernel_level_measure(k, 1.0, 1.0); }) == ErrorKind::divergence);
}

TEST_CASE("far level measure is the pure kernel measure minus the ball") {
  auto k = cosine_kernel(2);
  double full = pure_kernel_level_measure(k, 0.0, 1e-2);
  CHECK(far_level_measure(k, 0.0, 1e-2, 1.0, 1e-6) == doctest::Approx(full).epsilon(1e-9));
  CHECK(far_level_measure(k, 0.0, 1e-2, 1.0, 20.0) == 0.0);
  // {cos / |x|^2 > lam, |x| > R}: integral of max(0, |cos|/lam - R^2) / 2 over the circle
  double R = 5.0, lam = 1e-2;
  double c = R * R * lam;
  double t0 = std::acos(c);
  double exact = 2 * (2 * std::sin(t0) / lam - 2 * t0 * R * R) / 2;
  CHECK(far_level_measure(k, 0.0, lam, 1.0, R) == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("a tiny bump behaves like a point mass") {
  auto e = estimate_level_measure(cosine_kernel(2), 0.0, disk_bump(2, 0.01, 1.0), 1e-3, 8192, 7);
  CHECK(e.measure_value == doctest::Approx(2000.0).epsilon(0.02));
  CHECK(e.measure_value == doctest::Approx(e.near_field_part + e.far_field_part).epsilon(1e-14));
  CHECK(e.measure_lower <= e.measure_value);
  CHECK(e.measure_upper >= e.measure_value);
  CHECK(e.failures == 0);
}

TEST_CASE("the rough kernel sees a tiny bump as a point mass too") {
  auto k = example22_kernel();
  auto e = estimate_level_measure(k, 0.0, disk_bump(2, 0.01, 1.0), 1e-2, 4096, 2);
  CHECK(e.measure_value == doctest::Approx(pure_kernel_level_measure(k, 0.0, 1e-2)).epsilon(0.01));
  CHECK(e.stderr_ > 0.0);
  CHECK(e.far_lower <= e.far_upper);
}

TEST_CASE("level measures decrease in lambda and vanish for huge lambda") {
  auto k = cosine_kernel(2);
  auto mu = disk_bump(2, 1.0, 1.0);
  double prev = INFINITY;
  for (double lam : {0.05, 0.2, 0.8}) {
    double m = estimate_level_measure(k, 0.0, mu, lam, 4096, 3).measure_value;
    CHECK(m < prev);
    prev = m;
  }
  auto big = estimate_level_measure(k, 0.0, mu, 1e3, 2048, 3);
  CHECK(big.measure_value == 0.0);
  CHECK(big.far_field_part == 0.0);
}

TEST_CASE("budget and kernel requirements") {
  auto mu = disk_bump(2, 1.0, 1.0);
  CHECK(kind_of([&] { estimate_level_measure(cosine_kernel(2), 0.0, mu, 0.1, 999, 1); }) ==
        ErrorKind::insufficient_budget);
  CHECK(kind_of([&] { estimate_level_measure(constant_kernel(2, 1.0), 0.0, mu, 0.1, 2000, 1); }) ==
        ErrorKind::invalid_argument);
}

TEST_CASE("results do not depend on the thread count") {
  auto k = example22_kernel();
  auto mu = gaussian(2, 0.5, 3.0);
  LevelSetOptions one, four;
  four.threads = 4;
  auto a = estimate_level_measure(k, 0.0, mu, 0.3, 2048, 99, one);
  auto b = estimate_level_measure(k, 0.0, mu, 0.3, 2048, 99, four);
  CHECK(a.measure_value == b.measure_value);
  CHECK(a.stderr_ == b.stderr_);
  CHECK(a.config_hash == b.config_hash);
  auto c = estimate_level_measure(k, 0.0, mu, 0.3, 2048, 100, one);
  CHECK(c.measure_value != a.measure_value);
}

TEST_CASE("dilating the measure rescales the level set") {
  // m_{mu_t}(lambda t^{-(n - alpha)}) = t^n m_mu(lambda)
  auto k = cosine_kernel(2);
  auto mu = disk_bump(2, 1.0, 1.0);
  for (double alpha : {0.0, 1.0}) {
    auto base = estimate_level_measure(k, alpha, mu, 0.1, 2048, 5);
    for (double t : {0.5, 2.0}) {
      auto e = estimate_level_measure(k, alpha, scale(mu, t), 0.1 * std::pow(t, -(2 - alpha)), 2048, 5);
      CHECK(e.measure_value == doctest::Approx(t * t * base.measure_value).epsilon(1e-9));
    }
  }
}

TEST_CASE("estimate json carries the bookkeeping") {
  auto e = estimate_level_measure(cosine_kernel(2), 1.0, disk_bump(2, 1.0, 1.0), 0.1, 1024, 11);
  auto j = to_json(e);
  for (const char* key : {"lambda", "alpha", "measure_value", "near_field_part", "far_field_part", "R_split", "R_out",
                          "tau", "samples", "failures", "seed", "config_hash"})
    CHECK(j.contains(key));
  CHECK(j["config_hash"].get<std::string>().size() == 16);
  CHECK(j["seed"].get<std::uint64_t>() == 11);
  // unbounded kernels have no finite R_out
  auto u = estimate_level_measure(example22_kernel(), 0.0, disk_bump(2, 1.0, 1.0), 0.5, 1024, 11);
  CHECK(to_json(u)["R_out"].is_null());
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}
