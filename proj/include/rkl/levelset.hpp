#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "rkl/kernel.hpp"
#include "rkl/measure.hpp"
#include "rkl/operators.hpp"
#include "rkl/sphere.hpp"

namespace rkl {

/// m({|mass * Omega(x')| |x|^{-(n - alpha)} > lambda}) = (1/n) int |mass Omega|^r lambda^{-r},
/// r = n / (n - alpha). Divergence error when Omega is not in L^r.
double pure_kernel_level_measure(const HomogeneousKernel& k, double alpha, double lambda, double mass,
                                 const SphericalQuadrature& q);
double pure_kernel_level_measure(const HomogeneousKernel& k, double alpha, double lambda, double mass = 1.0);

/// Measure of {|x| > R : |mass Omega(x')| |x|^{-(n - alpha)} > lambda}.
double far_level_measure(const HomogeneousKernel& k, double alpha, double lambda, double mass, double R);

struct LevelSetOptions {
  int threads = 1;
  /// Far field starts where n * support_radius / R_split drops to this.
  double tau = 0.01;
  /// Polar quadrature accuracy for membership tests.
  Resolution resolution{1e-8, 1e-15, 3000, 48};
};

struct LevelSetEstimate {
  double lambda = 0.0;
  double alpha = 0.0;
  double measure_value = 0.0;
  double near_field_part = 0.0;
  double far_field_part = 0.0;
  /// Far-field sandwich interval; measure_value sits at its midpoint.
  double far_lower = 0.0;
  double far_upper = 0.0;
  double measure_lower = 0.0;
  double measure_upper = 0.0;
  double R_split = 0.0;
  /// Radius beyond which |T mu| <= lambda is guaranteed.
  double R_out = 0.0;
  double tau = 0.0;
  double stderr_ = 0.0;
  std::int64_t samples = 0;
  std::int64_t failures = 0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
};

/// Hybrid estimate of m({|T_{Omega,alpha} mu| > lambda}): stratified Monte Carlo inside
/// B(0, R_split), exact far-field formula outside.
/// Errors: insufficient_budget (budget < 1000), unreliable_estimate (> 1% failed points).
LevelSetEstimate estimate_level_measure(const HomogeneousKernel& k, double alpha, const DensityMeasure& mu,
                                        double lambda, std::int64_t budget, std::uint64_t seed,
                                        const LevelSetOptions& opt = {});

/// Canonical description of the measure, used for hashing and report echoes.
nlohmann::json describe(const DensityMeasure& mu);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& s);

nlohmann::json to_json(const LevelSetEstimate& e);

}  // namespace rkl
