#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rkl/kernel.hpp"
#include "rkl/sphere.hpp"

namespace rkl {

enum class ModulusKind { rotation, translation };
std::string to_string(ModulusKind k);

/// Sampled delta -> omega(delta) curve. Values are sampled suprema, so they
/// understate the true modulus; the sampling budget travels with them.
struct ModulusCurve {
  ModulusKind kind = ModulusKind::rotation;
  double q_exponent = 1.0;
  std::vector<double> deltas;
  std::vector<double> values;
  int budget = 0;
  std::uint64_t seed = 0;

  /// CSV with columns delta,value,kind,q_exponent,budget.
  std::string to_csv() const;
};

/// 4((2pi - s)^{1/2} - (2pi)^{1/2} + s^{1/2}).
double example22_g(double s);

/// count log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int count);

/// Largest rotation angle s with 2 sin(s/2) <= delta.
double extreme_angle(double delta);

/// n = 2: integral over the circle of |omega(theta + s) - omega(theta)|.
double rotation_integral(const HomogeneousKernel& k, double s);
/// Any n: integral of |omega(rho theta) - omega(theta)| using q (n = 2 ignores q).
double rotation_integral(const HomogeneousKernel& k, const Rotation& rho, const SphericalQuadrature& q);

/// integral of |omega(x' + h) - omega(x')| over the sphere; needs |h| < 1.
double translation_integral(const HomogeneousKernel& k, const Vec& h, const SphericalQuadrature& q);
double translation_integral(const HomogeneousKernel& k, const Vec& h);

/// integral of |omega(x' + h)| over the sphere.
double translated_l1(const HomogeneousKernel& k, const Vec& h);

/// Sampled sup over rotations with ||rho|| <= delta. n = 2 scans the signed angles
/// s* j / budget, j = 1..budget, s* the extreme angle; higher n draws budget random
/// rotations from the seed.
double rotation_modulus(const HomogeneousKernel& k, double delta, int budget, const SphericalQuadrature& q,
                        std::uint64_t seed = 0);
double rotation_modulus(const HomogeneousKernel& k, double delta, int budget = 8);

/// Sampled sup over |h| <= delta: budget directions on |h| = delta, a golden-section
/// refinement around the best one, and two shorter radii along it.
double translation_modulus(const HomogeneousKernel& k, double delta, int budget, const SphericalQuadrature& q,
                           std::uint64_t seed = 0);
double translation_modulus(const HomogeneousKernel& k, double delta, int budget = 32);

/// Curves over a delta grid; values are made nondecreasing by a running max,
/// which is valid because the sup runs over nested families.
ModulusCurve rotation_curve(const HomogeneousKernel& k, const std::vector<double>& deltas, int budget = 8,
                            std::uint64_t seed = 0);
ModulusCurve translation_curve(const HomogeneousKernel& k, const std::vector<double>& deltas, int budget = 32,
                               std::uint64_t seed = 0);

struct DiniResult {
  double value = 0.0;  // body + tail; +inf when the tail diverges
  double body = 0.0;   // part resolved by the grid
  double tail = 0.0;   // power-law extrapolation below the grid
  double beta = 0.0;   // fitted exponent on the smallest decade
  double coeff = 0.0;  // fitted prefactor
  bool tail_diverging = false;
};

/// integral from 0 to 1 of omega(delta) / delta^{1+alpha}, piecewise power-law
/// interpolation on the grid and a fitted c delta^beta below it.
DiniResult dini_integral(const ModulusCurve& curve, double alpha, double delta_min);

/// A(r) = integral from 0 to r of omega~(s)/s.
DiniResult tail_function_A(const HomogeneousKernel& k, double r, const ModulusCurve& curve);

/// sup over |xi| = 1 of integral |omega(theta) - omega(theta + delta xi)| divided by
/// n delta ||omega||_1; delta in (0, 1/n).
double regularity_ratio(const HomogeneousKernel& k, double delta, int budget = 32);

/// sup over |h| <= delta of integral |omega(theta + h)|, divided by ||omega||_1.
double translated_l1_ratio(const HomogeneousKernel& k, double delta, int budget = 32);

struct HormanderResult {
  double value = 0.0;
  std::vector<double> shells;  // contribution of each dyadic shell, innermost first
  double radius_reached = 0.0; // in units of |y|
  bool stopped_early = false;  // stopping rule fired before R_max
};

/// integral over 2|y| < |x| < R_max of |K(x - y) - K(x)|, K = omega |x|^{-n}.
HormanderResult hormander_estimate(const HomogeneousKernel& k, const Vec& y, double r_max);

struct EquivalenceReport {
  std::vector<double> deltas;
  std::vector<double> ratios;  // translation / rotation, NaN where rotation is 0
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double c = 0.0;              // smallest C with ratios in [1/C, C]
  bool rotation_dini_finite = false;
  bool translation_dini_finite = false;
  bool verdicts_agree = false;
};

/// Two-sided comparison of the rotation and translation moduli on a common grid.
EquivalenceReport modulus_equivalence(const ModulusCurve& rotation, const ModulusCurve& translation,
                                      double ratio_lo, double ratio_hi);

}  // namespace rkl
