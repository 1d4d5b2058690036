#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "rkl/sphere.hpp"
#include "rkl/vec.hpp"

namespace rkl {

using ArcFunction = std::function<double(double)>;

struct KernelOptions {
  /// Arc-length angles (n = 2) where omega is unbounded or jumps.
  std::vector<double> singular_angles;
  /// Reject construction unless the sphere integral vanishes to 1e-6.
  bool require_mean_zero = false;
  /// sup |omega|; infinity when unbounded or unknown.
  double sup_abs = std::numeric_limits<double>::infinity();
  /// omega lies in L^s exactly for s < lp_limit.
  double lp_limit = std::numeric_limits<double>::infinity();
};

/// Degree-0 homogeneous kernel on R^n \ {0}, given by its values on the sphere.
/// For n = 2 the sphere function is a closure over arc length in (0, 2pi].
class HomogeneousKernel {
 public:
  int dim() const noexcept { return n_; }
  const std::string& label() const noexcept { return label_; }
  const std::vector<double>& singular_angles() const noexcept { return opts_.singular_angles; }
  double sup_abs() const noexcept { return opts_.sup_abs; }
  double lp_limit() const noexcept { return opts_.lp_limit; }
  bool bounded() const noexcept { return std::isfinite(opts_.sup_abs); }

  /// omega at a unit vector (no normalization performed).
  double on_sphere(const Vec& unit) const;
  /// omega at arc length theta; n = 2 only. Reduced into (0, 2pi] first.
  double at_angle(double theta) const { return arc_(wrap_arc(theta)); }
  const ArcFunction& arc() const noexcept { return arc_; }

  friend HomogeneousKernel make_kernel(int n, SphereFunction omega, std::string label, KernelOptions opts);
  friend HomogeneousKernel make_arc_kernel(ArcFunction omega, std::string label, KernelOptions opts);

 private:
  int n_ = 0;
  std::string label_;
  SphereFunction omega_;
  ArcFunction arc_;
  KernelOptions opts_;
};

HomogeneousKernel make_kernel(int n, SphereFunction omega, std::string label, KernelOptions opts = {});
HomogeneousKernel make_arc_kernel(ArcFunction omega, std::string label, KernelOptions opts = {});

/// omega(x / |x|); throws domain error at the origin.
double eval(const HomogeneousKernel& k, const Vec& x);

/// x_1 / |x|.
HomogeneousKernel cosine_kernel(int n = 2);
/// theta^{-1/2} - (2/pi)^{1/2} on arc length, unbounded at theta = 0.
HomogeneousKernel example22_kernel();
/// cos(k theta), k odd so that omega(-x) = -omega(x).
HomogeneousKernel odd_harmonic_kernel(int k);
HomogeneousKernel constant_kernel(int n, double c);
/// Periodic piecewise-linear interpolation of values at theta_j = 2 pi j / m.
HomogeneousKernel table_kernel(std::vector<double> values, std::string label = "table");

/// |integral of omega over the sphere|. n = 2 uses adaptive quadrature with the
/// declared singular angles as breakpoints; higher n uses q.
double mean_zero_defect(const HomogeneousKernel& k, const SphericalQuadrature& q);
double mean_zero_defect(const HomogeneousKernel& k);

/// (integral |omega|^s)^{1/s}; divergence error when the integral fails to settle.
double ls_norm(const HomogeneousKernel& k, double s, const SphericalQuadrature& q);
double ls_norm(const HomogeneousKernel& k, double s);
/// integral |omega|^s without the root.
double ls_integral(const HomogeneousKernel& k, double s);

/// Adaptive integral over the window (start, start + 2pi) of a function of angle,
/// splitting at the given angles (taken mod 2pi). Putting the singular directions
/// near 0 rather than near 2pi keeps their neighbourhood finely resolvable.
/// Throws divergence error when unconverged.
double circle_integral(const std::function<double(double)>& f, const std::vector<double>& breaks,
                       double rel_tol = 1e-11, int max_intervals = 4000, double start = 0.0);

/// Window start that centres the first singular angle of k, as used with circle_integral.
double singular_window(const HomogeneousKernel& k);

}  // namespace rkl
