#pragma once

#include <array>
#include <functional>
#include <vector>

#include "rkl/vec.hpp"

namespace rkl {

/// Unit vector in R^n. Small drift is renormalized away; anything further
/// than 1e-6 from the sphere is rejected.
class Direction {
 public:
  explicit Direction(const Vec& v);
  static Direction from_angle(double theta) { return Direction(Vec{std::cos(theta), std::sin(theta)}); }

  int dim() const noexcept { return v_.dim(); }
  const Vec& vec() const noexcept { return v_; }
  double operator[](int i) const noexcept { return v_[i]; }
  /// Arc-length angle in (0, 2pi]; only meaningful for n = 2.
  double angle() const noexcept { return arc_angle(v_[0], v_[1]); }

 private:
  Vec v_;
};

/// Proper rotation of R^n stored as a row-major matrix.
class Rotation {
 public:
  static Rotation identity(int n);
  static Rotation planar(double s);
  /// Right-handed rotation by `angle` about `axis` (n = 3).
  static Rotation axis_angle(const Direction& axis, double angle);
  /// Validates orthogonality and det = +1 to 1e-10.
  static Rotation from_matrix(int n, const std::vector<double>& rows);

  int dim() const noexcept { return n_; }
  double operator()(int i, int j) const noexcept { return m_[i * kMaxDim + j]; }
  Vec apply(const Vec& v) const;
  Rotation compose(const Rotation& first) const;  // this * first
  Rotation inverse() const;
  /// Planar angle in [0, 2pi); only for n = 2.
  double angle() const;

 private:
  int n_ = 0;
  std::array<double, kMaxDim * kMaxDim> m_{};
};

/// Nodes and positive weights for integrals over S^{n-1}.
struct SphericalQuadrature {
  int n = 0;
  std::vector<Vec> nodes;
  std::vector<double> weights;
  /// Arc-length angles of the nodes when n = 2.
  std::vector<double> angles;
  int size() const noexcept { return static_cast<int>(weights.size()); }
};

using SphereFunction = std::function<double(const Vec&)>;

/// m equally spaced nodes on the circle, weight 2pi/m each, offset half a step
/// so that no node sits at angle 0.
SphericalQuadrature quad_circle(int m);

/// Deterministic rule on S^{n-1}, 2 <= n <= 4.
/// n = 2: composite Gauss panels, 4 * 2^level of them, plus geometric grading toward angle 0.
/// n = 3, 4: product Gauss rule over polar angles with the sin-power Jacobian and a
/// uniform azimuth.
SphericalQuadrature quad_sphere(int n, int level = 3);

/// Default rule used when a caller does not pass one.
const SphericalQuadrature& default_quadrature(int n);

/// Sum of w_i g(node_i); throws EvaluationError at a non-finite value.
double integrate(const SphericalQuadrature& q, const SphereFunction& g);

Direction apply_rotation(const Rotation& rho, const Direction& d);

/// sup over the sphere of |rho x - x|.
double rotation_norm(const Rotation& rho, const SphericalQuadrature& q);
double rotation_norm(const Rotation& rho);

}  // namespace rkl
