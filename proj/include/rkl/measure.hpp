#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rkl/vec.hpp"

namespace rkl {

/// Ball constraint: keep points with |y - center| < radius (inside) or >= radius.
struct Ball {
  Vec center;
  double radius = 0.0;
  bool inside = true;
};

struct Segment {
  double lo = 0.0;
  double hi = 0.0;
};

/// Parameter intervals r in [0, rmax] with o + r w satisfying every constraint.
/// w must be a unit vector. At most a handful of segments are produced.
std::vector<Segment> ray_segments(const Vec& o, const Vec& w, std::span<const Ball> constraints, double rmax);

/// Angles (n = 2) of the two rays from o tangent to the ball's boundary; empty when
/// o is inside or on it.
std::vector<double> tangent_angles(const Vec& o, const Vec& center, double radius);

enum class Profile { uniform, gaussian, custom };

/// One compactly supported component of a density. Parameters live in the actual
/// frame; a custom profile is kept in its base frame and dilated by t.
struct Piece {
  Profile profile = Profile::uniform;
  Vec center;
  double radius = 0.0;     // support radius
  double amplitude = 0.0;  // uniform: density value; gaussian: peak density
  double sigma = 0.0;      // gaussian width
  double t = 1.0;          // dilation applied to the custom base profile
  std::shared_ptr<const std::function<double(const Vec&)>> base;  // custom, offset from center

  /// Density at y, assuming y is in the support.
  double value(const Vec& y) const;
};

/// Absolutely continuous signed measure with bounded, compactly supported density.
/// Clips are origin-centred ball constraints shared by every piece; they realize
/// restrictions to a ball or its complement.
class DensityMeasure {
 public:
  DensityMeasure() = default;
  DensityMeasure(int n, std::vector<Piece> pieces, std::vector<Ball> clips = {});

  int dim() const noexcept { return n_; }
  const std::vector<Piece>& pieces() const noexcept { return pieces_; }
  const std::vector<Ball>& clips() const noexcept { return clips_; }
  double support_radius() const noexcept { return support_radius_; }
  double total_mass() const noexcept { return mass_; }
  double total_variation() const noexcept { return tv_; }
  /// True when |mu|(B(0, r)) has a closed form.
  bool has_analytic_cdf() const noexcept;

  /// Constraints (support ball plus clips) that cut out piece i.
  std::vector<Ball> constraints(std::size_t i) const;
  /// Density at x; zero off the support.
  double density(const Vec& x) const;
  /// Piece contributions at x, summing to density(x).
  bool in_piece(std::size_t i, const Vec& x) const;

  /// mu(E) for E = region (or the whole space), using |density| when absolute.
  double integrate_ball(const std::optional<Ball>& region, bool absolute) const;
  /// |mu|(B(0, r)).
  double radial_cdf(double r) const;

 private:
  int n_ = 0;
  std::vector<Piece> pieces_;
  std::vector<Ball> clips_;
  double support_radius_ = 0.0;
  double mass_ = 0.0;
  double tv_ = 0.0;
};

/// Uniform density on a ball: "disk_bump(radius, mass)".
DensityMeasure disk_bump(int n, double radius, double mass, const std::optional<Vec>& center = std::nullopt);
/// (2 pi sigma^2)^{-n/2} mass exp(-|x|^2 / 2 sigma^2) restricted to |x| <= cutoff.
DensityMeasure gaussian(int n, double sigma, double cutoff, double mass = 1.0);
/// Uniform ball of mass +mass at +offset e_1 and -mass at -offset e_1; needs offset >= radius.
DensityMeasure dipole(int n, double offset, double radius, double mass);
/// Custom bounded density on B(center, radius).
DensityMeasure custom_density(int n, std::function<double(const Vec&)> f, double radius,
                              const std::optional<Vec>& center = std::nullopt);
/// Sum of two measures whose supports do not overlap.
DensityMeasure add(const DensityMeasure& a, const DensityMeasure& b);

/// The zero measure in dimension n.
DensityMeasure zero_measure(int n);

double total_variation(const DensityMeasure& mu);

/// mu_t(E) = mu(E / t): density t^{-n} f(x / t).
DensityMeasure scale(const DensityMeasure& mu, double t);

/// a with |mu|(B(0, a)) = eps, by bisection on the radial distribution.
double radius_for_mass(const DensityMeasure& mu, double eps);

struct SplitMeasure {
  DensityMeasure inner;
  DensityMeasure outer;
};
/// mu restricted to B(0, R) and to its complement.
SplitMeasure split_at_radius(const DensityMeasure& mu, double R);

/// Parse a catalog name such as "disk_bump(1, 1)" or "dipole(2, 0.5, 1)".
DensityMeasure measure_from_name(const std::string& spec, int n = 2);

}  // namespace rkl
