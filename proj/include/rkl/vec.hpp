#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <initializer_list>
#include <span>
#include <vector>

namespace rkl {

inline constexpr int kMaxDim = 4;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Small fixed-capacity point in R^n, n <= kMaxDim.
class Vec {
 public:
  Vec() = default;
  explicit Vec(int n) : n_(n) { assert(n >= 1 && n <= kMaxDim); }
  Vec(std::initializer_list<double> coords) : n_(static_cast<int>(coords.size())) {
    assert(n_ >= 1 && n_ <= kMaxDim);
    int i = 0;
    for (double c : coords) c_[i++] = c;
  }
  static Vec from_span(std::span<const double> coords) {
    Vec v(static_cast<int>(coords.size()));
    for (int i = 0; i < v.n_; ++i) v.c_[i] = coords[i];
    return v;
  }

  int dim() const noexcept { return n_; }
  double operator[](int i) const noexcept { return c_[i]; }
  double& operator[](int i) noexcept { return c_[i]; }

  double dot(const Vec& o) const noexcept {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += c_[i] * o.c_[i];
    return s;
  }
  double norm2() const noexcept { return dot(*this); }
  double norm() const noexcept {
    if (n_ == 2) return std::hypot(c_[0], c_[1]);
    return std::sqrt(norm2());
  }

  Vec& operator+=(const Vec& o) noexcept {
    for (int i = 0; i < n_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) noexcept {
    for (int i = 0; i < n_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Vec& operator*=(double s) noexcept {
    for (int i = 0; i < n_; ++i) c_[i] *= s;
    return *this;
  }
  friend Vec operator+(Vec a, const Vec& b) noexcept { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) noexcept { return a -= b; }
  friend Vec operator*(Vec a, double s) noexcept { return a *= s; }
  friend Vec operator*(double s, Vec a) noexcept { return a *= s; }
  friend Vec operator-(Vec a) noexcept { return a *= -1.0; }
  friend bool operator==(const Vec& a, const Vec& b) noexcept {
    if (a.n_ != b.n_) return false;
    for (int i = 0; i < a.n_; ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

  std::vector<double> to_vector() const { return {c_.begin(), c_.begin() + n_}; }

 private:
  int n_ = 0;
  std::array<double, kMaxDim> c_{};
};

/// Arc-length angle of a planar vector in (0, 2pi].
inline double arc_angle(double x, double y) noexcept {
  double t = std::atan2(y, x);
  return t <= 0.0 ? t + kTwoPi : t;
}

/// Reduce an angle into (0, 2pi].
inline double wrap_arc(double t) noexcept {
  t = std::fmod(t, kTwoPi);
  if (t <= 0.0) t += kTwoPi;
  return t;
}

/// Surface measure of the unit sphere S^{n-1}.
double sphere_area(int n);
/// Lebesgue measure of the unit ball in R^n.
double ball_volume(int n);

}  // namespace rkl
