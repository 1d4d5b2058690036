#include "rkl/sphere.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "rkl/error.hpp"
#include "rkl/quadrature.hpp"

namespace rkl {

Direction::Direction(const Vec& v) : v_(v) {
  require(v.dim() >= 2 && v.dim() <= kMaxDim, ErrorKind::unsupported_dimension,
          "direction dimension must be in [2, 4]");
  double r = v.norm();
  require(std::isfinite(r) && std::abs(r - 1.0) <= 1e-6, ErrorKind::invalid_argument,
          "direction is not a unit vector");
  v_ *= 1.0 / r;
}

Rotation Rotation::identity(int n) {
  require(n >= 2 && n <= kMaxDim, ErrorKind::unsupported_dimension, "rotation dimension must be in [2, 4]");
  Rotation r;
  r.n_ = n;
  for (int i = 0; i < n; ++i) r.m_[i * kMaxDim + i] = 1.0;
  return r;
}

Rotation Rotation::planar(double s) {
  Rotation r;
  r.n_ = 2;
  double c = std::cos(s), sn = std::sin(s);
  r.m_[0] = c;
  r.m_[1] = -sn;
  r.m_[kMaxDim] = sn;
  r.m_[kMaxDim + 1] = c;
  return r;
}

Rotation Rotation::axis_angle(const Direction& axis, double angle) {
  require(axis.dim() == 3, ErrorKind::invalid_argument, "axis-angle rotations need n = 3");
  const double x = axis[0], y = axis[1], z = axis[2];
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  Rotation r;
  r.n_ = 3;
  auto set = [&](int i, int j, double v) { r.m_[i * kMaxDim + j] = v; };
  set(0, 0, t * x * x + c);
  set(0, 1, t * x * y - s * z);
  set(0, 2, t * x * z + s * y);
  set(1, 0, t * x * y + s * z);
  set(1, 1, t * y * y + c);
  set(1, 2, t * y * z - s * x);
  set(2, 0, t * x * z - s * y);
  set(2, 1, t * y * z + s * x);
  set(2, 2, t * z * z + c);
  return r;
}

namespace {

double determinant(int n, std::array<double, kMaxDim * kMaxDim> a) {
  double det = 1.0;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[i * kMaxDim + k]) > std::abs(a[piv * kMaxDim + k])) piv = i;
    if (a[piv * kMaxDim + k] == 0.0) return 0.0;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a[k * kMaxDim + j], a[piv * kMaxDim + j]);
      det = -det;
    }
    double p = a[k * kMaxDim + k];
    det *= p;
    for (int i = k + 1; i < n; ++i) {
      double f = a[i * kMaxDim + k] / p;
      for (int j = k; j < n; ++j) a[i * kMaxDim + j] -= f * a[k * kMaxDim + j];
    }
  }
  return det;
}

}  // namespace

Rotation Rotation::from_matrix(int n, const std::vector<double>& rows) {
  require(n >= 2 && n <= kMaxDim, ErrorKind::unsupported_dimension, "rotation dimension must be in [2, 4]");
  require(static_cast<int>(rows.size()) == n * n, ErrorKind::invalid_argument, "matrix needs n*n entries");
  Rotation r;
  r.n_ = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r.m_[i * kMaxDim + j] = rows[i * n + j];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += r(i, k) * r(j, k);
      require(std::abs(s - (i == j ? 1.0 : 0.0)) <= 1e-10, ErrorKind::invalid_argument,
              "matrix is not orthogonal");
    }
  require(std::abs(determinant(n, r.m_) - 1.0) <= 1e-10, ErrorKind::invalid_argument,
          "matrix is not a proper rotation");
  return r;
}

Vec Rotation::apply(const Vec& v) const {
  require(v.dim() == n_, ErrorKind::invalid_argument, "dimension mismatch");
  Vec out(n_);
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += m_[i * kMaxDim + j] * v[j];
    out[i] = s;
  }
  return out;
}

Rotation Rotation::compose(const Rotation& first) const {
  require(first.n_ == n_, ErrorKind::invalid_argument, "dimension mismatch");
  Rotation r;
  r.n_ = n_;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      double s = 0.0;
      for (int k = 0; k < n_; ++k) s += (*this)(i, k) * first(k, j);
      r.m_[i * kMaxDim + j] = s;
    }
  return r;
}

Rotation Rotation::inverse() const {
  Rotation r;
  r.n_ = n_;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r.m_[i * kMaxDim + j] = (*this)(j, i);
  return r;
}

double Rotation::angle() const {
  require(n_ == 2, ErrorKind::invalid_argument, "angle is defined for planar rotations only");
  double s = std::atan2((*this)(1, 0), (*this)(0, 0));
  return s < 0.0 ? s + kTwoPi : s;
}

SphericalQuadrature quad_circle(int m) {
  require(m >= 4, ErrorKind::invalid_argument, "quad_circle needs at least 4 nodes");
  SphericalQuadrature q;
  q.n = 2;
  const double h = kTwoPi / m;
  for (int k = 0; k < m; ++k) {
    double t = (k + 0.5) * h;
    q.angles.push_back(t);
    q.nodes.push_back(Vec{std::cos(t), std::sin(t)});
    q.weights.push_back(h);
  }
  return q;
}

namespace {

constexpr int kPanelOrder = 8;
constexpr int kGradingLevels = 60;

void add_panel(SphericalQuadrature& q, double a, double b) {
  const GaussRule& g = gauss_legendre(kPanelOrder);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < kPanelOrder; ++i) {
    double t = c + h * g.x[i];
    q.angles.push_back(t);
    q.nodes.push_back(Vec{std::cos(t), std::sin(t)});
    q.weights.push_back(h * g.w[i]);
  }
}

SphericalQuadrature circle_rule(int level) {
  SphericalQuadrature q;
  q.n = 2;
  const int panels = 4 << level;
  const double h = kTwoPi / panels;
  // geometric panels toward 0 and toward 2pi resolve endpoint singularities
  double lo = h;
  std::vector<double> cuts;
  for (int k = 0; k < kGradingLevels; ++k) {
    cuts.push_back(lo);
    lo *= 0.5;
  }
  add_panel(q, 0.0, cuts.back());
  for (int k = kGradingLevels - 1; k > 0; --k) add_panel(q, cuts[k], cuts[k - 1]);
  for (int p = 1; p < panels - 1; ++p) add_panel(q, p * h, (p + 1) * h);
  for (int k = 1; k < kGradingLevels; ++k) add_panel(q, kTwoPi - cuts[k - 1], kTwoPi - cuts[k]);
  add_panel(q, kTwoPi - cuts.back(), kTwoPi);
  return q;
}

// Polar-angle rule for weight sin^p on (0, pi).
std::vector<std::pair<double, double>> polar_rule(int m, int p) {
  const GaussRule& g = gauss_legendre(m);
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i < m; ++i) {
    double phi = 0.5 * kPi * (g.x[i] + 1.0);
    out.emplace_back(phi, 0.5 * kPi * g.w[i] * std::pow(std::sin(phi), p));
  }
  return out;
}

}  // namespace

SphericalQuadrature quad_sphere(int n, int level) {
  require(level >= 1, ErrorKind::invalid_argument, "quadrature level must be >= 1");
  require(n >= 2, ErrorKind::invalid_argument, "dimension must be >= 2");
  require(n <= 4, ErrorKind::unsupported_dimension, "quadrature supports n <= 4");
  require(level <= 12, ErrorKind::invalid_argument, "quadrature level too large");
  if (n == 2) return circle_rule(level);

  SphericalQuadrature q;
  q.n = n;
  const int m = 4 << level;
  const int ma = 2 * m;
  const double ha = kTwoPi / ma;
  auto p1 = polar_rule(m, n - 2);
  if (n == 3) {
    for (auto [phi, w] : p1)
      for (int k = 0; k < ma; ++k) {
        double a = (k + 0.5) * ha;
        q.nodes.push_back(Vec{std::sin(phi) * std::cos(a), std::sin(phi) * std::sin(a), std::cos(phi)});
        q.weights.push_back(w * ha);
      }
    return q;
  }
  auto p2 = polar_rule(m, 1);
  for (auto [phi1, w1] : p1)
    for (auto [phi2, w2] : p2)
      for (int k = 0; k < ma; ++k) {
        double a = (k + 0.5) * ha;
        double s12 = std::sin(phi1) * std::sin(phi2);
        q.nodes.push_back(Vec{s12 * std::cos(a), s12 * std::sin(a), std::sin(phi1) * std::cos(phi2), std::cos(phi1)});
        q.weights.push_back(w1 * w2 * ha);
      }
  return q;
}

const SphericalQuadrature& default_quadrature(int n) {
  require(n >= 2, ErrorKind::invalid_argument, "dimension must be >= 2");
  require(n <= 4, ErrorKind::unsupported_dimension, "quadrature supports n <= 4");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<SphericalQuadrature>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<SphericalQuadrature>(quad_sphere(n, n == 4 ? 2 : 3));
  return *slot;
}

double integrate(const SphericalQuadrature& q, const SphereFunction& g) {
  NeumaierSum s;
  for (int i = 0; i < q.size(); ++i) {
    double v = g(q.nodes[i]);
    if (!std::isfinite(v)) throw EvaluationError("sphere function is not finite at a node", q.nodes[i].to_vector());
    s.add(q.weights[i] * v);
  }
  return s.value();
}

Direction apply_rotation(const Rotation& rho, const Direction& d) {
  require(rho.dim() == d.dim(), ErrorKind::invalid_argument, "dimension mismatch");
  Vec v = rho.apply(d.vec());
  return Direction(v * (1.0 / v.norm()));
}

double rotation_norm(const Rotation& rho, const SphericalQuadrature& q) {
  require(rho.dim() == q.n, ErrorKind::invalid_argument, "dimension mismatch");
  return rotation_norm(rho);
}

double rotation_norm(const Rotation& rho) {
  const int n = rho.dim();
  if (n == 2) return std::abs(2.0 * std::sin(0.5 * rho.angle()));
  const SphericalQuadrature& q = default_quadrature(n);
  auto gap = [&](const Vec& x) { return (rho.apply(x) - x).norm(); };
  double best = 0.0;
  Vec seed = q.nodes.front();
  for (const Vec& x : q.nodes) {
    double d = gap(x);
    if (d > best) {
      best = d;
      seed = x;
    }
  }
  // local refinement: power iteration on (R - I)^T (R - I) from the best node
  Vec v = seed;
  for (int it = 0; it < 500; ++it) {
    Vec a = rho.apply(v) - v;
    Vec w = rho.inverse().apply(a) - a;
    double nw = w.norm();
    if (nw == 0.0) break;
    Vec next = w * (1.0 / nw);
    double moved = (next - v).norm();
    v = next;
    if (moved < 1e-15) break;
  }
  best = std::max(best, gap(v));
  return std::min(best, 2.0);
}

}  // namespace rkl
