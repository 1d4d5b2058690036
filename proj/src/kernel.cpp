#include "rkl/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rkl/error.hpp"
#include "rkl/quadrature.hpp"

namespace rkl {

double HomogeneousKernel::on_sphere(const Vec& unit) const {
  if (n_ == 2) return arc_(arc_angle(unit[0], unit[1]));
  return omega_(unit);
}

namespace {

void check_finite(const HomogeneousKernel& k) {
  const SphericalQuadrature& q = default_quadrature(k.dim());
  for (int i = 0; i < q.size(); ++i) {
    double v = k.on_sphere(q.nodes[i]);
    if (std::isfinite(v)) continue;
    bool declared = false;
    if (k.dim() == 2) {
      for (double s : k.singular_angles()) {
        double d = std::abs(std::remainder(q.angles[i] - s, kTwoPi));
        declared = declared || d < 1e-9;
      }
    }
    if (!declared) fail(ErrorKind::construction, "kernel '" + k.label() + "' is not finite at a quadrature node");
  }
}

void finish(HomogeneousKernel& k, const KernelOptions& opts) {
  check_finite(k);
  if (opts.require_mean_zero) {
    double d = mean_zero_defect(k);
    require(d < 1e-6, ErrorKind::construction,
            "kernel '" + k.label() + "' is not mean zero (defect " + std::to_string(d) + ")");
  }
}

}  // namespace

HomogeneousKernel make_kernel(int n, SphereFunction omega, std::string label, KernelOptions opts) {
  require(n >= 2, ErrorKind::invalid_argument, "kernel dimension must be >= 2");
  require(n <= kMaxDim, ErrorKind::unsupported_dimension, "kernel dimension must be <= 4");
  require(static_cast<bool>(omega), ErrorKind::invalid_argument, "empty sphere function");
  HomogeneousKernel k;
  k.n_ = n;
  k.label_ = std::move(label);
  k.opts_ = std::move(opts);
  if (n == 2) {
    k.arc_ = [om = omega](double t) { return om(Vec{std::cos(t), std::sin(t)}); };
  }
  k.omega_ = std::move(omega);
  finish(k, k.opts_);
  return k;
}

HomogeneousKernel make_arc_kernel(ArcFunction omega, std::string label, KernelOptions opts) {
  require(static_cast<bool>(omega), ErrorKind::invalid_argument, "empty arc function");
  HomogeneousKernel k;
  k.n_ = 2;
  k.label_ = std::move(label);
  for (double& s : opts.singular_angles) s = wrap_arc(s);
  k.opts_ = std::move(opts);
  k.arc_ = std::move(omega);
  k.omega_ = [arc = k.arc_](const Vec& u) { return arc(arc_angle(u[0], u[1])); };
  finish(k, k.opts_);
  return k;
}

double eval(const HomogeneousKernel& k, const Vec& x) {
  require(x.dim() == k.dim(), ErrorKind::invalid_argument, "dimension mismatch");
  double r = x.norm();
  require(r > 0.0, ErrorKind::domain, "kernel evaluated at the origin");
  if (k.dim() == 2) return k.arc()(arc_angle(x[0], x[1]));
  return k.on_sphere(x * (1.0 / r));
}

HomogeneousKernel cosine_kernel(int n) {
  KernelOptions o;
  o.sup_abs = 1.0;
  if (n == 2) return make_arc_kernel([](double t) { return std::cos(t); }, "cosine", o);
  return make_kernel(n, [](const Vec& u) { return u[0]; }, "cosine", o);
}

HomogeneousKernel example22_kernel() {
  KernelOptions o;
  o.singular_angles = {kTwoPi};
  o.lp_limit = 2.0;
  const double c = std::sqrt(2.0 / kPi);
  return make_arc_kernel([c](double t) { return 1.0 / std::sqrt(t) - c; }, "example22", o);
}

HomogeneousKernel odd_harmonic_kernel(int k) {
  require(k >= 1 && k % 2 == 1, ErrorKind::invalid_argument, "odd_harmonic needs a positive odd order");
  KernelOptions o;
  o.sup_abs = 1.0;
  return make_arc_kernel([k](double t) { return std::cos(k * t); }, "odd_harmonic(" + std::to_string(k) + ")", o);
}

HomogeneousKernel constant_kernel(int n, double c) {
  require(std::isfinite(c), ErrorKind::invalid_argument, "constant must be finite");
  KernelOptions o;
  o.sup_abs = std::abs(c);
  if (n == 2) return make_arc_kernel([c](double) { return c; }, "constant", o);
  return make_kernel(n, [c](const Vec&) { return c; }, "constant", o);
}

HomogeneousKernel table_kernel(std::vector<double> values, std::string label) {
  require(values.size() >= 2, ErrorKind::invalid_argument, "table kernel needs at least 2 values");
  double sup = 0.0;
  for (double v : values) {
    require(std::isfinite(v), ErrorKind::invalid_argument, "table kernel values must be finite");
    sup = std::max(sup, std::abs(v));
  }
  KernelOptions o;
  o.sup_abs = sup;
  const int m = static_cast<int>(values.size());
  auto f = [vals = std::move(values), m](double t) {
    double u = t / kTwoPi * m;
    double fl = std::floor(u);
    int j = static_cast<int>(fl) % m;
    if (j < 0) j += m;
    double w = u - fl;
    return (1.0 - w) * vals[j] + w * vals[(j + 1) % m];
  };
  return make_arc_kernel(f, std::move(label), o);
}

double circle_integral(const std::function<double(double)>& f, const std::vector<double>& breaks, double rel_tol,
                       int max_intervals, double start) {
  std::vector<double> b;
  const double end = start + kTwoPi;
  for (double s : breaks) {
    while (s < start) s += kTwoPi;
    while (s >= end) s -= kTwoPi;
    b.push_back(s);
  }
  QuadOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = 1e-13;
  opt.max_intervals = max_intervals;
  QuadResult r;
  try {
    r = integrate_adaptive(f, start, end, b, opt);
  } catch (const EvaluationError& e) {
    // refinement walked into an overflow: the integrand is too singular there
    fail(ErrorKind::divergence, std::string("circle integral diverges: ") + e.what());
  }
  // Out of intervals with a small error left over is a resolution limit (steep or
  // badly placed features), not divergence; a divergent integrand leaves O(1) behind.
  if (!r.converged && r.error > 1e-7 * std::max(std::abs(r.value), 1.0)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "circle integral did not settle (estimated error %.3e)", r.error);
    fail(ErrorKind::divergence, buf);
  }
  return r.value;
}

double singular_window(const HomogeneousKernel& k) {
  if (k.singular_angles().empty()) return 0.0;
  return std::remainder(k.singular_angles().front(), kTwoPi) - kPi;
}

namespace {

std::vector<double> kink_breaks(const HomogeneousKernel& k) {
  // table kernels have kinks at their nodes; everything else is handled adaptively
  return k.singular_angles();
}

}  // namespace

double mean_zero_defect(const HomogeneousKernel& k, const SphericalQuadrature& q) {
  if (k.dim() == 2) return std::abs(circle_integral(k.arc(), kink_breaks(k)));
  return std::abs(integrate(q, [&](const Vec& u) { return k.on_sphere(u); }));
}

double mean_zero_defect(const HomogeneousKernel& k) { return mean_zero_defect(k, default_quadrature(k.dim())); }

namespace {

double ls_integral_q(const HomogeneousKernel& k, double s, const SphericalQuadrature& q) {
  require(s >= 1.0 && std::isfinite(s), ErrorKind::invalid_argument, "exponent must be >= 1");
  if (s >= k.lp_limit())
    fail(ErrorKind::divergence, "kernel '" + k.label() + "' is not in L^" + std::to_string(s));
  if (k.dim() == 2) {
    auto g = [&](double t) { return std::pow(std::abs(k.arc()(t)), s); };
    return circle_integral(g, kink_breaks(k), 1e-12, 6000);
  }
  return integrate(q, [&](const Vec& u) { return std::pow(std::abs(k.on_sphere(u)), s); });
}

}  // namespace

double ls_integral(const HomogeneousKernel& k, double s) { return ls_integral_q(k, s, default_quadrature(k.dim())); }

double ls_norm(const HomogeneousKernel& k, double s, const SphericalQuadrature& q) {
  return std::pow(ls_integral_q(k, s, q), 1.0 / s);
}

double ls_norm(const HomogeneousKernel& k, double s) { return ls_norm(k, s, default_quadrature(k.dim())); }

}  // namespace rkl
