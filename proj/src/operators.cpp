#include "rkl/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rkl/error.hpp"
#include "rkl/quadrature.hpp"
#include "rkl/sphere.hpp"

namespace rkl {

TruncationSchedule TruncationSchedule::standard() {
  TruncationSchedule s;
  for (double e = 1e-1; e >= 1e-5 * (1 - 1e-12); e *= 0.5) s.epsilons.push_back(e);
  return s;
}

void TruncationSchedule::validate() const {
  require(!epsilons.empty(), ErrorKind::invalid_argument, "empty truncation schedule");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    require(epsilons[i] > 0.0 && std::isfinite(epsilons[i]), ErrorKind::invalid_argument,
            "truncation radii must be positive");
    if (i > 0) require(epsilons[i] < epsilons[i - 1], ErrorKind::invalid_argument, "truncation radii must decrease");
  }
}

namespace {

// orthonormal frame whose first vector is axis
std::vector<Vec> frame_from(const Vec& axis) {
  const int n = axis.dim();
  std::vector<Vec> f{axis};
  for (int j = 0; j < n && static_cast<int>(f.size()) < n; ++j) {
    Vec e(n);
    e[j] = 1.0;
    for (const Vec& b : f) e -= b * e.dot(b);
    double len = e.norm();
    if (len > 1e-8) f.push_back(e * (1.0 / len));
  }
  return f;
}

bool on_boundary(const Vec& x, const std::vector<Ball>& cons) {
  for (const Ball& b : cons) {
    double d = (x - b.center).norm() - b.radius;
    if (std::abs(d) <= 1e-13 * std::max(b.radius, 1.0)) return true;
  }
  return false;
}

}  // namespace

OperatorEvaluator::OperatorEvaluator(HomogeneousKernel k, double alpha, DensityMeasure mu, Resolution res)
    : k_(std::move(k)), alpha_(alpha), mu_(std::move(mu)), res_(res) {
  require(k_.dim() == mu_.dim(), ErrorKind::invalid_argument, "kernel and measure dimensions differ");
  const int n = k_.dim();
  require(alpha_ >= 0.0 && alpha_ < n, ErrorKind::invalid_argument, "alpha must lie in [0, n)");
  require(res_.rel_tol > 0.0 && res_.max_intervals > 0, ErrorKind::invalid_argument, "bad resolution");
  if (alpha_ == 0.0) mean_zero_ = mean_zero_defect(k_) <= 1e-6;
  if (n == 3) inner_ = quad_circle(res_.inner_nodes);
  if (n == 4) inner_ = quad_sphere(3, 1);
}

double OperatorEvaluator::radial(const Piece& p, const Vec& x, const Vec& w, double a, double b, double eps,
                                 Mode mode) const {
  const double lo = std::max(a, eps);
  if (!(b > lo)) return 0.0;
  const bool pv_origin = mode == Mode::limit && alpha_ == 0.0 && lo == 0.0;
  if (p.profile == Profile::uniform) {
    if (alpha_ > 0.0) return p.amplitude * (std::pow(b, alpha_) - std::pow(lo, alpha_)) / alpha_;
    // the -log(eps) part integrates to zero against a mean-zero kernel
    if (pv_origin) return p.amplitude * std::log(b);
    return p.amplitude * std::log(b / lo);
  }
  QuadOptions opt;
  opt.rel_tol = 0.1 * res_.rel_tol;
  opt.abs_tol = 1e-3 * res_.abs_tol;
  opt.max_intervals = 400;
  if (alpha_ > 0.0) {
    // r = u^{1/alpha} turns r^{alpha-1} dr into du / alpha
    const double ia = 1.0 / alpha_;
    auto f = [&](double u) { return p.value(x + w * std::pow(u, ia)); };
    return ia * integrate_adaptive(f, std::pow(lo, alpha_), std::pow(b, alpha_), {}, opt).value;
  }
  if (pv_origin) {
    const double f0 = p.value(x);
    auto f = [&](double r) { return (p.value(x + w * r) - f0) / r; };
    return integrate_adaptive(f, 0.0, b, {}, opt).value + f0 * std::log(b);
  }
  auto f = [&](double v) { return p.value(x + w * std::exp(v)); };
  return integrate_adaptive(f, std::log(lo), std::log(b), {}, opt).value;
}

double OperatorEvaluator::piece_integral(std::size_t i, const Vec& x, double eps, Mode mode) const {
  const Piece& p = mu_.pieces()[i];
  const std::vector<Ball> cons = mu_.constraints(i);
  const int n = k_.dim();
  const double rmax = (x - p.center).norm() + p.radius + 1.0;
  auto along = [&](const Vec& w) {
    double s = 0.0;
    for (const Segment& g : ray_segments(x, w, cons, rmax)) s += radial(p, x, w, g.lo, g.hi, eps, mode);
    return s;
  };
  QuadOptions opt;
  opt.rel_tol = res_.rel_tol;
  opt.abs_tol = res_.abs_tol;
  opt.max_intervals = res_.max_intervals;
  QuadResult r;
  if (n == 2) {
    // integrate over the angle psi of x - y (so y = x - r (cos psi, sin psi)): the arc
    // function is defined on (0, 2pi] and is resolved best near 0
    std::vector<double> br;
    for (const Ball& b : cons)
      for (double t : tangent_angles(x, b.center, b.radius)) br.push_back(t - kPi);
    for (double s : k_.singular_angles()) br.push_back(s);
    for (double& t : br) {
      while (t <= 0.0) t += kTwoPi;
      while (t > kTwoPi) t -= kTwoPi;
    }
    const ArcFunction& arc = k_.arc();
    auto f = [&](double psi) {
      double rad = along(Vec{-std::cos(psi), -std::sin(psi)});
      return rad == 0.0 ? 0.0 : arc(psi) * rad;
    };
    r = integrate_adaptive(f, 0.0, kTwoPi, br, opt);
  } else {
    Vec d = p.center - x;
    double D = d.norm();
    Vec axis(n);
    if (D > 1e-12 * std::max(p.radius, 1.0))
      axis = d * (1.0 / D);
    else
      axis[0] = 1.0;
    const std::vector<Vec> fr = frame_from(axis);
    std::vector<double> br;
    if (D > p.radius) br.push_back(std::asin(p.radius / D));
    const double xn = x.norm();
    for (const Ball& c : mu_.clips()) {
      if (xn <= c.radius || xn == 0.0) continue;
      double beta = std::acos(std::clamp(-axis.dot(x) / xn, -1.0, 1.0));
      double gam = std::asin(c.radius / xn);
      br.push_back(beta - gam);
      br.push_back(beta + gam);
    }
    const SphericalQuadrature& inner = inner_;
    auto f = [&](double phi) {
      const double c = std::cos(phi), s = std::sin(phi);
      NeumaierSum acc;
      for (int j = 0; j < inner.size(); ++j) {
        Vec w = axis * c;
        for (int m = 0; m + 1 < n; ++m) w += fr[m + 1] * (s * inner.nodes[j][m]);
        double rad = along(w);
        if (rad != 0.0) acc.add(inner.weights[j] * k_.on_sphere(-w) * rad);
      }
      return std::pow(s, n - 2) * acc.value();
    };
    r = integrate_adaptive(f, 0.0, kPi, br, opt);
  }
  if (!r.converged && r.error > std::max(1e-6 * std::abs(r.value), 1e-12)) {
    char buf[120];
    std::snprintf(buf, sizeof buf, "polar quadrature did not settle (value %.6e, error %.3e)", r.value, r.error);
    throw NoConvergence(buf, {r.value});
  }
  return r.value;
}

double OperatorEvaluator::evaluate(const Vec& x, double eps, Mode mode) const {
  require(x.dim() == mu_.dim(), ErrorKind::invalid_argument, "evaluation point has the wrong dimension");
  for (int i = 0; i < x.dim(); ++i)
    if (!std::isfinite(x[i])) throw EvaluationError("evaluation point is not finite", x.to_vector());
  NeumaierSum s;
  for (std::size_t i = 0; i < mu_.pieces().size(); ++i) {
    if (mode == Mode::limit && alpha_ == 0.0) {
      const auto cons = mu_.constraints(i);
      if (on_boundary(x, cons))
        throw NoConvergence("principal value at a support boundary need not exist", x.to_vector());
      if (mu_.in_piece(i, x) && !mean_zero_)
        fail(ErrorKind::divergence, "principal value inside the support needs a mean-zero kernel");
    }
    s.add(piece_integral(i, x, eps, mode));
  }
  double v = s.value();
  if (!std::isfinite(v)) throw EvaluationError("operator value is not finite", x.to_vector());
  return v;
}

double OperatorEvaluator::truncated(const Vec& x, double eps) const {
  require(eps > 0.0 && std::isfinite(eps), ErrorKind::invalid_argument, "truncation radius must be positive");
  return evaluate(x, eps, Mode::truncated);
}

double OperatorEvaluator::value(const Vec& x) const { return evaluate(x, 0.0, Mode::limit); }

double truncated_singular(const HomogeneousKernel& k, const DensityMeasure& mu, const Vec& x, double eps,
                          const Resolution& res) {
  return OperatorEvaluator(k, 0.0, mu, res).truncated(x, eps);
}

namespace {

// polynomial extrapolation to eps = 0 through the given points (Neville)
double neville_at_zero(const std::vector<double>& e, const std::vector<double>& v) {
  std::vector<double> p = v;
  const std::size_t m = e.size();
  for (std::size_t lev = 1; lev < m; ++lev)
    for (std::size_t i = 0; i + lev < m; ++i) p[i] = (e[i + lev] * p[i] - e[i] * p[i + 1]) / (e[i + lev] - e[i]);
  return p[0];
}

double line_at_zero(const std::vector<double>& e, const std::vector<double>& v) {
  const double m = static_cast<double>(e.size());
  double se = 0, sv = 0, see = 0, sev = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    se += e[i];
    sv += v[i];
    see += e[i] * e[i];
    sev += e[i] * v[i];
  }
  double den = m * see - se * se;
  if (den == 0.0) return v.back();
  double slope = (m * sev - se * sv) / den;
  return (sv - slope * se) / m;
}

}  // namespace

PvResult pv_singular(const HomogeneousKernel& k, const DensityMeasure& mu, const Vec& x,
                     const TruncationSchedule& sched, const Resolution& res) {
  sched.validate();
  OperatorEvaluator ev(k, 0.0, mu, res);
  PvResult out;
  for (double e : sched.epsilons) {
    double v = ev.truncated(x, e);
    out.epsilons.push_back(e);
    out.sequence.push_back(v);
    const std::size_t m = out.sequence.size();
    if (m < 2) continue;
    out.increment = std::abs(v - out.sequence[m - 2]);
    if (out.increment < std::max(1e-12, 1e-8 * std::abs(v))) {
      out.value = v;
      out.converged = true;
      return out;
    }
  }
  const auto& s = out.sequence;
  const std::size_t m = s.size();
  out.value = s.back();
  if (m < 3) return out;
  // increments must shrink for the sequence to be Cauchy
  std::vector<double> inc;
  for (std::size_t i = 1; i < m; ++i) inc.push_back(std::abs(s[i] - s[i - 1]));
  const std::size_t t = inc.size();
  bool shrinking = inc[t - 1] < inc[t - 2];
  if (t >= 3) shrinking = shrinking && inc[t - 2] < inc[t - 3];
  if (!shrinking) throw NoConvergence("truncation sequence is not Cauchy", s);
  if (sched.extrapolation == Extrapolation::none) return out;
  const std::size_t take = std::min<std::size_t>(3, m);
  std::vector<double> e(out.epsilons.end() - take, out.epsilons.end());
  std::vector<double> v(s.end() - take, s.end());
  out.value = sched.extrapolation == Extrapolation::richardson ? neville_at_zero(e, v) : line_at_zero(e, v);
  out.extrapolated = true;
  return out;
}

double principal_value(const HomogeneousKernel& k, const DensityMeasure& mu, const Vec& x, const Resolution& res) {
  return OperatorEvaluator(k, 0.0, mu, res).value(x);
}

double fractional(const HomogeneousKernel& k, double alpha, const DensityMeasure& mu, const Vec& x,
                  const Resolution& res) {
  require(alpha > 0.0 && alpha < k.dim(), ErrorKind::invalid_argument, "fractional order must lie in (0, n)");
  return OperatorEvaluator(k, alpha, mu, res).value(x);
}

double far_field_asymptotic(const HomogeneousKernel& k, double alpha, const DensityMeasure& mu, const Vec& x) {
  const int n = k.dim();
  require(x.dim() == n && mu.dim() == n, ErrorKind::invalid_argument, "dimension mismatch");
  require(alpha >= 0.0 && alpha < n, ErrorKind::invalid_argument, "alpha must lie in [0, n)");
  const double r = x.norm();
  if (!(r > mu.support_radius())) fail(ErrorKind::not_in_far_field, "point lies within the support radius");
  return eval(k, x) * std::pow(r, -(n - alpha)) * mu.total_mass();
}

DilationResidual dilation_residual(const HomogeneousKernel& k, double alpha, const DensityMeasure& mu, double t,
                                   const Vec& x, const TruncationSchedule& sched, const Resolution& res) {
  require(t > 0.0 && std::isfinite(t), ErrorKind::invalid_argument, "dilation factor must be positive");
  const int n = k.dim();
  DilationResidual d;
  if (t == 1.0) {
    d.lhs = d.rhs = alpha == 0.0 ? pv_singular(k, mu, x, sched, res).value : fractional(k, alpha, mu, x, res);
    return d;
  }
  const DensityMeasure mt = scale(mu, t);
  const Vec xs = x * (1.0 / t);
  if (alpha == 0.0) {
    d.lhs = pv_singular(k, mt, x, sched, res).value;
    d.rhs = std::pow(t, -n) * pv_singular(k, mu, xs, sched, res).value;
  } else {
    d.lhs = fractional(k, alpha, mt, x, res);
    d.rhs = std::pow(t, -(n - alpha)) * fractional(k, alpha, mu, xs, res);
  }
  d.residual = std::abs(d.lhs - d.rhs);
  const double scale_ = std::max(std::abs(d.lhs), std::abs(d.rhs));
  d.relative = scale_ > 0.0 ? d.residual / scale_ : 0.0;
  return d;
}

}  // namespace rkl
