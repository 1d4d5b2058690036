#include "rkl/dini.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "rkl/error.hpp"
#include "rkl/quadrature.hpp"
#include "rkl/rng.hpp"

namespace rkl {

std::string to_string(ModulusKind k) { return k == ModulusKind::rotation ? "rotation" : "translation"; }

std::string ModulusCurve::to_csv() const {
  std::ostringstream os;
  os << "# sampled modulus of continuity; values are sampled suprema\n";
  os << "delta,value,kind,q_exponent,budget\n";
  char buf[128];
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", deltas[i], values[i]);
    os << buf << to_string(kind);
    std::snprintf(buf, sizeof buf, ",%.17g,%d\n", q_exponent, budget);
    os << buf;
  }
  return os.str();
}

double example22_g(double s) {
  require(s >= 0.0 && s < kTwoPi, ErrorKind::invalid_argument, "g needs 0 <= s < 2pi");
  return 4.0 * (std::sqrt(kTwoPi - s) - std::sqrt(kTwoPi) + std::sqrt(s));
}

std::vector<double> log_grid(double lo, double hi, int count) {
  require(lo > 0.0 && hi >= lo && count >= 1, ErrorKind::invalid_argument, "bad log grid");
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) g[i] = std::exp(a + (b - a) * i / (count - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

double extreme_angle(double delta) { return 2.0 * std::asin(std::min(delta, 2.0) * 0.5); }

namespace {

void check_delta(double delta) {
  require(delta > 0.0 && delta <= 1.0, ErrorKind::invalid_argument, "delta must lie in (0, 1]");
}

// Angles theta where the direction of e^{i theta} + h equals one of the singular angles.
std::vector<double> shifted_breaks(const HomogeneousKernel& k, const Vec& h) {
  std::vector<double> out;
  // x' + h sweeps fastest where x' points against h
  if (h.norm() > 0.5) out.push_back(std::atan2(-h[1], -h[0]));
  for (double s : k.singular_angles()) {
    out.push_back(s);
    double ex = std::cos(s), ey = std::sin(s);
    double eh = ex * h[0] + ey * h[1];
    double disc = eh * eh - h.norm2() + 1.0;
    if (disc < 0.0) continue;
    double t = eh + std::sqrt(disc);
    out.push_back(std::atan2(t * ey - h[1], t * ex - h[0]));
  }
  return out;
}

double shifted_arc(const HomogeneousKernel& k, double theta, const Vec& h) {
  return k.arc()(arc_angle(std::cos(theta) + h[0], std::sin(theta) + h[1]));
}

double golden_max(const std::function<double(double)>& f, double a, double b, int iters, double& arg) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  arg = fc > fd ? c : d;
  return std::max(fc, fd);
}

// Random rotation with operator distance exactly 2 sin(s/2): a plane rotation by s
// conjugated by a random orthogonal frame.
Rotation random_rotation(int n, double s, Rng& rng) {
  std::vector<Vec> basis;
  while (static_cast<int>(basis.size()) < n) {
    Vec v = rng.unit_vector(n);
    for (const Vec& b : basis) v -= b * v.dot(b);
    double r = v.norm();
    if (r < 1e-6) continue;
    basis.push_back(v * (1.0 / r));
  }
  std::vector<double> m(n * n, 0.0);
  const double c = std::cos(s), sn = std::sin(s);
  // R = c (b0 b0' + b1 b1') + sn (b1 b0' - b0 b1') + sum_{k>=2} bk bk'
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = c * (basis[0][i] * basis[0][j] + basis[1][i] * basis[1][j]) +
                 sn * (basis[1][i] * basis[0][j] - basis[0][i] * basis[1][j]);
      for (int k = 2; k < n; ++k) v += basis[k][i] * basis[k][j];
      m[i * n + j] = v;
    }
  return Rotation::from_matrix(n, m);
}

}  // namespace

double rotation_integral(const HomogeneousKernel& k, double s) {
  require(k.dim() == 2, ErrorKind::invalid_argument, "angle form needs n = 2");
  s = std::fmod(s, kTwoPi);
  if (s < 0.0) s += kTwoPi;
  if (s == 0.0) return 0.0;
  // Split where theta + s wraps past 2pi and integrate the wrapped part in its own
  // offset variable, so angles near the seam keep full floating-point resolution.
  const auto& arc = k.arc();
  QuadOptions opt;
  opt.rel_tol = 1e-11;
  opt.abs_tol = 1e-13;
  opt.max_intervals = 4000;
  std::vector<double> b1, b2;
  for (double a : k.singular_angles()) {
    b1.push_back(a);
    b1.push_back(a - s);
    b2.push_back(a);
    b2.push_back(a - (kTwoPi - s));
  }
  auto f1 = [&](double t) { return std::abs(arc(t + s) - arc(t)); };
  auto f2 = [&](double u) { return std::abs(arc(u) - arc(kTwoPi - s + u)); };
  QuadResult r1, r2;
  try {
    r1 = integrate_adaptive(f1, 0.0, kTwoPi - s, b1, opt);
    r2 = integrate_adaptive(f2, 0.0, s, b2, opt);
  } catch (const EvaluationError& e) {
    fail(ErrorKind::divergence, std::string("rotation integral diverges: ") + e.what());
  }
  for (const QuadResult* r : {&r1, &r2})
    if (!r->converged && r->error > 1e-7 * std::max(std::abs(r->value), 1.0))
      fail(ErrorKind::divergence, "rotation integral did not settle");
  return r1.value + r2.value;
}

double rotation_integral(const HomogeneousKernel& k, const Rotation& rho, const SphericalQuadrature& q) {
  require(rho.dim() == k.dim(), ErrorKind::invalid_argument, "dimension mismatch");
  if (k.dim() == 2) return rotation_integral(k, rho.angle());
  return integrate(q, [&](const Vec& u) { return std::abs(k.on_sphere(rho.apply(u)) - k.on_sphere(u)); });
}

double translation_integral(const HomogeneousKernel& k, const Vec& h, const SphericalQuadrature& q) {
  require(h.dim() == k.dim(), ErrorKind::invalid_argument, "dimension mismatch");
  require(h.norm() < 1.0, ErrorKind::invalid_argument, "translation needs |h| < 1");
  if (k.dim() == 2) {
    auto f = [&](double t) { return std::abs(shifted_arc(k, t, h) - k.at_angle(t)); };
    return circle_integral(f, shifted_breaks(k, h), 1e-11, 4000, singular_window(k));
  }
  return integrate(q, [&](const Vec& u) {
    Vec x = u + h;
    return std::abs(k.on_sphere(x * (1.0 / x.norm())) - k.on_sphere(u));
  });
}

double translation_integral(const HomogeneousKernel& k, const Vec& h) {
  return translation_integral(k, h, default_quadrature(k.dim()));
}

double translated_l1(const HomogeneousKernel& k, const Vec& h) {
  require(h.dim() == k.dim(), ErrorKind::invalid_argument, "dimension mismatch");
  require(h.norm() < 1.0, ErrorKind::invalid_argument, "translation needs |h| < 1");
  if (k.dim() == 2) {
    auto f = [&](double t) { return std::abs(shifted_arc(k, t, h)); };
    return circle_integral(f, shifted_breaks(k, h), 1e-11, 4000, singular_window(k));
  }
  return integrate(default_quadrature(k.dim()), [&](const Vec& u) {
    Vec x = u + h;
    return std::abs(k.on_sphere(x * (1.0 / x.norm())));
  });
}

double rotation_modulus(const HomogeneousKernel& k, double delta, int budget, const SphericalQuadrature& q,
                        std::uint64_t seed) {
  check_delta(delta);
  require(budget >= 1, ErrorKind::invalid_argument, "budget must be positive");
  const double smax = extreme_angle(delta);
  double best = 0.0;
  if (k.dim() == 2) {
    for (int j = budget; j >= 1; --j) {
      double s = smax * j / budget;
      best = std::max(best, rotation_integral(k, s));
      best = std::max(best, rotation_integral(k, -s));
    }
    return best;
  }
  Rng rng(splitmix64(seed));
  for (int j = 0; j < budget; ++j) {
    // half the draws sit on the extreme angle, the rest fill in below it
    double s = (j % 2 == 0) ? smax : smax * rng.uniform_open();
    Rotation rho = random_rotation(k.dim(), s, rng);
    best = std::max(best, rotation_integral(k, rho, q));
  }
  return best;
}

double rotation_modulus(const HomogeneousKernel& k, double delta, int budget) {
  return rotation_modulus(k, delta, budget, default_quadrature(k.dim()), 0);
}

namespace {

// sup over directions at fixed |h| = radius, n = 2; returns the maximizing angle too.
double sup_on_circle(const std::function<double(const Vec&)>& f, double radius, int budget, double& best_phi) {
  double best = -1.0;
  best_phi = 0.0;
  for (int j = 0; j < budget; ++j) {
    double phi = kTwoPi * j / budget;
    double v = f(Vec{radius * std::cos(phi), radius * std::sin(phi)});
    if (v > best) {
      best = v;
      best_phi = phi;
    }
  }
  const double step = kTwoPi / budget;
  double arg = best_phi;
  double refined = golden_max([&](double phi) { return f(Vec{radius * std::cos(phi), radius * std::sin(phi)}); },
                              best_phi - step, best_phi + step, 30, arg);
  if (refined > best) {
    best = refined;
    best_phi = arg;
  }
  return best;
}

double sup_over_shifts(const HomogeneousKernel& k, const std::function<double(const Vec&)>& f, double delta,
                       int budget, std::uint64_t seed, bool shorter_radii) {
  if (k.dim() == 2) {
    double phi = 0.0;
    double best = sup_on_circle(f, delta, budget, phi);
    if (shorter_radii)
      for (double frac : {0.5, 0.25}) {
        double r = delta * frac;
        best = std::max(best, f(Vec{r * std::cos(phi), r * std::sin(phi)}));
      }
    return best;
  }
  Rng rng(splitmix64(seed ^ 0x5bd1e995ULL));
  double best = 0.0;
  for (int j = 0; j < budget; ++j) {
    double r = (shorter_radii && j % 4 == 3) ? delta * rng.uniform_open() : delta;
    best = std::max(best, f(rng.unit_vector(k.dim()) * r));
  }
  return best;
}

}  // namespace

double translation_modulus(const HomogeneousKernel& k, double delta, int budget, const SphericalQuadrature& q,
                           std::uint64_t seed) {
  check_delta(delta);
  require(budget >= 1, ErrorKind::invalid_argument, "budget must be positive");
  require(delta < 1.0, ErrorKind::invalid_argument, "translation modulus needs delta < 1");
  auto f = [&](const Vec& h) { return translation_integral(k, h, q); };
  return sup_over_shifts(k, f, delta, budget, seed, true);
}

double translation_modulus(const HomogeneousKernel& k, double delta, int budget) {
  return translation_modulus(k, delta, budget, default_quadrature(k.dim()), 0);
}

namespace {

void running_max(std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) v[i] = std::max(v[i], v[i - 1]);
}

void check_grid(const std::vector<double>& deltas) {
  require(!deltas.empty(), ErrorKind::invalid_argument, "empty delta grid");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    check_delta(deltas[i]);
    if (i > 0) require(deltas[i] > deltas[i - 1], ErrorKind::invalid_argument, "delta grid must increase");
  }
}

}  // namespace

ModulusCurve rotation_curve(const HomogeneousKernel& k, const std::vector<double>& deltas, int budget,
                            std::uint64_t seed) {
  check_grid(deltas);
  ModulusCurve c{ModulusKind::rotation, 1.0, deltas, {}, budget, seed};
  for (std::size_t i = 0; i < deltas.size(); ++i)
    c.values.push_back(rotation_modulus(k, deltas[i], budget, default_quadrature(k.dim()), splitmix64(seed + i)));
  running_max(c.values);
  return c;
}

ModulusCurve translation_curve(const HomogeneousKernel& k, const std::vector<double>& deltas, int budget,
                               std::uint64_t seed) {
  check_grid(deltas);
  ModulusCurve c{ModulusKind::translation, 1.0, deltas, {}, budget, seed};
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    double d = std::min(deltas[i], 1.0 - 1e-6);
    c.values.push_back(translation_modulus(k, d, budget, default_quadrature(k.dim()), splitmix64(seed + i)));
  }
  running_max(c.values);
  return c;
}

namespace {

// integral over [a, b] of w(d) d^{-1-alpha}, w interpolated as a power law between
// (a, va) and (b, vb).
double segment_integral(double a, double va, double b, double vb, double alpha) {
  if (va <= 0.0 || vb <= 0.0) {
    // linear interpolation in log d, trapezoid
    double fa = va * std::pow(a, -alpha), fb = vb * std::pow(b, -alpha);
    return 0.5 * (fa + fb) * std::log(b / a);
  }
  const double L = std::log(b / a);
  const double p = std::log(vb / va) / L - alpha;
  const double base = va * std::pow(a, -alpha);
  if (std::abs(p * L) < 1e-12) return base * L;
  return base * std::expm1(p * L) / p;
}

// integral over [a, b] of c d^{beta - 1 - alpha}
double power_integral(double c, double beta, double alpha, double a, double b) {
  const double p = beta - alpha;
  if (std::abs(p) < 1e-14) return c * std::log(b / a);
  return c * (std::pow(b, p) - std::pow(a, p)) / p;
}

DiniResult curve_integral(const ModulusCurve& curve, double alpha, double delta_min, double upper) {
  const auto& d = curve.deltas;
  const auto& v = curve.values;
  require(d.size() == v.size(), ErrorKind::invalid_argument, "curve arrays differ in length");
  require(d.size() >= 8, ErrorKind::insufficient_data, "curve needs at least 8 points");
  require(delta_min > 0.0 && delta_min <= d.front(), ErrorKind::invalid_argument,
          "delta_min must lie in (0, smallest grid point]");
  require(upper <= d.back() * (1.0 + 1e-12), ErrorKind::insufficient_data, "curve does not reach the upper limit");
  for (double x : v) require(std::isfinite(x) && x >= 0.0, ErrorKind::invalid_argument, "curve values must be >= 0");

  DiniResult res;
  // fit on the smallest decade
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < d.size() && d[i] <= 10.0 * d.front() * (1.0 + 1e-12); ++i)
    if (v[i] > 0.0) {
      lx.push_back(std::log(d[i]));
      ly.push_back(std::log(v[i]));
    }
  bool zero_tail = true;
  for (std::size_t i = 0; i < d.size() && d[i] <= 10.0 * d.front() * (1.0 + 1e-12); ++i) zero_tail = zero_tail && v[i] == 0.0;
  if (!zero_tail) {
    require(lx.size() >= 2, ErrorKind::insufficient_data, "need two positive values on the smallest decade");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (ly[i] - my);
    }
    res.beta = sxy / sxx;
    res.coeff = std::exp(my - res.beta * mx);
  }

  const double lo_grid = d.front();
  const double top = std::min(upper, lo_grid);
  // part of [0, upper] below the grid
  if (!zero_tail) {
    res.tail_diverging = res.beta <= alpha + 0.01;
    if (!res.tail_diverging) {
      double p = res.beta - alpha;
      res.tail = res.coeff * std::pow(std::min(delta_min, top), p) / p;
    } else {
      res.tail = std::numeric_limits<double>::infinity();
    }
    if (delta_min < top) res.body += power_integral(res.coeff, res.beta, alpha, delta_min, top);
  }
  // grid part
  if (upper > lo_grid) {
    NeumaierSum s;
    for (std::size_t i = 0; i + 1 < d.size() && d[i] < upper; ++i) {
      double b = std::min(d[i + 1], upper);
      double vb = v[i + 1];
      if (b < d[i + 1]) {
        // interpolate the value at the cut
        double t = std::log(b / d[i]) / std::log(d[i + 1] / d[i]);
        vb = (v[i] > 0 && v[i + 1] > 0) ? v[i] * std::pow(v[i + 1] / v[i], t) : v[i] + t * (v[i + 1] - v[i]);
      }
      s.add(segment_integral(d[i], v[i], b, vb, alpha));
    }
    res.body += s.value();
  }
  res.value = res.body + res.tail;
  return res;
}

}  // namespace

DiniResult dini_integral(const ModulusCurve& curve, double alpha, double delta_min) {
  require(alpha >= 0.0 && std::isfinite(alpha), ErrorKind::invalid_argument, "alpha must be >= 0");
  return curve_integral(curve, alpha, delta_min, 1.0);
}

DiniResult tail_function_A(const HomogeneousKernel& k, double r, const ModulusCurve& curve) {
  (void)k;
  require(r > 0.0 && r <= 1.0, ErrorKind::invalid_argument, "r must lie in (0, 1]");
  require(curve.kind == ModulusKind::translation, ErrorKind::invalid_argument, "A(r) needs a translation curve");
  require(!curve.deltas.empty(), ErrorKind::insufficient_data, "empty curve");
  return curve_integral(curve, 0.0, curve.deltas.front(), r);
}

double regularity_ratio(const HomogeneousKernel& k, double delta, int budget) {
  const int n = k.dim();
  require(delta > 0.0 && delta < 1.0 / n, ErrorKind::invalid_argument, "delta must lie in (0, 1/n)");
  double l1 = ls_norm(k, 1.0);
  require(l1 > 0.0, ErrorKind::degenerate_kernel, "kernel has zero L1 norm");
  auto f = [&](const Vec& h) { return translation_integral(k, h); };
  double sup = sup_over_shifts(k, f, delta, budget, 0, false);
  return sup / (n * delta * l1);
}

double translated_l1_ratio(const HomogeneousKernel& k, double delta, int budget) {
  check_delta(delta);
  require(delta < 1.0, ErrorKind::invalid_argument, "needs delta < 1");
  double l1 = ls_norm(k, 1.0);
  require(l1 > 0.0, ErrorKind::degenerate_kernel, "kernel has zero L1 norm");
  auto f = [&](const Vec& h) { return translated_l1(k, h); };
  return sup_over_shifts(k, f, delta, budget, 0, true) / l1;
}

HormanderResult hormander_estimate(const HomogeneousKernel& k, const Vec& y, double r_max) {
  const int n = k.dim();
  require(y.dim() == n, ErrorKind::invalid_argument, "dimension mismatch");
  const double ny = y.norm();
  require(ny > 0.0 && 2.0 * ny < r_max, ErrorKind::invalid_argument, "need 0 < 2|y| < R_max");
  const Vec u = y * (1.0 / ny);
  const double R = r_max / ny;

  auto kern = [&](const Vec& x) {
    double r = x.norm();
    return eval(k, x) / std::pow(r, n);
  };
  // angular integral at radius rho, times rho^{n-1}
  auto sphere_part = [&](double rho) {
    if (n == 2) {
      std::vector<double> br;
      for (double s : k.singular_angles()) {
        br.push_back(s);
        // directions x with x - u pointing along s, |x| = rho
        double ex = std::cos(s), ey = std::sin(s);
        double eu = ex * u[0] + ey * u[1];
        double t = -eu + std::sqrt(eu * eu - 1.0 + rho * rho);
        br.push_back(std::atan2(t * ey + u[1], t * ex + u[0]));
      }
      auto f = [&](double th) {
        Vec x{rho * std::cos(th), rho * std::sin(th)};
        return std::abs(kern(x - u) - k.at_angle(th) / (rho * rho));
      };
      return rho * circle_integral(f, br, 1e-10, 4000, singular_window(k));
    }
    const auto& q = default_quadrature(n);
    double s = integrate(q, [&](const Vec& w) { return std::abs(kern(w * rho - u) - k.on_sphere(w) / std::pow(rho, n)); });
    return s * std::pow(rho, n - 1);
  };

  HormanderResult res;
  NeumaierSum total;
  double a = 2.0;
  while (a < R) {
    double b = std::min(2.0 * a, R);
    double shell = integrate_gauss(sphere_part, a, b, 16);
    if (!std::isfinite(shell)) fail(ErrorKind::divergence, "Hormander shell integral is not finite");
    res.shells.push_back(shell);
    total.add(shell);
    res.radius_reached = b;
    a = b;
    if (shell < 1e-8 * total.value()) {
      res.stopped_early = b < R;
      break;
    }
  }
  res.value = total.value();
  return res;
}

EquivalenceReport modulus_equivalence(const ModulusCurve& rotation, const ModulusCurve& translation, double ratio_lo,
                                      double ratio_hi) {
  require(rotation.deltas == translation.deltas, ErrorKind::invalid_argument, "curves must share a grid");
  EquivalenceReport rep;
  rep.ratio_min = std::numeric_limits<double>::infinity();
  rep.ratio_max = 0.0;
  for (std::size_t i = 0; i < rotation.deltas.size(); ++i) {
    double d = rotation.deltas[i];
    if (d < ratio_lo * (1 - 1e-12) || d > ratio_hi * (1 + 1e-12)) continue;
    double r = rotation.values[i] > 0.0 ? translation.values[i] / rotation.values[i]
                                        : std::numeric_limits<double>::quiet_NaN();
    rep.deltas.push_back(d);
    rep.ratios.push_back(r);
    if (std::isfinite(r)) {
      rep.ratio_min = std::min(rep.ratio_min, r);
      rep.ratio_max = std::max(rep.ratio_max, r);
    }
  }
  rep.c = rep.ratio_max > 0.0 ? std::max(rep.ratio_max, 1.0 / rep.ratio_min) : 0.0;
  auto finite = [](const ModulusCurve& c) {
    DiniResult d = dini_integral(c, 0.0, c.deltas.front());
    return !d.tail_diverging && std::isfinite(d.value);
  };
  rep.rotation_dini_finite = finite(rotation);
  rep.translation_dini_finite = finite(translation);
  rep.verdicts_agree = rep.rotation_dini_finite == rep.translation_dini_finite;
  return rep;
}

}  // namespace rkl
