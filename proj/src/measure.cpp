#include "rkl/measure.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "rkl/error.hpp"
#include "rkl/kernel.hpp"
#include "rkl/quadrature.hpp"
#include "rkl/sphere.hpp"

namespace rkl {

std::vector<Segment> ray_segments(const Vec& o, const Vec& w, std::span<const Ball> constraints, double rmax) {
  std::vector<Segment> segs{{0.0, rmax}};
  for (const Ball& c : constraints) {
    Vec d = o - c.center;
    double b = w.dot(d);
    double cc = d.norm2() - c.radius * c.radius;
    double disc = b * b - cc;
    if (disc <= 0.0) {
      if (c.inside) return {};
      continue;
    }
    double s = std::sqrt(disc);
    double r1, r2;
    if (b > 0.0) {
      r1 = -b - s;
      r2 = cc / r1;
    } else {
      r2 = -b + s;
      r1 = r2 != 0.0 ? cc / r2 : -b - s;
    }
    if (r1 > r2) std::swap(r1, r2);
    std::vector<Segment> next;
    for (const Segment& g : segs) {
      if (c.inside) {
        double lo = std::max(g.lo, r1), hi = std::min(g.hi, r2);
        if (hi > lo) next.push_back({lo, hi});
      } else {
        double hi1 = std::min(g.hi, r1);
        if (hi1 > g.lo) next.push_back({g.lo, hi1});
        double lo2 = std::max(g.lo, r2);
        if (g.hi > lo2) next.push_back({lo2, g.hi});
      }
    }
    segs.swap(next);
    if (segs.empty()) break;
  }
  return segs;
}

std::vector<double> tangent_angles(const Vec& o, const Vec& center, double radius) {
  Vec d = center - o;
  double D = d.norm();
  if (!(D > radius) || radius <= 0.0) return {};
  double base = std::atan2(d[1], d[0]);
  double half = std::asin(radius / D);
  return {base - half, base + half};
}

double Piece::value(const Vec& y) const {
  switch (profile) {
    case Profile::uniform: return amplitude;
    case Profile::gaussian: return amplitude * std::exp(-(y - center).norm2() / (2.0 * sigma * sigma));
    case Profile::custom: {
      const int n = y.dim();
      return std::pow(t, -n) * (*base)((y - center) * (1.0 / t));
    }
  }
  return 0.0;
}

namespace {

// integral over [0, x] of exp(-u^2/2) u^{n-1}
double gauss_radial(int n, double x) {
  const double e = std::exp(-0.5 * x * x);
  switch (n) {
    case 2: return -std::expm1(-0.5 * x * x);
    case 3: return std::sqrt(kPi / 2.0) * std::erf(x / std::sqrt(2.0)) - x * e;
    case 4: return 2.0 - e * (x * x + 2.0);
    default: break;
  }
  fail(ErrorKind::unsupported_dimension, "gaussian profile supports n <= 4");
}


// radial integral along a ray from the piece centre, r in [r1, r2]
double centred_radial(const Piece& p, int n, const Vec& w, double r1, double r2, bool absolute) {
  switch (p.profile) {
    case Profile::uniform: {
      double a = absolute ? std::abs(p.amplitude) : p.amplitude;
      return a * (std::pow(r2, n) - std::pow(r1, n)) / n;
    }
    case Profile::gaussian: {
      double a = absolute ? std::abs(p.amplitude) : p.amplitude;
      return a * std::pow(p.sigma, n) * (gauss_radial(n, r2 / p.sigma) - gauss_radial(n, r1 / p.sigma));
    }
    case Profile::custom: {
      auto f = [&](double r) {
        double v = p.value(p.center + w * r);
        return (absolute ? std::abs(v) : v) * std::pow(r, n - 1);
      };
      QuadOptions opt;
      opt.rel_tol = 1e-12;
      opt.abs_tol = 1e-15;
      return integrate_adaptive(f, r1, r2, {}, opt).value;
    }
  }
  return 0.0;
}

double piece_integral(const Piece& p, int n, std::span<const Ball> cons, bool absolute) {
  auto along = [&](const Vec& w) {
    double s = 0.0;
    for (const Segment& g : ray_segments(p.center, w, cons, p.radius)) s += centred_radial(p, n, w, g.lo, g.hi, absolute);
    return s;
  };
  if (n == 2) {
    std::vector<double> br;
    for (const Ball& b : cons)
      for (double a : tangent_angles(p.center, b.center, b.radius)) br.push_back(a);
    auto f = [&](double phi) { return along(Vec{std::cos(phi), std::sin(phi)}); };
    QuadOptions opt;
    opt.rel_tol = 1e-13;
    opt.abs_tol = 1e-15;
    opt.max_intervals = 4000;
    std::vector<double> b2;
    for (double a : br) b2.push_back(std::fmod(std::fmod(a, kTwoPi) + kTwoPi, kTwoPi));
    return integrate_adaptive(f, 0.0, kTwoPi, b2, opt).value;
  }
  return integrate(default_quadrature(n), along);
}


double analytic_mass(const Piece& p, int n, bool absolute) {
  double a = absolute ? std::abs(p.amplitude) : p.amplitude;
  if (p.profile == Profile::uniform) return a * ball_volume(n) * std::pow(p.radius, n);
  return a * std::pow(p.sigma, n) * sphere_area(n) * gauss_radial(n, p.radius / p.sigma);
}

bool overlap(const Piece& a, const Piece& b) { return (a.center - b.center).norm() < a.radius + b.radius - 1e-12; }

}  // namespace

DensityMeasure::DensityMeasure(int n, std::vector<Piece> pieces, std::vector<Ball> clips)
    : n_(n), pieces_(std::move(pieces)), clips_(std::move(clips)) {
  require(n >= 2, ErrorKind::invalid_argument, "measure dimension must be >= 2");
  require(n <= kMaxDim, ErrorKind::unsupported_dimension, "measure dimension must be <= 4");
  for (const Piece& p : pieces_) {
    require(p.center.dim() == n, ErrorKind::invalid_argument, "piece centre has the wrong dimension");
    require(p.radius > 0.0 && std::isfinite(p.radius), ErrorKind::invalid_argument, "piece radius must be positive");
    require(std::isfinite(p.amplitude), ErrorKind::invalid_argument, "piece amplitude must be finite");
    if (p.profile == Profile::gaussian) require(p.sigma > 0.0, ErrorKind::invalid_argument, "sigma must be positive");
    if (p.profile == Profile::custom) require(p.base != nullptr, ErrorKind::invalid_argument, "custom piece without profile");
  }
  for (std::size_t i = 0; i < pieces_.size(); ++i)
    for (std::size_t j = i + 1; j < pieces_.size(); ++j) {
      const Piece& a = pieces_[i];
      const Piece& b = pieces_[j];
      if (!overlap(a, b)) continue;
      bool same_sign = a.profile != Profile::custom && b.profile != Profile::custom && a.amplitude * b.amplitude >= 0.0;
      require(same_sign, ErrorKind::invalid_argument, "overlapping pieces must share a sign");
    }
  for (const Piece& p : pieces_) support_radius_ = std::max(support_radius_, p.center.norm() + p.radius);
  for (const Ball& c : clips_)
    if (c.inside) support_radius_ = std::min(support_radius_, c.radius);

  NeumaierSum m, v;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Piece& p = pieces_[i];
    if (clips_.empty() && p.profile != Profile::custom) {
      m.add(analytic_mass(p, n, false));
      v.add(analytic_mass(p, n, true));
    } else {
      auto cons = constraints(i);
      m.add(piece_integral(p, n, cons, false));
      v.add(piece_integral(p, n, cons, true));
    }
  }
  mass_ = m.value();
  tv_ = v.value();
  require(std::isfinite(mass_) && std::isfinite(tv_), ErrorKind::evaluation, "density is not integrable");
}

bool DensityMeasure::has_analytic_cdf() const noexcept {
  return pieces_.size() == 1 && clips_.empty() && pieces_[0].profile != Profile::custom &&
         pieces_[0].center.norm() == 0.0;
}

std::vector<Ball> DensityMeasure::constraints(std::size_t i) const {
  std::vector<Ball> c{{pieces_[i].center, pieces_[i].radius, true}};
  c.insert(c.end(), clips_.begin(), clips_.end());
  return c;
}

bool DensityMeasure::in_piece(std::size_t i, const Vec& x) const {
  const Piece& p = pieces_[i];
  if ((x - p.center).norm() > p.radius) return false;
  for (const Ball& c : clips_) {
    bool inside = (x - c.center).norm() < c.radius;
    if (inside != c.inside) return false;
  }
  return true;
}

double DensityMeasure::density(const Vec& x) const {
  require(x.dim() == n_, ErrorKind::invalid_argument, "dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i)
    if (in_piece(i, x)) s += pieces_[i].value(x);
  if (!std::isfinite(s)) throw EvaluationError("density is not finite", x.to_vector());
  return s;
}

double DensityMeasure::integrate_ball(const std::optional<Ball>& region, bool absolute) const {
  if (!region) return absolute ? tv_ : mass_;
  NeumaierSum s;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    auto cons = constraints(i);
    cons.push_back(*region);
    s.add(piece_integral(pieces_[i], n_, cons, absolute));
  }
  return s.value();
}

double DensityMeasure::radial_cdf(double r) const {
  if (r <= 0.0) return 0.0;
  if (has_analytic_cdf()) {
    const Piece& p = pieces_[0];
    double rr = std::min(r, p.radius);
    double a = std::abs(p.amplitude);
    if (p.profile == Profile::uniform) return a * ball_volume(n_) * std::pow(rr, n_);
    return a * std::pow(p.sigma, n_) * sphere_area(n_) * gauss_radial(n_, rr / p.sigma);
  }
  if (r >= support_radius_) return tv_;
  return integrate_ball(Ball{Vec(n_), r, true}, true);
}

DensityMeasure disk_bump(int n, double radius, double mass, const std::optional<Vec>& center) {
  require(radius > 0.0 && std::isfinite(radius), ErrorKind::invalid_argument, "radius must be positive");
  require(std::isfinite(mass), ErrorKind::invalid_argument, "mass must be finite");
  Piece p;
  p.profile = Profile::uniform;
  p.center = center ? *center : Vec(n);
  p.radius = radius;
  p.amplitude = mass / (ball_volume(n) * std::pow(radius, n));
  return DensityMeasure(n, {p});
}

DensityMeasure gaussian(int n, double sigma, double cutoff, double mass) {
  require(sigma > 0.0 && cutoff > 0.0, ErrorKind::invalid_argument, "sigma and cutoff must be positive");
  Piece p;
  p.profile = Profile::gaussian;
  p.center = Vec(n);
  p.radius = cutoff;
  p.sigma = sigma;
  p.amplitude = mass / std::pow(kTwoPi * sigma * sigma, 0.5 * n);
  return DensityMeasure(n, {p});
}

DensityMeasure dipole(int n, double offset, double radius, double mass) {
  require(offset >= radius, ErrorKind::invalid_argument, "dipole lobes must not overlap (offset >= radius)");
  Vec e(n);
  e[0] = offset;
  DensityMeasure a = disk_bump(n, radius, mass, e);
  DensityMeasure b = disk_bump(n, radius, -mass, -e);
  return add(a, b);
}

DensityMeasure custom_density(int n, std::function<double(const Vec&)> f, double radius,
                              const std::optional<Vec>& center) {
  require(static_cast<bool>(f), ErrorKind::invalid_argument, "empty density");
  Piece p;
  p.profile = Profile::custom;
  p.center = center ? *center : Vec(n);
  p.radius = radius;
  p.amplitude = 1.0;
  p.base = std::make_shared<const std::function<double(const Vec&)>>(std::move(f));
  return DensityMeasure(n, {p});
}

DensityMeasure add(const DensityMeasure& a, const DensityMeasure& b) {
  require(a.dim() == b.dim(), ErrorKind::invalid_argument, "dimension mismatch");
  require(a.clips().empty() && b.clips().empty(), ErrorKind::invalid_argument, "cannot add clipped measures");
  std::vector<Piece> ps = a.pieces();
  ps.insert(ps.end(), b.pieces().begin(), b.pieces().end());
  return DensityMeasure(a.dim(), ps);
}

DensityMeasure zero_measure(int n) { return DensityMeasure(n, {}); }

double total_variation(const DensityMeasure& mu) { return mu.total_variation(); }

DensityMeasure scale(const DensityMeasure& mu, double t) {
  require(t > 0.0 && std::isfinite(t), ErrorKind::invalid_argument, "scale factor must be positive");
  if (t == 1.0) return mu;
  const int n = mu.dim();
  std::vector<Piece> ps = mu.pieces();
  for (Piece& p : ps) {
    p.center *= t;
    p.radius *= t;
    p.amplitude *= std::pow(t, -n);
    p.sigma *= t;
    p.t *= t;
  }
  std::vector<Ball> cs = mu.clips();
  for (Ball& c : cs) {
    c.center *= t;
    c.radius *= t;
  }
  return DensityMeasure(n, ps, cs);
}

double radius_for_mass(const DensityMeasure& mu, double eps) {
  const double tv = mu.total_variation();
  require(eps > 0.0 && eps < tv, ErrorKind::invalid_argument, "eps must lie in (0, |mu|(R^n))");
  double lo = 0.0, hi = mu.support_radius();
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mu.radial_cdf(mid) < eps)
      lo = mid;
    else
      hi = mid;
  }
  double a = 0.5 * (lo + hi);
  double gap = std::abs(mu.radial_cdf(a) - eps);
  if (gap > 1e-10 * tv) fail(ErrorKind::no_convergence, "radial distribution inversion missed its tolerance");
  return a;
}

SplitMeasure split_at_radius(const DensityMeasure& mu, double R) {
  require(R > 0.0 && std::isfinite(R), ErrorKind::invalid_argument, "split radius must be positive");
  const int n = mu.dim();
  std::vector<Piece> in, out;
  for (const Piece& p : mu.pieces()) {
    double c = p.center.norm();
    if (c - p.radius < R) in.push_back(p);
    if (c + p.radius > R) out.push_back(p);
  }
  std::vector<Ball> ci = mu.clips(), co = mu.clips();
  ci.push_back({Vec(n), R, true});
  co.push_back({Vec(n), R, false});
  SplitMeasure s;
  s.inner = in.empty() ? zero_measure(n) : DensityMeasure(n, in, ci);
  s.outer = out.empty() ? zero_measure(n) : DensityMeasure(n, out, co);
  return s;
}

namespace {

std::vector<double> parse_args(const std::string& spec, std::string& name) {
  auto open = spec.find('(');
  std::string head = spec.substr(0, open);
  head.erase(std::remove_if(head.begin(), head.end(), [](unsigned char c) { return std::isspace(c); }), head.end());
  name = head;
  std::vector<double> args;
  if (open == std::string::npos) return args;
  auto close = spec.rfind(')');
  require(close != std::string::npos && close > open, ErrorKind::invalid_argument, "unbalanced parentheses in '" + spec + "'");
  std::stringstream ss(spec.substr(open + 1, close - open - 1));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      for (std::size_t i = used; i < tok.size(); ++i)
        require(std::isspace(static_cast<unsigned char>(tok[i])), ErrorKind::invalid_argument, "bad number '" + tok + "'");
      args.push_back(v);
    } catch (const std::logic_error&) {
      fail(ErrorKind::invalid_argument, "bad number '" + tok + "' in '" + spec + "'");
    }
  }
  return args;
}

}  // namespace

DensityMeasure measure_from_name(const std::string& spec, int n) {
  std::string name;
  auto a = parse_args(spec, name);
  if (name == "disk_bump") {
    require(a.size() == 2, ErrorKind::invalid_argument, "disk_bump(radius, mass)");
    return disk_bump(n, a[0], a[1]);
  }
  if (name == "gaussian") {
    require(a.size() == 2, ErrorKind::invalid_argument, "gaussian(sigma, cutoff)");
    return gaussian(n, a[0], a[1]);
  }
  if (name == "dipole") {
    require(a.size() == 3, ErrorKind::invalid_argument, "dipole(offset, radius, mass)");
    return dipole(n, a[0], a[1], a[2]);
  }
  fail(ErrorKind::invalid_argument, "unknown measure '" + name + "'");
}

}  // namespace rkl
