#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "rkl/error.hpp"

namespace rkl {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Cached m-point Gauss-Legendre rule. Thread-safe; the reference stays valid.
const GaussRule& gauss_legendre(int m);

/// 21-point Kronrod extension of the 10-point Gauss rule, positive half.
/// Index 0 is the centre node; Gauss nodes sit at odd indices.
struct KronrodTable {
  double xk[11];
  double wk[11];
  double wg[5];
};
const KronrodTable& kronrod21();

/// Compensated (Neumaier) running sum; order-sensitive but far less so than naive.
class NeumaierSum {
 public:
  void add(double v) noexcept {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      c_ += (sum_ - t) + v;
    else
      c_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

struct QuadOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  int max_intervals = 2000;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = true;
  /// Error parked on intervals too narrow to bisect in floating point.
  double floor_error = 0.0;
};

namespace detail {

struct GkPiece {
  double a, b, value, error;
  bool splittable;
  bool operator<(const GkPiece& o) const noexcept { return error < o.error; }
};

template <class F>
GkPiece gk21_piece(F& f, double a, double b) {
  const KronrodTable& t = kronrod21();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[21];
  fv[0] = f(c);
  for (int i = 1; i < 11; ++i) {
    fv[2 * i - 1] = f(c - h * t.xk[i]);
    fv[2 * i] = f(c + h * t.xk[i]);
  }
  for (double v : fv) {
    if (!std::isfinite(v)) {
      // locate the first offending node for the report
      double bad = c;
      if (!std::isfinite(fv[0])) bad = c;
      else
        for (int i = 1; i < 11; ++i) {
          if (!std::isfinite(fv[2 * i - 1])) { bad = c - h * t.xk[i]; break; }
          if (!std::isfinite(fv[2 * i])) { bad = c + h * t.xk[i]; break; }
        }
      throw EvaluationError("integrand is not finite", {bad});
    }
  }
  double rk = t.wk[0] * fv[0];
  double rg = 0.0;
  double rabs = std::abs(rk);
  for (int i = 1; i < 11; ++i) {
    double s = fv[2 * i - 1] + fv[2 * i];
    rk += t.wk[i] * s;
    rabs += t.wk[i] * (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i]));
    if (i % 2 == 1) rg += t.wg[i / 2] * s;
  }
  const double mean = 0.5 * rk;
  double rasc = t.wk[0] * std::abs(fv[0] - mean);
  for (int i = 1; i < 11; ++i)
    rasc += t.wk[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
  rk *= h;
  rabs *= std::abs(h);
  rasc *= std::abs(h);
  double err = std::abs((rk - rg * h));
  if (rasc != 0.0 && err != 0.0) err = rasc * std::min(1.0, std::pow(200.0 * err / rasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (rabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(err, 50.0 * eps * rabs);
  const double mid_a = 0.5 * (a + c), mid_b = 0.5 * (c + b);
  // stop bisecting once the width is a few hundred ulps of the location: below that
  // the nodes no longer resolve the integrand and splits only shuffle rounding noise
  bool splittable = mid_a > a && mid_a < c && mid_b > c && mid_b < b &&
                    (b - a) > 128.0 * eps * std::max(std::abs(a), std::abs(b));
  return {a, b, rk, err, splittable};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod 21 integration of f over [a, b].
/// Breakpoints strictly inside (a, b) seed the initial partition; the rule never
/// evaluates f at interval endpoints, so integrable endpoint singularities are fine.
/// Returns converged=false when the interval budget runs out.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, std::span<const double> breakpoints = {},
                              const QuadOptions& opt = {}) {
  if (!(b > a)) return {0.0, 0.0, 0, true};
  std::vector<double> cuts{a};
  for (double p : breakpoints)
    if (p > a && p < b) cuts.push_back(p);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::GkPiece> heap;
  std::vector<detail::GkPiece> frozen;
  NeumaierSum val;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto p = detail::gk21_piece(f, cuts[i], cuts[i + 1]);
    val.add(p.value);
    err += p.error;
    heap.push(p);
  }
  int count = static_cast<int>(heap.size());
  double total = val.value();
  double frozen_err = 0.0;
  while (err - frozen_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    if (heap.empty() || count >= opt.max_intervals) break;
    detail::GkPiece top = heap.top();
    heap.pop();
    if (!top.splittable) {
      frozen_err += top.error;
      frozen.push_back(top);
      continue;
    }
    double m = 0.5 * (top.a + top.b);
    auto l = detail::gk21_piece(f, top.a, m);
    auto r = detail::gk21_piece(f, m, top.b);
    val.add(l.value + r.value - top.value);
    err += l.error + r.error - top.error;
    total = val.value();
    heap.push(l);
    heap.push(r);
    ++count;
  }
  // recompute from the final partition to avoid drift in the running sums
  NeumaierSum v2;
  double e2 = 0.0;
  std::vector<detail::GkPiece> all = std::move(frozen);
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  for (const auto& p : all) {
    v2.add(p.value);
    e2 += p.error;
  }
  QuadResult res;
  res.value = v2.value();
  res.error = e2;
  res.intervals = count;
  res.floor_error = frozen_err;
  const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(res.value)) * 1.0000001;
  // error stuck at the floating-point resolution limit counts as converged when it is
  // small in relative terms; a genuinely divergent integrand leaves far more behind
  res.converged = e2 <= tol || (e2 - frozen_err <= tol && frozen_err <= 1e-6 * std::max(std::abs(res.value), 1.0));
  return res;
}

/// Fixed m-point Gauss-Legendre on [a, b].
template <class F>
double integrate_gauss(F&& f, double a, double b, int m) {
  const GaussRule& g = gauss_legendre(m);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(c + h * g.x[i]);
  return s * h;
}

}  // namespace rkl
