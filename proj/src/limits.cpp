#include "rkl/limits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "rkl/dini.hpp"
#include "rkl/rng.hpp"

namespace rkl {

double target_constant(const HomogeneousKernel& k, double alpha, const DensityMeasure& mu) {
  require(k.dim() == mu.dim(), ErrorKind::invalid_argument, "kernel and measure dimensions differ");
  return pure_kernel_level_measure(k, alpha, 1.0, mu.total_mass());
}

namespace {

struct Fit {
  double c0 = 0, c1 = 0, var0 = 0, ssr = 0;
  bool ok = false;
};

Fit wls(const std::vector<double>& lam, const std::vector<double>& y, const std::vector<double>& w, double beta) {
  Fit f;
  double S = 0, Sx = 0, Sxx = 0, Sy = 0, Sxy = 0;
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const double x = std::pow(lam[i], beta);
    S += w[i];
    Sx += w[i] * x;
    Sxx += w[i] * x * x;
    Sy += w[i] * y[i];
    Sxy += w[i] * x * y[i];
  }
  const double D = S * Sxx - Sx * Sx;
  if (!(D > 1e-12 * S * Sxx)) return f;
  f.c1 = (S * Sxy - Sx * Sy) / D;
  f.c0 = (Sy - f.c1 * Sx) / S;
  f.var0 = Sxx / D;
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const double res = y[i] - f.c0 - f.c1 * std::pow(lam[i], beta);
    f.ssr += w[i] * res * res;
  }
  f.ok = std::isfinite(f.c0) && std::isfinite(f.c1);
  return f;
}

void check_grid(const std::vector<double>& lambdas) {
  require(!lambdas.empty(), ErrorKind::invalid_argument, "empty lambda grid");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    require(lambdas[i] > 0.0 && std::isfinite(lambdas[i]), ErrorKind::invalid_argument, "lambdas must be positive");
    if (i > 0) require(lambdas[i] < lambdas[i - 1], ErrorKind::invalid_argument, "lambdas must decrease");
  }
}

}  // namespace

double extrapolate_limit(SweepReport& rep) {
  const std::size_t m = rep.products.size();
  require(m >= 1 && rep.lambdas.size() == m, ErrorKind::invalid_argument, "report has no usable products");
  std::vector<double> sig(m, 0.0);
  if (rep.product_low.size() == m && rep.product_high.size() == m)
    for (std::size_t i = 0; i < m; ++i) sig[i] = 0.5 * (rep.product_high[i] - rep.product_low[i]);
  for (double s : sig) require(std::isfinite(s) && s >= 0.0, ErrorKind::invalid_argument, "error bars must be finite");
  const bool weighted = std::all_of(sig.begin(), sig.end(), [](double s) { return s > 0.0; });
  std::vector<double> w(m, 1.0);
  if (weighted)
    for (std::size_t i = 0; i < m; ++i) w[i] = 1.0 / (sig[i] * sig[i]);

  // smallest lambda sits last in a decreasing grid
  auto fallback = [&] {
    rep.extrapolated_limit = rep.products.back();
    rep.extrapolation_stderr = sig.back();
    rep.c1 = 0.0;
    rep.fit_residuals.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) rep.fit_residuals[i] = rep.products[i] - rep.products.back();
    rep.low_confidence = true;
    return rep.extrapolated_limit;
  };
  if (m == 1) return fallback();

  double beta = 1.0;
  Fit f = wls(rep.lambdas, rep.products, w, beta);
  if (!f.ok) return fallback();
  auto residuals = [&](const Fit& g, double b) {
    std::vector<double> r(m);
    for (std::size_t i = 0; i < m; ++i) r[i] = rep.products[i] - g.c0 - g.c1 * std::pow(rep.lambdas[i], b);
    return r;
  };
  std::vector<double> res = residuals(f, beta);
  bool refit = false;
  if (m >= 3 && weighted)
    for (std::size_t i = 0; i < m; ++i) refit = refit || std::abs(res[i]) > 3.0 * sig[i];
  if (refit) {
    // coarse log scan then golden refinement of the weighted residual sum
    auto ssr = [&](double b) {
      Fit g = wls(rep.lambdas, rep.products, w, b);
      return g.ok ? g.ssr : std::numeric_limits<double>::infinity();
    };
    double best = 1.0, best_v = ssr(1.0);
    for (int i = 0; i <= 120; ++i) {
      double b = 0.05 * std::pow(80.0, i / 120.0);
      double v = ssr(b);
      if (v < best_v) {
        best_v = v;
        best = b;
      }
    }
    double lo = best / std::pow(80.0, 1.0 / 120.0), hi = best * std::pow(80.0, 1.0 / 120.0);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 60; ++it) {
      double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
      if (ssr(a) < ssr(b))
        hi = b;
      else
        lo = a;
    }
    double b = 0.5 * (lo + hi);
    Fit g = wls(rep.lambdas, rep.products, w, b);
    if (g.ok && g.ssr <= f.ssr) {
      beta = b;
      f = g;
      res = residuals(f, beta);
      rep.beta_refitted = true;
    }
  }
  rep.beta = beta;
  rep.c1 = f.c1;
  rep.extrapolated_limit = f.c0;
  rep.fit_residuals = res;
  if (weighted)
    rep.extrapolation_stderr = std::sqrt(f.var0);
  else
    rep.extrapolation_stderr = m > 2 ? std::sqrt(f.var0 * f.ssr / (m - 2)) : 0.0;
  rep.low_confidence = false;
  return f.c0;
}

std::vector<double> default_lambda_grid(double lambda_max, double lambda_min) {
  require(lambda_max > 0.0 && lambda_min > 0.0 && lambda_min < lambda_max, ErrorKind::invalid_argument,
          "need 0 < lambda_min < lambda_max");
  const int steps = std::max(1, static_cast<int>(std::ceil(6.0 * std::log10(lambda_max / lambda_min) - 1e-9)));
  std::vector<double> g;
  for (int i = 0; i <= steps; ++i) g.push_back(lambda_max * std::pow(lambda_min / lambda_max, double(i) / steps));
  g.back() = lambda_min;
  return g;
}

SweepReport lambda_sweep(const HomogeneousKernel& k, double alpha, const DensityMeasure& mu,
                         const std::vector<double>& lambdas, std::int64_t budget, std::uint64_t seed,
                         const LevelSetOptions& opt) {
  check_grid(lambdas);
  const int n = k.dim();
  require(alpha >= 0.0 && alpha < n, ErrorKind::invalid_argument, "alpha must lie in [0, n)");
  SweepReport rep;
  rep.alpha = alpha;
  rep.r = n / (n - alpha);
  rep.target = target_constant(k, alpha, mu);
  rep.config = {{"kernel", k.label()}, {"dimension", n},  {"alpha", alpha},   {"measure", describe(mu)},
                {"lambdas", lambdas},  {"budget", budget}, {"seed", seed},     {"tau", opt.tau},
                {"rel_tol", opt.resolution.rel_tol}};
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double lam = lambdas[i];
    LevelSetEstimate e;
    try {
      e = estimate_level_measure(k, alpha, mu, lam, budget, splitmix64(seed + i), opt);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::unreliable_estimate) throw;
      char buf[64];
      std::snprintf(buf, sizeof buf, " (at lambda = %.6g)", lam);
      throw SweepAborted(std::string(err.what()) + buf, rep);
    }
    const double s = std::pow(lam, rep.r);
    rep.lambdas.push_back(lam);
    rep.estimates.push_back(e);
    rep.products.push_back(s * e.measure_value);
    rep.product_stderr.push_back(s * e.stderr_);
    rep.product_low.push_back(std::max(0.0, s * (e.measure_lower - e.stderr_)));
    rep.product_high.push_back(s * (e.measure_upper + e.stderr_));
  }
  extrapolate_limit(rep);
  rep.relative_gap = rep.target != 0.0 ? std::abs(rep.extrapolated_limit - rep.target) / std::abs(rep.target)
                                       : std::abs(rep.extrapolated_limit);
  return rep;
}

WeakTypeReport weak_type_constant(const HomogeneousKernel& k, const DensityMeasure& mu,
                                  const std::vector<double>& lambdas, std::int64_t budget, std::uint64_t seed,
                                  const LevelSetOptions& opt) {
  check_grid(lambdas);
  require(lambdas.front() / lambdas.back() >= 100.0 * (1.0 - 1e-12), ErrorKind::invalid_argument,
          "the lambda grid must cover at least two decades");
  WeakTypeReport rep;
  rep.l1_norm = ls_norm(k, 1.0);
  const ModulusCurve curve = rotation_curve(k, log_grid(1e-3, 1.0, 16), 8, seed);
  rep.dini_term = dini_integral(curve, 0.0, curve.deltas.front()).value;
  rep.reference = rep.l1_norm + rep.dini_term;
  const double tv = mu.total_variation();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    rep.lambdas.push_back(lambdas[i]);
    if (tv == 0.0) {
      rep.ratios.push_back(0.0);
      rep.ratio_stderr.push_back(0.0);
      continue;
    }
    LevelSetEstimate e = estimate_level_measure(k, 0.0, mu, lambdas[i], budget, splitmix64(seed + i), opt);
    rep.ratios.push_back(lambdas[i] * e.measure_value / tv);
    rep.ratio_stderr.push_back(lambdas[i] * e.stderr_ / tv);
  }
  for (std::size_t i = 0; i < rep.ratios.size(); ++i)
    if (i == 0 || rep.ratios[i] > rep.sup) {
      rep.sup = rep.ratios[i];
      rep.argmax_lambda = rep.lambdas[i];
    }
  rep.kappa = rep.reference > 0.0 ? rep.sup / rep.reference : 0.0;
  return rep;
}

nlohmann::json to_json(const SweepReport& r) {
  nlohmann::json est = nlohmann::json::array();
  for (const auto& e : r.estimates) est.push_back(to_json(e));
  const double lo = r.lambdas.empty() ? 0.0 : r.lambdas.back();
  const double hi = r.lambdas.empty() ? 0.0 : r.lambdas.front();
  return {{"type", "sweep"},
          {"alpha", r.alpha},
          {"r", r.r},
          {"lambdas", r.lambdas},
          {"products", r.products},
          {"product_stderr", r.product_stderr},
          {"product_low", r.product_low},
          {"product_high", r.product_high},
          {"extrapolated_limit", r.extrapolated_limit},
          {"extrapolation_stderr", r.extrapolation_stderr},
          {"fit", {{"model", "c0 + c1 * lambda^beta"},
                   {"c1", r.c1},
                   {"beta", r.beta},
                   {"beta_refitted", r.beta_refitted},
                   {"residuals", r.fit_residuals},
                   {"window", {lo, hi}},
                   {"note", "the rate exponent beta is an empirical model; the limit is one-sided (lambda -> 0+)"}}},
          {"low_confidence", r.low_confidence},
          {"target", r.target},
          {"relative_gap", r.relative_gap},
          {"estimates", est},
          {"config", r.config}};
}

nlohmann::json to_json(const WeakTypeReport& r) {
  return {{"type", "weak_type"},     {"lambdas", r.lambdas},     {"ratios", r.ratios},
          {"ratio_stderr", r.ratio_stderr}, {"sup", r.sup},      {"argmax_lambda", r.argmax_lambda},
          {"l1_norm", r.l1_norm},    {"dini_term", r.dini_term}, {"reference", r.reference},
          {"kappa", r.kappa}};
}

std::string sweep_csv(const SweepReport& r) {
  std::ostringstream os;
  os << "# lambda^r * m({|T mu| > lambda}); stderr_low/high are the product minus/plus its error bar\n";
  os << "lambda,product,stderr_low,stderr_high\n";
  char buf[128];
  for (std::size_t i = 0; i < r.lambdas.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r.lambdas[i], r.products[i], r.product_low[i],
                  r.product_high[i]);
    os << buf;
  }
  return os.str();
}

}  // namespace rkl
