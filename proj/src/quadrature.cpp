#include "rkl/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <map>
#include <memory>
#include <mutex>

#include "rkl/vec.hpp"

namespace rkl {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::unsupported_dimension: return "unsupported-dimension";
    case ErrorKind::evaluation: return "evaluation-error";
    case ErrorKind::construction: return "construction-error";
    case ErrorKind::domain: return "domain-error";
    case ErrorKind::divergence: return "divergence-error";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::degenerate_kernel: return "degenerate-kernel";
    case ErrorKind::no_convergence: return "no-convergence";
    case ErrorKind::not_in_far_field: return "not-in-far-field";
    case ErrorKind::insufficient_budget: return "insufficient-budget";
    case ErrorKind::unreliable_estimate: return "unreliable-estimate";
    case ErrorKind::sweep_aborted: return "sweep-aborted";
    case ErrorKind::schema: return "schema";
  }
  return "unknown";
}

double sphere_area(int n) { return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n); }

double ball_volume(int n) { return sphere_area(n) / n; }

namespace {

GaussRule build_gauss(int m) {
  GaussRule r;
  r.x.resize(m);
  r.w.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= m; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = m * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // one more derivative at the converged root
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= m; ++k) {
      double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = m * (z * p0 - p1) / (z * z - 1.0);
    double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = -z;
    r.x[m - 1 - i] = z;
    r.w[i] = w;
    r.w[m - 1 - i] = w;
  }
  if (m % 2 == 1) r.x[m / 2] = 0.0;
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int m) {
  require(m >= 1 && m <= 512, ErrorKind::invalid_argument, "Gauss-Legendre order out of range");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[m];
  if (!slot) slot = std::make_unique<GaussRule>(build_gauss(m));
  return *slot;
}

const KronrodTable& kronrod21() {
  static const KronrodTable table = [] {
    using gk = boost::math::quadrature::gauss_kronrod<double, 21>;
    using g = boost::math::quadrature::gauss<double, 10>;
    KronrodTable t{};
    const auto& xa = gk::abscissa();
    const auto& wa = gk::weights();
    for (int i = 0; i < 11; ++i) {
      t.xk[i] = xa[i];
      t.wk[i] = wa[i];
    }
    const auto& gw = g::weights();
    for (int i = 0; i < 5; ++i) t.wg[i] = gw[i];
    return t;
  }();
  return table;
}

}  // namespace rkl
