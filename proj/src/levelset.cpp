#include "rkl/levelset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "rkl/error.hpp"
#include "rkl/quadrature.hpp"
#include "rkl/rng.hpp"

namespace rkl {

namespace {

void check_alpha(int n, double alpha) {
  require(alpha >= 0.0 && alpha < n && std::isfinite(alpha), ErrorKind::invalid_argument, "alpha must lie in [0, n)");
}

}  // namespace

double pure_kernel_level_measure(const HomogeneousKernel& k, double alpha, double lambda, double mass,
                                 const SphericalQuadrature& q) {
  const int n = k.dim();
  check_alpha(n, alpha);
  require(lambda > 0.0 && std::isfinite(lambda), ErrorKind::invalid_argument, "lambda must be positive");
  require(std::isfinite(mass), ErrorKind::invalid_argument, "mass must be finite");
  if (mass == 0.0) return 0.0;
  const double r = n / (n - alpha);
  const double I = n == 2 ? ls_integral(k, r) : std::pow(ls_norm(k, r, q), r);
  return I * std::pow(std::abs(mass) / lambda, r) / n;
}

double pure_kernel_level_measure(const HomogeneousKernel& k, double alpha, double lambda, double mass) {
  return pure_kernel_level_measure(k, alpha, lambda, mass, default_quadrature(k.dim()));
}

double far_level_measure(const HomogeneousKernel& k, double alpha, double lambda, double mass, double R) {
  const int n = k.dim();
  check_alpha(n, alpha);
  require(lambda > 0.0, ErrorKind::invalid_argument, "lambda must be positive");
  require(R >= 0.0, ErrorKind::invalid_argument, "radius must be nonnegative");
  if (mass == 0.0) return 0.0;
  if (R == 0.0) return pure_kernel_level_measure(k, alpha, lambda, mass);
  const double r = n / (n - alpha);
  const double Rn = std::pow(R, n);
  const double c = std::abs(mass) / lambda;
  // along each direction the set is the shell R < |x| < (c |Omega|)^{1/(n - alpha)}
  auto shell = [&](double w) { return std::max(0.0, std::pow(c * std::abs(w), r) - Rn) / n; };
  if (n == 2) return circle_integral([&](double t) { return shell(k.arc()(t)); }, k.singular_angles(), 1e-10, 6000);
  return integrate(default_quadrature(n), [&](const Vec& u) { return shell(k.on_sphere(u)); });
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

nlohmann::json describe(const DensityMeasure& mu) {
  using nlohmann::json;
  json pieces = json::array();
  for (const Piece& p : mu.pieces()) {
    json j;
    j["profile"] = p.profile == Profile::uniform ? "uniform" : p.profile == Profile::gaussian ? "gaussian" : "custom";
    j["center"] = p.center.to_vector();
    j["radius"] = p.radius;
    j["amplitude"] = p.amplitude;
    if (p.profile == Profile::gaussian) j["sigma"] = p.sigma;
    if (p.profile == Profile::custom) j["t"] = p.t;
    pieces.push_back(j);
  }
  json clips = json::array();
  for (const Ball& b : mu.clips()) clips.push_back({{"center", b.center.to_vector()}, {"radius", b.radius}, {"inside", b.inside}});
  return {{"dimension", mu.dim()}, {"pieces", pieces}, {"clips", clips}};
}

namespace {

struct Annulus {
  double lo, hi;
  int bands, sectors;
  double cell_volume;
  std::size_t first;  // index of its first sample
};

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

LevelSetEstimate estimate_level_measure(const HomogeneousKernel& k, double alpha, const DensityMeasure& mu,
                                        double lambda, std::int64_t budget, std::uint64_t seed,
                                        const LevelSetOptions& opt) {
  const int n = k.dim();
  check_alpha(n, alpha);
  require(mu.dim() == n, ErrorKind::invalid_argument, "kernel and measure dimensions differ");
  require(lambda > 0.0 && std::isfinite(lambda), ErrorKind::invalid_argument, "lambda must be positive");
  if (budget < 1000) fail(ErrorKind::insufficient_budget, "level-set estimation needs a budget of at least 1000 samples");
  require(opt.tau > 0.0 && opt.tau < 1.0, ErrorKind::invalid_argument, "tau must lie in (0, 1)");
  if (alpha == 0.0)
    require(mean_zero_defect(k) <= 1e-6, ErrorKind::invalid_argument, "the singular operator needs a mean-zero kernel");

  LevelSetEstimate est;
  est.lambda = lambda;
  est.alpha = alpha;
  est.seed = seed;
  nlohmann::json cfg{{"kernel", k.label()},     {"dimension", n},   {"alpha", alpha}, {"lambda", lambda},
                     {"budget", budget},        {"seed", seed},     {"tau", opt.tau}, {"measure", describe(mu)},
                     {"rel_tol", opt.resolution.rel_tol}};
  est.config_hash = fnv1a(cfg.dump());

  const double sR = mu.support_radius();
  const double tv = mu.total_variation();
  const double mass = mu.total_mass();
  if (tv == 0.0 || sR == 0.0) return est;

  const double sup = k.sup_abs();
  est.R_out = std::isfinite(sup) ? sR + std::pow(sup * tv / lambda, 1.0 / (n - alpha))
                                 : std::numeric_limits<double>::infinity();
  const double R_tau = n * sR / opt.tau;
  est.R_split = std::max(10.0 * sR, std::min(est.R_out, R_tau));
  est.tau = n * sR / est.R_split;
  if (est.R_split < est.R_out) {
    est.far_lower = far_level_measure(k, alpha, lambda * (1.0 + est.tau), mass, est.R_split);
    est.far_upper = far_level_measure(k, alpha, lambda * (1.0 - est.tau), mass, est.R_split);
  }
  est.far_field_part = 0.5 * (est.far_lower + est.far_upper);

  // dyadic annuli down to about half the support radius, cells of equal volume inside an
  // annulus, two samples each. Half the budget follows volume, half is shared equally,
  // so the inner annuli stay resolved when R_split is far out.
  int J = static_cast<int>(std::ceil(std::log2(est.R_split / sR))) + 1;
  J = std::clamp(J, 1, 40);
  std::vector<double> edges{0.0};
  for (int j = J; j >= 0; --j) edges.push_back(std::ldexp(est.R_split, -j));
  const double vball = ball_volume(n);
  const double vtot = vball * std::pow(est.R_split, n);
  std::vector<Annulus> ann;
  std::size_t total = 0;
  for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
    const double lo = edges[j], hi = edges[j + 1];
    const double vol = vball * (std::pow(hi, n) - std::pow(lo, n));
    const double share = 0.5 * vol / vtot + 0.5 / static_cast<double>(edges.size() - 1);
    const double target = std::max(1.0, std::round(0.5 * static_cast<double>(budget) * share));
    int bands, sectors;
    if (n == 2) {
      bands = std::max(1, static_cast<int>(std::lround(std::sqrt(target * (hi - lo) / (kPi * (hi + lo))))));
      sectors = std::max(1, static_cast<int>(target / bands));
    } else {
      bands = static_cast<int>(target);
      sectors = 1;
    }
    const double cells = static_cast<double>(bands) * sectors;
    ann.push_back({lo, hi, bands, sectors, vol / cells, total});
    total += 2 * static_cast<std::size_t>(bands) * sectors;
  }

  std::vector<Vec> pts;
  pts.reserve(total);
  Rng rng(seed);
  for (const Annulus& a : ann) {
    const double lo_n = std::pow(a.lo, n), hi_n = std::pow(a.hi, n);
    for (int b = 0; b < a.bands; ++b) {
      const double b0 = lo_n + (hi_n - lo_n) * b / a.bands;
      const double b1 = lo_n + (hi_n - lo_n) * (b + 1) / a.bands;
      for (int s = 0; s < a.sectors; ++s)
        for (int rep = 0; rep < 2; ++rep) {
          const double r = std::pow(b0 + (b1 - b0) * rng.uniform(), 1.0 / n);
          if (n == 2) {
            const double th = kTwoPi * (s + rng.uniform()) / a.sectors;
            pts.push_back(Vec{r * std::cos(th), r * std::sin(th)});
          } else {
            pts.push_back(rng.unit_vector(n) * r);
          }
        }
    }
  }

  const OperatorEvaluator ev(k, alpha, mu, opt.resolution);
  std::vector<double> hit(pts.size(), 0.0);
  std::vector<char> failed(pts.size(), 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto work = [&] {
    constexpr std::size_t chunk = 64;
    for (;;) {
      const std::size_t i0 = next.fetch_add(chunk);
      if (i0 >= pts.size()) return;
      const std::size_t i1 = std::min(pts.size(), i0 + chunk);
      for (std::size_t i = i0; i < i1; ++i) {
        if (pts[i].norm() > est.R_out) continue;
        try {
          hit[i] = std::abs(ev.value(pts[i])) > lambda ? 1.0 : 0.0;
        } catch (const NoConvergence&) {
          failed[i] = 1;
          hit[i] = 0.5;
        } catch (const EvaluationError&) {
          failed[i] = 1;
          hit[i] = 0.5;
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!err) err = std::current_exception();
          next = pts.size();
          return;
        }
      }
    }
  };
  int threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);

  est.samples = static_cast<std::int64_t>(pts.size());
  for (char f : failed) est.failures += f;
  if (est.failures > 0.01 * est.samples) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "operator evaluation failed at %lld of %lld sample points",
                  static_cast<long long>(est.failures), static_cast<long long>(est.samples));
    fail(ErrorKind::unreliable_estimate, buf);
  }

  NeumaierSum near, var;
  for (const Annulus& a : ann) {
    const std::size_t cells = static_cast<std::size_t>(a.bands) * a.sectors;
    for (std::size_t c = 0; c < cells; ++c) {
      const double h1 = hit[a.first + 2 * c], h2 = hit[a.first + 2 * c + 1];
      near.add(a.cell_volume * 0.5 * (h1 + h2));
      var.add(a.cell_volume * a.cell_volume * 0.25 * (h1 - h2) * (h1 - h2));
    }
  }
  est.near_field_part = near.value();
  est.stderr_ = std::sqrt(var.value());
  est.measure_value = est.near_field_part + est.far_field_part;
  est.measure_lower = est.near_field_part + est.far_lower;
  est.measure_upper = est.near_field_part + est.far_upper;
  return est;
}

nlohmann::json to_json(const LevelSetEstimate& e) {
  return {{"lambda", e.lambda},
          {"alpha", e.alpha},
          {"measure_value", e.measure_value},
          {"near_field_part", e.near_field_part},
          {"far_field_part", e.far_field_part},
          {"far_interval", {e.far_lower, e.far_upper}},
          {"measure_interval", {e.measure_lower, e.measure_upper}},
          {"R_split", e.R_split},
          {"R_out", std::isfinite(e.R_out) ? nlohmann::json(e.R_out) : nlohmann::json(nullptr)},
          {"tau", e.tau},
          {"stderr", e.stderr_},
          {"samples", e.samples},
          {"failures", e.failures},
          {"seed", e.seed},
          {"config_hash", hex64(e.config_hash)}};
}

}  // namespace rkl
