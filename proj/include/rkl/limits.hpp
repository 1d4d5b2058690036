#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "rkl/error.hpp"
#include "rkl/kernel.hpp"
#include "rkl/levelset.hpp"
#include "rkl/measure.hpp"

namespace rkl {

/// (1/n) ||Omega||_r^r |mu(R^n)|^r with r = n / (n - alpha).
double target_constant(const HomogeneousKernel& k, double alpha, const DensityMeasure& mu);

struct SweepReport {
  double alpha = 0.0;
  double r = 1.0;
  std::vector<double> lambdas;         // strictly decreasing
  std::vector<double> products;        // lambda^r * measure
  std::vector<double> product_stderr;  // Monte Carlo part
  std::vector<double> product_low;     // product interval including the far-field sandwich
  std::vector<double> product_high;
  std::vector<LevelSetEstimate> estimates;

  double extrapolated_limit = 0.0;
  double extrapolation_stderr = 0.0;
  double c1 = 0.0;
  double beta = 1.0;
  bool beta_refitted = false;
  std::vector<double> fit_residuals;
  bool low_confidence = false;  // fewer than two points, or an ill-conditioned fit
  double target = 0.0;
  double relative_gap = 0.0;
  nlohmann::json config;
};

/// Raised when a level-set estimate inside a sweep is unreliable; carries the points done so far.
class SweepAborted : public Error {
 public:
  SweepAborted(const std::string& message, SweepReport partial)
      : Error(ErrorKind::sweep_aborted, message), partial_(std::move(partial)) {}
  const SweepReport& partial() const noexcept { return partial_; }

 private:
  SweepReport partial_;
};

/// Products lambda^r m({|T mu| > lambda}) over a decreasing grid, extrapolated to lambda -> 0.
SweepReport lambda_sweep(const HomogeneousKernel& k, double alpha, const DensityMeasure& mu,
                         const std::vector<double>& lambdas, std::int64_t budget, std::uint64_t seed,
                         const LevelSetOptions& opt = {});

/// Weighted least squares c0 + c1 lambda^beta on the report's products; beta = 1 unless the
/// residuals exceed three error bars, in which case beta is refitted. Fills the fit fields
/// of the report and returns c0.
double extrapolate_limit(SweepReport& report);

/// Default grid: geometric, six points per decade, ending at lambda_min.
std::vector<double> default_lambda_grid(double lambda_max, double lambda_min);

struct WeakTypeReport {
  std::vector<double> lambdas;
  std::vector<double> ratios;  // lambda m / |mu|(R^n)
  std::vector<double> ratio_stderr;
  double sup = 0.0;
  double argmax_lambda = 0.0;
  double l1_norm = 0.0;
  double dini_term = 0.0;  // integral over (0, 1) of omega_1(s) / s
  double reference = 0.0;  // l1_norm + dini_term
  double kappa = 0.0;      // sup / reference
};

/// sup over the grid of lambda m({|T mu| > lambda}) / |mu|(R^n), next to ||Omega||_1 + Dini term.
WeakTypeReport weak_type_constant(const HomogeneousKernel& k, const DensityMeasure& mu,
                                  const std::vector<double>& lambdas, std::int64_t budget, std::uint64_t seed,
                                  const LevelSetOptions& opt = {});

nlohmann::json to_json(const SweepReport& r);
nlohmann::json to_json(const WeakTypeReport& r);
/// lambda, product, stderr_low, stderr_high.
std::string sweep_csv(const SweepReport& r);

}  // namespace rkl
