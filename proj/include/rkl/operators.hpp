#pragma once

#include <vector>

#include "rkl/kernel.hpp"
#include "rkl/measure.hpp"
#include "rkl/vec.hpp"

namespace rkl {

enum class Extrapolation { none, linear, richardson };

/// Decreasing truncation radii for the principal value.
struct TruncationSchedule {
  std::vector<double> epsilons;
  Extrapolation extrapolation = Extrapolation::richardson;

  /// 1e-1 * 2^-k down to 1e-5.
  static TruncationSchedule standard();
  /// Throws invalid_argument unless strictly decreasing and positive.
  void validate() const;
};

/// Accuracy knobs for the polar quadrature around the evaluation point.
struct Resolution {
  double rel_tol = 1e-10;
  double abs_tol = 1e-15;
  int max_intervals = 3000;
  /// Points on the inner sphere S^{n-2} when n >= 3.
  int inner_nodes = 48;
};

/// T_{Omega,alpha} mu at points, for one (kernel, alpha, measure). alpha = 0 is the
/// singular operator. Integration runs in polar coordinates centred at x, piece by
/// piece; uniform pieces have closed-form radial integrals.
/// Evaluation is const and reentrant, so one evaluator can serve many threads.
class OperatorEvaluator {
 public:
  OperatorEvaluator(HomogeneousKernel k, double alpha, DensityMeasure mu, Resolution res = {});

  const HomogeneousKernel& kernel() const noexcept { return k_; }
  const DensityMeasure& measure() const noexcept { return mu_; }
  double alpha() const noexcept { return alpha_; }

  /// Integral over |x - y| > eps.
  double truncated(const Vec& x, double eps) const;
  /// alpha > 0: the absolutely convergent integral. alpha = 0: the principal value,
  /// computed directly by subtracting the density at x inside the support. Throws
  /// no_convergence when x sits on a support boundary, where the limit need not exist.
  double value(const Vec& x) const;

 private:
  enum class Mode { truncated, limit };
  double evaluate(const Vec& x, double eps, Mode mode) const;
  double piece_integral(std::size_t i, const Vec& x, double eps, Mode mode) const;
  double radial(const Piece& p, const Vec& x, const Vec& w, double a, double b, double eps, Mode mode) const;

  HomogeneousKernel k_;
  double alpha_;
  DensityMeasure mu_;
  Resolution res_;
  bool mean_zero_ = false;
  SphericalQuadrature inner_;  // S^{n-2}, n >= 3
};

double truncated_singular(const HomogeneousKernel& k, const DensityMeasure& mu, const Vec& x, double eps,
                          const Resolution& res = {});

struct PvResult {
  double value = 0.0;
  /// Last increment of the truncation sequence; a proxy for the error.
  double increment = 0.0;
  std::vector<double> epsilons;
  std::vector<double> sequence;
  bool converged = false;     // two consecutive truncations agreed
  bool extrapolated = false;  // value came from the extrapolation rule
};

/// Principal value as the limit of truncations over the schedule.
PvResult pv_singular(const HomogeneousKernel& k, const DensityMeasure& mu, const Vec& x,
                     const TruncationSchedule& sched = TruncationSchedule::standard(), const Resolution& res = {});

/// Direct principal value (no truncation sweep).
double principal_value(const HomogeneousKernel& k, const DensityMeasure& mu, const Vec& x,
                       const Resolution& res = {});

/// T_{Omega,alpha} mu(x) for 0 < alpha < n.
double fractional(const HomogeneousKernel& k, double alpha, const DensityMeasure& mu, const Vec& x,
                  const Resolution& res = {});

/// Leading far-field term Omega(x/|x|) |x|^{-(n - alpha)} mu(R^n).
double far_field_asymptotic(const HomogeneousKernel& k, double alpha, const DensityMeasure& mu, const Vec& x);

struct DilationResidual {
  double lhs = 0.0;  // Op(mu_t)(x)
  double rhs = 0.0;  // t^{-(n - alpha)} Op(mu)(x / t)
  double residual = 0.0;
  double relative = 0.0;
};

/// Checks Op(mu_t)(x) = t^{-(n - alpha)} Op(mu)(x / t).
DilationResidual dilation_residual(const HomogeneousKernel& k, double alpha, const DensityMeasure& mu, double t,
                                   const Vec& x, const TruncationSchedule& sched = TruncationSchedule::standard(),
                                   const Resolution& res = {});

}  // namespace rkl
