#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>

#include "fracblow/time_mesh.hpp"

namespace fracblow {

/// f(t, y) = c(t) y + g(t).
struct LinearRhs {
  std::function<double(double)> c;
  std::function<double(double)> g;
};

/// f(t, y) = c0 y^p + g(t), with y^p read as max(y, 0)^p. g may be empty (zero).
struct PowerRhs {
  double c0 = 1.0;
  double p = 2.0;
  std::function<double(double)> g;
};

/// f(t, y) = Gamma(2 alpha + 1)/Gamma(alpha + 1) sqrt(y). With y0 = 0 both y = 0 and
/// y = t^(2 alpha) solve the problem.
struct SqrtCounterexampleRhs {};

using FodeRhs = std::variant<LinearRhs, PowerRhs, SqrtCounterexampleRhs>;

/// d_t^alpha (y - y0) = f(t, y) on (0, horizon).
struct FodeProblem {
  double alpha = 0.5;
  double y0 = 1.0;
  FodeRhs rhs = PowerRhs{};
  double horizon = 1.0;

  void validate() const;
  double f(double t, double y) const;
  double df_dy(double t, double y) const;
};

enum class FodeScheme { implicit_l1, predictor_corrector };

/// Which solution the sqrt counterexample follows. `zero` lets the solver pick
/// (it stays on y = 0); `analytic_seed` sets y(t_1) = t_1^(2 alpha).
enum class FodeBranch { zero, analytic_seed };

enum class StopReason { reached_end, cap_exceeded, step_limit };

std::string to_string(FodeScheme s);
std::string to_string(StopReason r);

struct FodeOptions {
  FodeScheme scheme = FodeScheme::implicit_l1;
  double cap = 1e8;
  FodeBranch branch = FodeBranch::zero;
  /// Total number of step halvings allowed over the whole march.
  int max_halvings = 40;
};

struct BlowupEstimate {
  bool detected = false;
  /// Extrapolated blowup time (infinity when not detected).
  double t_blow = 0.0;
  /// Fitted exponent m in y ~ C (t_blow - t)^-m.
  double m_fit = 0.0;
  double c_fit = 0.0;
  /// First node time with |y| > cap (NaN if the cap was never crossed).
  double threshold_hit = 0.0;
  StopReason reason = StopReason::reached_end;
};

struct FodeSolution {
  TimeSeries y;
  BlowupEstimate blowup;
  /// Number of step halvings inserted by the march.
  int halvings = 0;
};

/// March the problem over `mesh`. Steps are halved when the per-step equation has
/// no root near the previous value, or when a superlinear power problem more than
/// doubles in one step. The returned series lives on the accepted nodes (the input
/// nodes plus any inserted ones, truncated at the stopping point).
FodeSolution solve_fode(const FodeProblem& problem, const TimeMesh& mesh, const FodeOptions& options = {});

/// Least-squares fit of y ~ C (T - t)^-m to the last `count` samples, optimizing T.
BlowupEstimate fit_blowup(std::span<const double> t, std::span<const double> y, std::size_t count = 10);

/// Discrete positivity for d_t^alpha y - c(t) y = f with y(0) = 0: solves the linear
/// problem with the implicit L1 scheme on the mesh of c and reports whether
/// min y >= -1e-8 max |y|.
bool check_lemma1_positivity(double alpha, const TimeSeries& c, const TimeSeries& f);

/// Nodewise residual d_t^alpha (y - a0) - c0 y^p of a sampled function (the L1
/// derivative plus the jump term (y(0) - a0) t^-alpha / Gamma(1 - alpha)).
TimeSeries power_residual(double alpha, double c0, double p, double a0, const TimeSeries& y);

/// Certification tolerance for power_residual: ten times the difference between
/// the residual on the mesh and on the every-other-node mesh, plus a rounding floor.
TimeSeries power_residual_tolerance(double alpha, double c0, double p, double a0, const TimeSeries& y);

/// Comparison check for d_t^alpha (y - a0) >= c0 y^p and d_t^alpha (z - a0) <= c0 z^p.
/// Throws PreconditionViolation when the residual signs fail beyond tolerance;
/// otherwise returns whether y >= z - 1e-6 max(|y|, |z|) at every node.
bool check_lemma2_comparison(double alpha, double c0, double p, double a0, const TimeSeries& y_src,
                             const TimeSeries& z_src);

}  // namespace fracblow
