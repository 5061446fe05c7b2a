#pragma once

#include <span>
#include <string>
#include <vector>

#include "fracblow/fode_solver.hpp"
#include "fracblow/time_mesh.hpp"

namespace fracblow {

/// Data entering the closed-form blowup bounds.
struct BoundInputs {
  double alpha = 0.5;
  double p = 2.0;
  /// |Omega|^-1 times the integral of a.
  double a_mean = 1.0;
  double a_min = 0.0;
  /// |Omega|.
  double omega = 1.0;

  void validate() const;
  /// Integral of a over Omega.
  double a_total() const { return a_mean * omega; }
};

/// Upper bound for the L1 blowup time:
/// (1 / ((p - 1) Gamma(2 - alpha) a_mean^(p - 1)))^(1/alpha).
double t_star(const BoundInputs& b);

struct TStarInf {
  double value;
  int m;
};

/// Blowup-time bound from the spatially uniform sub-solution, with m = floor(1/(p-1)) + 1.
TStarInf t_star_inf(const BoundInputs& b);

/// Smallest natural m with m (p - 1) >= 1.
int min_m(double p);

/// a0 (T / (T - t))^m.
double lower_solution(double a0, double horizon, int m, double t);

/// |Omega|^(1 - p), the constant in the Hoelder bound of the reaction integral.
double omega0(double omega, double p);

/// Smallest T for which a1 (T/(T - t))^m is a sub-solution of the spatially uniform
/// problem: (a1^(1 - p) m / Gamma(2 - alpha))^(1/alpha).
double linf_lower_threshold(double alpha, double p, double a1, int m);

struct LowerCertificate {
  bool ok = true;
  /// Largest value of residual - tolerance (negative when certified with room).
  double worst_excess = 0.0;
  /// Largest ratio L1 derivative / (c0 eta^p) over the nodes after t_0.
  double worst_ratio = 0.0;
  std::size_t nodes = 0;
};

/// Checks the discrete inequality d_t^alpha (eta - a0) <= c0 eta^p for eta = a0 (T/(T-t))^m
/// sampled on `mesh` (which must end before T), up to power_residual_tolerance.
LowerCertificate certify_lower_solution(double alpha, double c0, double p, double a0, double horizon,
                                        int m, const TimeMesh& mesh);

enum class Verdict { bounded, blowup_within_bound, bound_violated };
std::string to_string(Verdict v);

struct VerifyTolerances {
  double eps_bound = 0.05;
  double eps_low = 0.02;
  /// Lower-bound comparison only on nodes t <= window * t_star.
  double window = 0.9;
};

/// Output of a solver run as seen by the verifier.
struct RunRecord {
  /// Integral of u over Omega (for the ODE reduction: |Omega| y).
  TimeSeries eta;
  BlowupEstimate blowup;
  /// False when the u^p term was switched off.
  bool reaction = true;
};

struct BlowupReport {
  double alpha = 0.0;
  double p = 0.0;
  double a_mean = 0.0;
  double a_min = 0.0;
  double omega = 0.0;
  double omega0 = 0.0;
  /// Infinity for p <= 1.
  double t_star = 0.0;
  /// NaN when a_min <= 0 or p <= 1.
  double t_star_inf = 0.0;
  int m_inf = 0;
  /// m of the lower solution (min_m(p), 0 for p <= 1).
  int m_used = 0;
  /// NaN when no blowup was detected.
  double t_blow_numeric = 0.0;
  bool bound_ok = true;
  bool lower_bound_ok = true;
  /// Smallest eta / lower_solution over the checked nodes (1 when none checked).
  double lower_ratio_min = 1.0;
  std::size_t lower_nodes_checked = 0;
  double eps_bound = 0.0;
  double eps_low = 0.0;
  Verdict verdict = Verdict::bounded;
};

/// Compares a run with the upper bound t_star and with the lower solution
/// a0 (t_star/(t_star - t))^min_m(p). Failures end up in the verdict.
BlowupReport verify_theorem1(const RunRecord& run, const BoundInputs& b, const VerifyTolerances& tol = {});

struct TStarProfile {
  std::vector<double> alpha;
  /// f(alpha) = (C Gamma(2 - alpha))^(-1/alpha).
  std::vector<double> value;
  /// Central finite-difference derivative of f at each alpha.
  std::vector<double> slope;
};

/// The constant C = (p - 1) a_mean^(p - 1) with t_star = (C Gamma(2 - alpha))^(-1/alpha).
double profile_constant(double p, double a_mean);

TStarProfile t_star_profile(double c_pa, std::span<const double> alphas);

}  // namespace fracblow
