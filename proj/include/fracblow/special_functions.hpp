#pragma once

#include <complex>
#include <vector>

namespace fracblow {

/// Gamma function for x > 0. Throws DomainError for x <= 0 and OverflowError above 171.6.
double gamma(double x);

/// Digamma (psi) function for x > 0.
double digamma(double x);

/// Parameters of the two-parameter Mittag-Leffler function E_{alpha,beta}.
struct MlfParams {
  double alpha = 1.0;
  double beta = 1.0;

  /// Throws ParameterError unless 0 < alpha <= 1 and beta > 0.
  void validate() const;
};

/// Evaluator of E_{alpha,beta}(z) for real z.
///
/// The evaluator precomputes everything that depends only on (alpha, beta), so
/// repeated calls (one per spectral mode and time step in the solvers) cost a few
/// hundred flops at most. Regimes:
///   - z >= 0: power series summed in log space (all terms positive);
///   - small |z|^(1/alpha): power series with compensated summation;
///   - large -z: algebraic asymptotic expansion, used whenever the reflection
///     envelope Gamma(alpha k + 1 - beta) / (pi x^k) of its terms drops below
///     double precision relative to the sum;
///   - otherwise: Bromwich inversion of s^(alpha-beta)/(s^alpha + x) on a
///     parabolic contour (trapezoidal rule, conjugate-symmetric half sum);
///   - alpha == 1 and z < 0: exponential / Kummer-transformed series.
/// Instances are immutable after construction and safe to share between threads.
class MittagLeffler {
 public:
  explicit MittagLeffler(MlfParams params);

  double operator()(double z) const;

  const MlfParams& params() const { return params_; }

 private:
  double positive_series(double z) const;
  double alternating_series(double z) const;
  bool asymptotic(double x, double& value) const;
  double contour(double x) const;
  double unit_alpha_negative(double x) const;

  MlfParams params_;
  std::vector<double> inv_gamma_series_;  // 1/Gamma(alpha k + beta), leading terms
  std::vector<double> inv_gamma_asym_;    // 1/Gamma(beta - alpha k), k >= 1
  std::vector<double> log_envelope_;      // log of a bound on |inv_gamma_asym_[k]|
  bool terminating_ = false;              // inv_gamma_asym_ vanishes from some k on
  std::vector<std::complex<double>> node_weight_;  // e^s s'(u) s^(alpha-beta) h / (2 pi)
  std::vector<std::complex<double>> node_s_alpha_; // s^alpha
};

/// One-shot evaluation of E_{alpha,beta}(z). Prefer MittagLeffler for repeated calls.
double mittag_leffler(const MlfParams& params, double z);

}  // namespace fracblow
