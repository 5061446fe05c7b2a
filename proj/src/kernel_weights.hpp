#pragma once

#include <cmath>

namespace fracblow::detail {

/// a^g - (a - tau)^g for 0 < tau <= a without cancellation when tau << a.
inline double pow_diff(double a, double tau, double g) {
  const double ratio = tau / a;
  if (ratio >= 0.25) return std::pow(a, g) - std::pow(a - tau, g);
  return -std::pow(a, g) * std::expm1(g * std::log1p(-ratio));
}

/// Weights of the product trapezoid rule for the kernel r^(beta-1)/Gamma(beta) on one
/// interval: with r = t_n - s running over [a - tau, a], the linear interpolant
/// f_left (r - b)/tau + f_right (a - r)/tau integrates to left f_left + right f_right,
/// where f_left sits at the older node.
struct TrapezoidWeights {
  double left;
  double right;
};

inline TrapezoidWeights rl_trapezoid_weights(double a, double tau, double beta, double inv_gamma_b1,
                                             double inv_gamma_b2) {
  const double b = a - tau;
  const double k1_a = std::pow(a, beta) * inv_gamma_b1;
  const double k1_b = (b > 0.0) ? std::pow(b, beta) * inv_gamma_b1 : 0.0;
  const double k2_mean = pow_diff(a, tau, beta + 1.0) * inv_gamma_b2 / tau;
  return {k1_a - k2_mean, k2_mean - k1_b};
}

}  // namespace fracblow::detail
