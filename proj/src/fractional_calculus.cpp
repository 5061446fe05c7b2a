#include "fracblow/fractional_calculus.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "fracblow/error.hpp"
#include "fracblow/special_functions.hpp"
#include "kernel_weights.hpp"

namespace fracblow {
namespace {

void check_caputo_order(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ParameterError("Caputo derivative: alpha must lie in (0,1), got " + std::to_string(alpha));
}

}  // namespace

double caputo_l1_node(std::span<const double> nodes, std::span<const double> values,
                      std::size_t n, double alpha) {
  if (n == 0) return 0.0;
  const double expo = 1.0 - alpha;
  const double tn = nodes[n];
  double sum = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const double tau = nodes[j] - nodes[j - 1];
    sum += (values[j] - values[j - 1]) / tau * detail::pow_diff(tn - nodes[j - 1], tau, expo);
  }
  return sum / gamma(2.0 - alpha);
}

TimeSeries caputo_l1(const TimeMesh& mesh, std::span<const double> values, double alpha) {
  check_caputo_order(alpha);
  if (values.size() != mesh.size())
    throw MeshMismatchError("caputo_l1: " + std::to_string(values.size()) + " values for " +
                            std::to_string(mesh.size()) + " nodes");
  std::vector<double> out(mesh.size(), 0.0);
  for (std::size_t n = 1; n < mesh.size(); ++n) out[n] = caputo_l1_node(mesh.nodes(), values, n, alpha);
  return TimeSeries(mesh, std::move(out));
}

TimeSeries caputo_l1(const TimeSeries& f, double alpha) { return caputo_l1(f.mesh, f.values, alpha); }

TimeSeries rl_integral(const TimeSeries& f, double beta) {
  if (!(beta > 0.0))
    throw ParameterError("rl_integral: beta must be positive, got " + std::to_string(beta));
  const auto t = f.mesh.nodes();
  const double g1 = 1.0 / gamma(beta + 1.0);
  const double g2 = 1.0 / gamma(beta + 2.0);
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t n = 1; n < t.size(); ++n) {
    double sum = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      const auto w = detail::rl_trapezoid_weights(t[n] - t[j - 1], t[j] - t[j - 1], beta, g1, g2);
      sum += w.left * f.values[j - 1] + w.right * f.values[j];
    }
    out[n] = sum;
  }
  return TimeSeries(f.mesh, std::move(out));
}

double caputo_reciprocal_power(int m, double horizon, double alpha, double t,
                               std::optional<long> kmax) {
  check_caputo_order(alpha);
  if (m < 1) throw ParameterError("caputo_reciprocal_power: m must be a positive integer");
  if (!(horizon > 0.0)) throw ParameterError("caputo_reciprocal_power: T must be positive");
  if (!(t >= 0.0) || !(t < horizon))
    throw DomainError("caputo_reciprocal_power: need 0 <= t < T, got t=" + std::to_string(t));
  const double ratio = t / horizon;
  if (ratio >= 1.0 - 1e-12)
    throw ConvergenceError("caputo_reciprocal_power: t/T too close to 1 for the series");
  if (t == 0.0) return 0.0;
  if (kmax) {
    if (*kmax < 0 || std::pow(ratio, double(*kmax)) >= 1e-16 / (1.0 - ratio))
      throw ParameterError("caputo_reciprocal_power: kmax too small for t/T = " + std::to_string(ratio));
  }

  // c_k = (k+m)!/Gamma(k+2-alpha) (t/T)^k, c_{k+1}/c_k = (t/T)(k+m+1)/(k+2-alpha)
  double factorial_m = 1.0;
  for (int j = 2; j <= m; ++j) factorial_m *= j;
  double term = factorial_m / gamma(2.0 - alpha);
  double sum = 0.0;
  for (long k = 0;; ++k) {
    sum += term;
    const double q = ratio * (double(k) + m + 1.0) / (double(k) + 2.0 - alpha);
    if (kmax) {
      if (k >= *kmax) break;
    } else if (q < 1.0 && term * q / (1.0 - q) <= 1e-16 * sum) {
      break;  // q_k decreases in k (m + 1 > 2 - alpha), so the tail is below a geometric series
    }
    term *= q;
  }
  const double prefactor =
      std::pow(t, 1.0 - alpha) / (std::pow(horizon, m + 1) * (factorial_m / m));
  return prefactor * sum;
}

double caputo_reciprocal_power_majorant(int m, double horizon, double alpha, double t) {
  return std::pow(horizon, 1.0 - alpha) * m / gamma(2.0 - alpha) / std::pow(horizon - t, m + 1);
}

}  // namespace fracblow
