#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "fracblow/time_mesh.hpp"

namespace fracblow {

/// L1-scheme Caputo derivative of order alpha in (0,1) at node n >= 1:
///   (1/Gamma(2-alpha)) sum_j (y_j - y_{j-1})/tau_j [(t_n - t_{j-1})^(1-alpha) - (t_n - t_j)^(1-alpha)].
/// Exact for piecewise-linear data. Constants map to zero.
double caputo_l1_node(std::span<const double> nodes, std::span<const double> values,
                      std::size_t n, double alpha);

/// Discrete Caputo derivative of f - f(t_0) at every node. The entry at t_0 is 0
/// (the derivative is undefined there; 0 is the limit for data with bounded slope).
TimeSeries caputo_l1(const TimeSeries& f, double alpha);
TimeSeries caputo_l1(const TimeMesh& mesh, std::span<const double> values, double alpha);

/// Riemann-Liouville integral J^beta f by product trapezoid: the kernel
/// (t-s)^(beta-1)/Gamma(beta) is integrated exactly against the piecewise-linear
/// interpolant of f.
TimeSeries rl_integral(const TimeSeries& f, double beta);

/// Truncated series for the Caputo derivative of (T - t)^-m,
///   t^(1-alpha) / (T^(m+1) (m-1)!) sum_k (k+m)!/Gamma(k+2-alpha) (t/T)^k.
/// Without kmax the series is cut where an a-priori geometric bound puts the
/// tail below 1e-16 of the partial sum. With kmax, the caller's cut must satisfy
/// (t/T)^kmax < 1e-16 / (1 - t/T).
double caputo_reciprocal_power(int m, double horizon, double alpha, double t,
                               std::optional<long> kmax = std::nullopt);

/// Closed-form majorant T^(1-alpha) m / Gamma(2-alpha) (T - t)^-(m+1) of the series above.
double caputo_reciprocal_power_majorant(int m, double horizon, double alpha, double t);

}  // namespace fracblow
