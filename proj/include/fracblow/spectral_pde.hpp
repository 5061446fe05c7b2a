#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fracblow/fode_solver.hpp"
#include "fracblow/special_functions.hpp"
#include "fracblow/time_mesh.hpp"

namespace fracblow {

/// Interval (0, L) or rectangle (0, Lx) x (0, Ly) with a midpoint collocation grid.
class Domain {
 public:
  enum class Shape { interval, rectangle };

  static Domain interval(double length, std::size_t quad_points);
  static Domain rectangle(double lx, double ly, std::size_t qx, std::size_t qy);

  Shape shape() const { return shape_; }
  int dimension() const { return shape_ == Shape::interval ? 1 : 2; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  std::size_t qx() const { return qx_; }
  std::size_t qy() const { return qy_; }
  /// Number of grid points (qx qy).
  std::size_t size() const { return qx_ * qy_; }
  double hx() const { return lx_ / double(qx_); }
  double hy() const { return ly_ / double(qy_); }
  double cell_area() const;
  double measure() const;
  /// Grid coordinates; for an interval y() is 0.
  double x(std::size_t i) const { return (double(i) + 0.5) * hx(); }
  double y(std::size_t j) const { return shape_ == Shape::interval ? 0.0 : (double(j) + 0.5) * hy(); }

  bool operator==(const Domain& other) const = default;

 private:
  Domain(Shape shape, double lx, double ly, std::size_t qx, std::size_t qy);

  Shape shape_;
  double lx_;
  double ly_;
  std::size_t qx_;
  std::size_t qy_;
};

std::string describe(const Domain& d);

/// Grid values, stored x-fastest: values[j qx + i] at (x(i), y(j)).
struct Field {
  Domain domain;
  std::vector<double> values;

  Field(Domain d, std::vector<double> v);
  static Field constant(const Domain& d, double c);
  static Field sample(const Domain& d, const std::function<double(double, double)>& f);

  double integral() const;
  double l2_norm() const;
  double min() const;
  double max() const;
  double max_abs() const;
};

/// Integral of u over the domain (midpoint rule).
double mass_functional(const Field& u);

/// ||u - ref|| / ||ref|| in the discrete L2 norm; both fields must share a grid.
double relative_l2_error(const Field& u, const Field& ref);

/// Coefficients (u, phi_n) in the order of SpectralBasis.
struct SpectralState {
  std::vector<double> coefficients;
  double time = 0.0;
};

/// Normalized Neumann cosine eigenfunctions, sorted by eigenvalue.
class SpectralBasis {
 public:
  /// modes_y is ignored (treated as 1) on an interval.
  SpectralBasis(const Domain& domain, std::size_t modes_x, std::size_t modes_y = 1);

  const Domain& domain() const { return domain_; }
  std::size_t size() const { return order_.size(); }
  std::size_t modes_x() const { return mx_; }
  std::size_t modes_y() const { return my_; }
  double eigenvalue(std::size_t n) const { return lambda_[n]; }
  const std::vector<double>& eigenvalues() const { return lambda_; }
  /// Cosine indices (kx, ky) of mode n.
  std::pair<std::size_t, std::size_t> wave_numbers(std::size_t n) const { return order_[n]; }
  /// Index of the mode with cosine indices (kx, ky).
  std::size_t index_of(std::size_t kx, std::size_t ky = 0) const;
  double phi(std::size_t n, double x, double y = 0.0) const;

  SpectralState project(const Field& f) const;
  Field synthesize(const SpectralState& c) const;

 private:
  Domain domain_;
  std::size_t mx_;
  std::size_t my_;
  std::vector<std::pair<std::size_t, std::size_t>> order_;
  std::vector<std::size_t> index_;  // [ky mx + kx] -> n
  std::vector<double> lambda_;
  std::vector<double> cos_x_;  // [kx qx + i] = phi_kx(x_i) (one-dimensional factor)
  std::vector<double> cos_y_;  // [ky qy + j]
};

/// The solution operators S(t) and K(t) of the fractional heat semigroup for one alpha.
class MildOperators {
 public:
  MildOperators(const SpectralBasis& basis, double alpha);

  double alpha() const { return alpha_; }
  /// E_{alpha,1}(-lambda_n t^alpha).
  double s_multiplier(std::size_t n, double t) const;
  /// t^(alpha-1) E_{alpha,alpha}(-lambda_n t^alpha), t > 0.
  double k_multiplier(std::size_t n, double t) const;

  SpectralState apply_S(double t, const SpectralState& c) const;
  SpectralState apply_K(double t, const SpectralState& c) const;

  /// Product-trapezoid weights of the kernel of mode n over s in [t - r_old, t - r_old + tau]:
  /// the integral of k_n(t - s) F(s) for linear F equals left F(older) + right F(newer).
  struct Weights {
    double left;
    double right;
  };
  Weights history_weights(std::size_t n, double r_old, double tau) const;

 private:
  double kernel(double lambda, double r) const;

  const SpectralBasis* basis_;
  double alpha_;
  MittagLeffler e1_;
  MittagLeffler e_a_;
  MittagLeffler e_a1_;
  MittagLeffler e_a2_;
  double inv_gamma_a1_;
  double inv_gamma_a2_;
};

/// d_t^alpha (u - a) = Laplace(u) + u^p with homogeneous Neumann data.
struct FracProblem {
  double alpha = 0.5;
  double p = 2.0;
  /// False drops the u^p term (linear fractional heat equation).
  bool reaction = true;
  /// Stop once max u exceeds the cap.
  double cap = 1e8;
  int max_halvings = 20;
  /// Relative tolerance of the per-step fixed-point iteration and its iteration cap.
  double picard_tol = 1e-10;
  int picard_max = 25;

  void validate() const;
  bool superlinear() const { return reaction && p > 1.0; }
};

struct PdeOptions {
  /// Keep a snapshot every k accepted nodes (0: first and last only).
  std::size_t snapshot_every = 0;
};

struct Snapshot {
  double t;
  Field u;
};

struct PdeSolution {
  std::vector<Snapshot> snapshots;
  /// Integral of u.
  TimeSeries eta;
  TimeSeries linf;
  TimeSeries l2;
  /// Integral of max(u, 0)^p as used by the scheme.
  TimeSeries reaction;
  BlowupEstimate blowup;
  int halvings = 0;
  int max_picard_iterations = 0;
};

/// Marches u(t) = S(t) a + int_0^t K(t - s) u(s)^p ds on the nodes of `mesh`, halving
/// steps when the fixed-point iteration fails or a superlinear problem more than doubles
/// max u in one step.
PdeSolution solve_semilinear(const FracProblem& problem, const SpectralBasis& basis, const Field& a,
                             const TimeMesh& mesh, const PdeOptions& options = {});

}  // namespace fracblow
