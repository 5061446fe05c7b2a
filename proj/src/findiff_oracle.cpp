#include "fracblow/findiff_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fracblow/error.hpp"
#include "fracblow/special_functions.hpp"
#include "kernel_weights.hpp"
#include "pde_march.hpp"

namespace fracblow {

FdGrid::FdGrid(const Domain& domain) : domain_(domain) {
  if (domain_.qx() < 8 || (domain_.dimension() == 2 && domain_.qy() < 8))
    throw ParameterError("FdGrid: need at least 8 nodes per axis");
}

void FdGrid::laplacian(const std::vector<double>& u, std::vector<double>& out) const {
  const std::size_t qx = domain_.qx();
  const std::size_t qy = domain_.qy();
  const double cx = 1.0 / (hx() * hx());
  const double cy = dimension() == 2 ? 1.0 / (hy() * hy()) : 0.0;
  out.assign(u.size(), 0.0);
  for (std::size_t j = 0; j < qy; ++j)
    for (std::size_t i = 0; i < qx; ++i) {
      const std::size_t p = j * qx + i;
      const double c = u[p];
      const double west = i > 0 ? u[p - 1] : c;
      const double east = i + 1 < qx ? u[p + 1] : c;
      double v = cx * (west - 2.0 * c + east);
      if (dimension() == 2) {
        const double south = j > 0 ? u[p - qx] : c;
        const double north = j + 1 < qy ? u[p + qx] : c;
        v += cy * (south - 2.0 * c + north);
      }
      out[p] = v;
    }
}

namespace {

using detail::StepStatus;

// Factorization of d I - Laplacian: Thomas elimination in 1-D, banded Cholesky in 2-D.
class ShiftedLaplaceSolver {
 public:
  explicit ShiftedLaplaceSolver(const FdGrid& grid) : grid_(grid) {}

  void solve(double d, std::vector<double>& b) {
    if (d != shift_) factor(d);
    if (grid_.dimension() == 1)
      solve_tridiagonal(b);
    else
      solve_banded(b);
  }

 private:
  double entry(std::size_t p, std::size_t c, double d) const {
    const std::size_t qx = grid_.domain().qx();
    const std::size_t qy = grid_.domain().qy();
    const double cx = 1.0 / (grid_.hx() * grid_.hx());
    const double cy = grid_.dimension() == 2 ? 1.0 / (grid_.hy() * grid_.hy()) : 0.0;
    const std::size_t i = p % qx;
    const std::size_t j = p / qx;
    if (p == c) {
      double v = d + cx * double((i > 0) + (i + 1 < qx));
      if (grid_.dimension() == 2) v += cy * double((j > 0) + (j + 1 < qy));
      return v;
    }
    if (p - c == 1 && i > 0) return -cx;
    if (grid_.dimension() == 2 && p - c == qx) return -cy;
    return 0.0;
  }

  void factor(double d) {
    shift_ = d;
    const std::size_t n = grid_.size();
    if (grid_.dimension() == 1) {
      // forward elimination multipliers for the symmetric tridiagonal matrix
      diag_.assign(n, 0.0);
      diag_[0] = entry(0, 0, d);
      for (std::size_t p = 1; p < n; ++p) {
        const double off = entry(p, p - 1, d);
        diag_[p] = entry(p, p, d) - off * off / diag_[p - 1];
        if (!(diag_[p] > 0.0)) throw NumericalFailure("fd: tridiagonal system is singular");
      }
      return;
    }
    bw_ = grid_.domain().qx();
    band_.assign(n * (bw_ + 1), 0.0);
    for (std::size_t p = 0; p < n; ++p) {
      const std::size_t lo = p >= bw_ ? p - bw_ : 0;
      for (std::size_t c = lo; c <= p; ++c) {
        double s = entry(p, c, d);
        for (std::size_t q = lo; q < c; ++q) s -= l(p, q) * l(c, q);
        if (c == p) {
          if (!(s > 0.0)) throw NumericalFailure("fd: five-point system is not positive definite");
          l(p, p) = std::sqrt(s);
        } else {
          l(p, c) = s / l(c, c);
        }
      }
    }
  }

  double& l(std::size_t p, std::size_t q) { return band_[p * (bw_ + 1) + (p - q)]; }

  void solve_tridiagonal(std::vector<double>& b) const {
    const std::size_t n = b.size();
    for (std::size_t p = 1; p < n; ++p) b[p] -= entry(p, p - 1, shift_) / diag_[p - 1] * b[p - 1];
    b[n - 1] /= diag_[n - 1];
    for (std::size_t p = n - 1; p-- > 0;) b[p] = (b[p] - entry(p + 1, p, shift_) * b[p + 1]) / diag_[p];
  }

  void solve_banded(std::vector<double>& b) {
    const std::size_t n = b.size();
    for (std::size_t p = 0; p < n; ++p) {
      const std::size_t lo = p >= bw_ ? p - bw_ : 0;
      double s = b[p];
      for (std::size_t q = lo; q < p; ++q) s -= l(p, q) * b[q];
      b[p] = s / l(p, p);
    }
    for (std::size_t p = n; p-- > 0;) {
      const std::size_t hi = std::min(n - 1, p + bw_);
      double s = b[p];
      for (std::size_t q = p + 1; q <= hi; ++q) s -= l(q, p) * b[q];
      b[p] = s / l(p, p);
    }
  }

  const FdGrid& grid_;
  double shift_ = -1.0;
  std::vector<double> diag_;
  std::size_t bw_ = 0;
  std::vector<double> band_;
};

class L1Marcher {
 public:
  L1Marcher(const FracProblem& problem, const Field& a)
      : prob_(problem), grid_(a.domain), solver_(grid_), check_sign_(a.min() >= 0.0),
        inv_gamma_(1.0 / gamma(2.0 - problem.alpha)) {
    t_.push_back(0.0);
    accept(a.values, powered(a.values));
  }

  StepStatus step(double t_new, bool, double) {
    const std::size_t n = t_.size();
    const std::size_t size = grid_.size();
    const double expo = 1.0 - prob_.alpha;
    const double tau = t_new - t_.back();
    const double d = detail::pow_diff(tau, tau, expo) / tau * inv_gamma_;

    std::vector<double> rhs(size);
    const auto& u_prev = u_.back();
    for (std::size_t i = 0; i < size; ++i) rhs[i] = d * u_prev[i];
    for (std::size_t j = 1; j < n; ++j) {
      const double tau_j = t_[j] - t_[j - 1];
      const double b = detail::pow_diff(t_new - t_[j - 1], tau_j, expo) / tau_j * inv_gamma_;
      const auto& hi = u_[j];
      const auto& lo = u_[j - 1];
      for (std::size_t i = 0; i < size; ++i) rhs[i] -= b * (hi[i] - lo[i]);
    }

    std::vector<double> u = rhs;
    std::vector<double> up;
    if (prob_.reaction) {
      for (std::size_t i = 0; i < size; ++i) u[i] += lagged_[i];
    }
    solver_.solve(d, u);
    if (prob_.reaction) {
      up = powered(u);
      std::vector<double> corrected = rhs;
      for (std::size_t i = 0; i < size; ++i) corrected[i] += up[i];
      solver_.solve(d, corrected);
      double first = 0.0;
      double second = 0.0;
      double scale = 0.0;
      for (std::size_t i = 0; i < size; ++i) {
        first = std::max(first, std::abs(u[i] - u_prev[i]));
        second = std::max(second, std::abs(corrected[i] - u[i]));
        scale = std::max(scale, std::abs(corrected[i]));
      }
      if (!std::isfinite(second) || !std::isfinite(scale)) return StepStatus::rejected;
      if (second > first && second > 1e-14 * scale) return StepStatus::rejected;
      u = std::move(corrected);
    } else {
      up = powered(u);
    }
    for (double v : u)
      if (!std::isfinite(v)) return StepStatus::rejected;

    Field field(grid_.domain(), u);
    if (prob_.superlinear() && field.max() > 2.0 * linf_.back()) return StepStatus::rejected;
    if (check_sign_) detail::check_negativity(field, t_new, "fd");
    t_.push_back(t_new);
    accept(std::move(u), std::move(up));
    return StepStatus::accepted;
  }

  const std::vector<double>& t() const { return t_; }
  const std::vector<double>& eta() const { return eta_; }
  const std::vector<double>& linf() const { return linf_; }
  const std::vector<double>& l2() const { return l2_; }
  const std::vector<double>& reaction() const { return reaction_; }
  Field last() const { return Field(grid_.domain(), u_.back()); }
  int max_iterations() const { return prob_.reaction ? 2 : 1; }

 private:
  std::vector<double> powered(const std::vector<double>& u) const {
    std::vector<double> out(u.size(), 0.0);
    if (!prob_.reaction) return out;
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::pow(std::max(u[i], 0.0), prob_.p);
    return out;
  }

  void accept(std::vector<double> u, std::vector<double> up) {
    const Field field(grid_.domain(), u);
    eta_.push_back(field.integral());
    linf_.push_back(field.max_abs());
    l2_.push_back(field.l2_norm());
    reaction_.push_back(Field(grid_.domain(), up).integral());
    lagged_ = powered(u);
    u_.push_back(std::move(u));
  }

  const FracProblem& prob_;
  FdGrid grid_;
  ShiftedLaplaceSolver solver_;
  bool check_sign_;
  double inv_gamma_;
  std::vector<double> t_;
  std::vector<std::vector<double>> u_;
  std::vector<double> lagged_;
  std::vector<double> eta_, linf_, l2_, reaction_;
};

}  // namespace

PdeSolution solve_fd(const FracProblem& problem, const Field& a, const TimeMesh& mesh, const PdeOptions& options) {
  detail::check_pde_inputs(problem, a, "fd");
  if (!(problem.alpha < 1.0)) throw ParameterError("fd: the L1 scheme needs alpha < 1");
  L1Marcher march(problem, a);
  return detail::run_pde_march(march, problem, a, mesh, options, "fd");
}

}  // namespace fracblow
