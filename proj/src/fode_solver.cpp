#include "fracblow/fode_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "fracblow/error.hpp"
#include "fracblow/fractional_calculus.hpp"
#include "fracblow/special_functions.hpp"
#include "kernel_weights.hpp"

namespace fracblow {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double sqrt_coefficient(double alpha) { return gamma(2.0 * alpha + 1.0) / gamma(alpha + 1.0); }

bool superlinear(const FodeProblem& problem) {
  const auto* power = std::get_if<PowerRhs>(&problem.rhs);
  return power != nullptr && power->p > 1.0;
}

enum class StepStatus { accepted, rejected };

// Root of g(x) = 0 starting from x0 by Newton's method, falling back to bisection once
// a sign change is known. Returns nullopt when the iteration reaches a point where g
// has the wrong sign and a non-positive slope before any bracket is found (a fold).
template <class G>
std::optional<double> safeguarded_newton(G&& g, double x0) {
  double x = x0;
  bool has_neg = false;
  bool has_pos = false;
  double neg = 0.0;
  double pos = 0.0;
  for (int it = 0; it < 250; ++it) {
    const auto [value, slope] = g(x);
    if (!std::isfinite(value)) throw NumericalFailure("fode: non-finite residual in the step equation");
    if (value == 0.0) return x;
    if (value < 0.0) {
      neg = x;
      has_neg = true;
    } else {
      pos = x;
      has_pos = true;
    }
    const bool bracket = has_neg && has_pos;
    double next;
    if (it < 50 && slope > 0.0 && std::isfinite(slope)) {
      next = x - value / slope;
    } else if (bracket) {
      next = 0.5 * (neg + pos);
    } else if (slope <= 0.0 || it < 50) {
      return std::nullopt;
    } else {
      throw NumericalFailure("fode: Newton did not converge after 50 iterations and no bracket was found");
    }
    if (bracket) {
      const double lo = std::min(neg, pos);
      const double hi = std::max(neg, pos);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (hi - lo <= 4e-16 * std::max(std::abs(lo), std::abs(hi))) return next;
    }
    if (std::abs(next - x) <= 4e-16 * std::max(std::abs(x), std::abs(next)) + 1e-300) return next;
    x = next;
  }
  throw NumericalFailure("fode: step equation did not converge (bisection exhausted)");
}

class Marcher {
 public:
  Marcher(const FodeProblem& problem, const FodeOptions& options)
      : problem_(problem),
        options_(options),
        alpha_(problem.alpha),
        inv_gamma_2ma_(1.0 / gamma(2.0 - problem.alpha)),
        inv_gamma_1pa_(1.0 / gamma(1.0 + problem.alpha)),
        inv_gamma_2pa_(1.0 / gamma(2.0 + problem.alpha)) {
    t_.push_back(0.0);
    y_.push_back(problem.y0);
    f_.push_back(problem.f(0.0, problem.y0));
  }

  // Attempts the step to t_new. On acceptance the node is appended.
  StepStatus step(double t_new) {
    double y_new;
    if (t_.size() == 1 && options_.branch == FodeBranch::analytic_seed &&
        std::holds_alternative<SqrtCounterexampleRhs>(problem_.rhs)) {
      y_new = std::pow(t_new, 2.0 * alpha_);
    } else {
      const auto solved = options_.scheme == FodeScheme::implicit_l1 ? implicit_l1(t_new) : predictor_corrector(t_new);
      if (!solved) return StepStatus::rejected;
      y_new = *solved;
    }
    const double y_prev = y_.back();
    if (superlinear(problem_) && y_prev > 0.0 && !(y_new <= 2.0 * y_prev)) return StepStatus::rejected;
    if (!std::isfinite(y_new)) throw NumericalFailure("fode: non-finite value at t = " + std::to_string(t_new));
    t_.push_back(t_new);
    y_.push_back(y_new);
    f_.push_back(problem_.f(t_new, y_new));
    return StepStatus::accepted;
  }

  const std::vector<double>& t() const { return t_; }
  const std::vector<double>& y() const { return y_; }

 private:
  std::optional<double> implicit_l1(double t_new) const {
    const std::size_t n = t_.size();
    const double expo = 1.0 - alpha_;
    double history = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
      const double tau = t_[j] - t_[j - 1];
      history += (y_[j] - y_[j - 1]) / tau * detail::pow_diff(t_new - t_[j - 1], tau, expo);
    }
    history *= inv_gamma_2ma_;
    const double d = std::pow(t_new - t_[n - 1], -alpha_) * inv_gamma_2ma_;
    const double y_prev = y_[n - 1];
    auto residual = [&](double y) {
      return std::pair{d * (y - y_prev) + history - problem_.f(t_new, y), d - problem_.df_dy(t_new, y)};
    };
    return safeguarded_newton(residual, y_prev);
  }

  std::optional<double> predictor_corrector(double t_new) const {
    const std::size_t n = t_.size();
    double predictor = problem_.y0;
    double corrector = problem_.y0;
    double w_new = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      const double a = t_new - t_[j - 1];
      const double tau = (j < n) ? t_[j] - t_[j - 1] : a;
      predictor += f_[j - 1] * detail::pow_diff(a, tau, alpha_) * inv_gamma_1pa_;
      const auto w = detail::rl_trapezoid_weights(a, tau, alpha_, inv_gamma_1pa_, inv_gamma_2pa_);
      corrector += f_[j - 1] * w.left;
      if (j < n)
        corrector += f_[j] * w.right;
      else
        w_new = w.right;
    }
    if (!std::isfinite(predictor)) return std::nullopt;
    return corrector + w_new * problem_.f(t_new, predictor);
  }

  const FodeProblem& problem_;
  const FodeOptions& options_;
  double alpha_;
  double inv_gamma_2ma_;
  double inv_gamma_1pa_;
  double inv_gamma_2pa_;
  std::vector<double> t_;
  std::vector<double> y_;
  std::vector<double> f_;
};

double fit_residual(std::span<const double> t, std::span<const double> logy, double t_blow, double& m,
                    double& log_c) {
  const std::size_t k = t.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = -std::log(t_blow - t[i]);
    sx += x;
    sy += logy[i];
    sxx += x * x;
    sxy += x * logy[i];
  }
  const double det = double(k) * sxx - sx * sx;
  if (!(det > 0.0)) return kInf;
  m = (double(k) * sxy - sx * sy) / det;
  log_c = (sy - m * sx) / double(k);
  double ssr = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = logy[i] - log_c - m * (-std::log(t_blow - t[i]));
    ssr += r * r;
  }
  return m > 0.0 ? ssr : kInf;
}

}  // namespace

std::string to_string(FodeScheme s) {
  return s == FodeScheme::implicit_l1 ? "implicit_l1" : "predictor_corrector";
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::reached_end: return "reached_end";
    case StopReason::cap_exceeded: return "cap_exceeded";
    case StopReason::step_limit: return "step_limit";
  }
  return "unknown";
}

void FodeProblem::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("fode: alpha must lie in (0,1)");
  if (!(horizon > 0.0)) throw ParameterError("fode: horizon must be positive");
  if (!(y0 >= 0.0) || !std::isfinite(y0)) throw ParameterError("fode: y0 must be finite and nonnegative");
  std::visit(overloaded{[](const LinearRhs& r) {
                          if (!r.c || !r.g) throw ParameterError("fode: linear rhs needs c(t) and g(t)");
                        },
                        [](const PowerRhs& r) {
                          if (!(r.c0 > 0.0)) throw ParameterError("fode: power rhs needs c0 > 0");
                          if (!(r.p > 0.0)) throw ParameterError("fode: power rhs needs p > 0");
                        },
                        [](const SqrtCounterexampleRhs&) {}},
             rhs);
}

double FodeProblem::f(double t, double y) const {
  return std::visit(overloaded{[&](const LinearRhs& r) { return r.c(t) * y + r.g(t); },
                               [&](const PowerRhs& r) {
                                 const double base = std::pow(std::max(y, 0.0), r.p);
                                 return r.c0 * base + (r.g ? r.g(t) : 0.0);
                               },
                               [&](const SqrtCounterexampleRhs&) {
                                 return sqrt_coefficient(alpha) * std::sqrt(std::max(y, 0.0));
                               }},
                    rhs);
}

double FodeProblem::df_dy(double t, double y) const {
  return std::visit(overloaded{[&](const LinearRhs& r) { return r.c(t); },
                               [&](const PowerRhs& r) {
                                 if (y <= 0.0) return (r.p < 1.0) ? kInf : (r.p == 1.0 ? r.c0 : 0.0);
                                 return r.c0 * r.p * std::pow(y, r.p - 1.0);
                               },
                               [&](const SqrtCounterexampleRhs&) {
                                 return y > 0.0 ? 0.5 * sqrt_coefficient(alpha) / std::sqrt(y) : kInf;
                               }},
                    rhs);
}

FodeSolution solve_fode(const FodeProblem& problem, const TimeMesh& mesh, const FodeOptions& options) {
  problem.validate();
  if (mesh.end() > problem.horizon * (1.0 + 1e-12))
    throw ParameterError("fode: mesh extends beyond the problem horizon");
  if (!(options.cap > std::abs(problem.y0))) throw ParameterError("fode: cap must exceed |y0|");
  if (options.max_halvings < 0) throw ParameterError("fode: max_halvings must be nonnegative");

  Marcher march(problem, options);
  const auto base = mesh.nodes();
  int halvings = 0;
  StopReason reason = StopReason::reached_end;
  double threshold_hit = std::numeric_limits<double>::quiet_NaN();

  std::size_t next = 1;
  double h = base[1] - base[0];
  while (next < base.size()) {
    const double t_cur = march.t().back();
    const double target = base[next];
    const double t_new = (t_cur + h >= target - 1e-12 * h) ? target : t_cur + h;
    if (march.step(t_new) == StepStatus::rejected) {
      if (halvings == options.max_halvings) {
        reason = StopReason::step_limit;
        break;
      }
      ++halvings;
      h = 0.5 * (t_new - t_cur);
      continue;
    }
    if (std::abs(march.y().back()) > options.cap) {
      reason = StopReason::cap_exceeded;
      threshold_hit = march.t().back();
      break;
    }
    if (t_new == target) {
      ++next;
      if (next < base.size()) h = base[next] - base[next - 1];
    }
  }

  if (reason == StopReason::step_limit && !superlinear(problem))
    throw NumericalFailure("fode: step halving budget exhausted without blowup");

  const auto& t = march.t();
  const auto& y = march.y();
  BlowupEstimate estimate;
  estimate.reason = reason;
  estimate.threshold_hit = threshold_hit;
  if (reason == StopReason::reached_end) {
    estimate.detected = false;
    estimate.t_blow = kInf;
  } else {
    estimate = fit_blowup(t, y);
    estimate.reason = reason;
    estimate.threshold_hit = threshold_hit;
  }
  if (t.size() < 3) throw NumericalFailure("fode: march stopped before two steps were accepted");
  const bool exact_nodes = t.size() == base.size();
  TimeMesh out_mesh = exact_nodes ? mesh : TimeMesh::from_nodes(t);
  return FodeSolution{TimeSeries(std::move(out_mesh), y, estimate.detected), estimate, halvings};
}

BlowupEstimate fit_blowup(std::span<const double> t, std::span<const double> y, std::size_t count) {
  BlowupEstimate est;
  est.detected = true;
  est.threshold_hit = std::numeric_limits<double>::quiet_NaN();
  est.t_blow = t.back();
  est.m_fit = std::numeric_limits<double>::quiet_NaN();
  est.c_fit = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> ts;
  std::vector<double> logy;
  for (std::size_t i = t.size(); i-- > 0 && ts.size() < count;) {
    if (!(y[i] > 0.0)) break;
    ts.push_back(t[i]);
    logy.push_back(std::log(y[i]));
  }
  if (ts.size() < 3) return est;
  std::reverse(ts.begin(), ts.end());
  std::reverse(logy.begin(), logy.end());

  const double t_last = ts.back();
  const double span = t_last - ts.front();
  if (!(span > 0.0)) return est;

  double m = 0.0;
  double log_c = 0.0;
  auto objective = [&](double log_gap) { return fit_residual(ts, logy, t_last + std::exp(log_gap), m, log_c); };
  const double lo = std::log(span * 1e-9 + std::numeric_limits<double>::min());
  const double hi = std::log(span * 1e3);
  constexpr int kScan = 240;
  double best = kInf;
  int best_i = -1;
  for (int i = 0; i <= kScan; ++i) {
    const double v = objective(lo + (hi - lo) * i / kScan);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  if (best_i < 0) return est;

  // Golden-section refinement around the best grid point.
  double a = lo + (hi - lo) * std::max(best_i - 1, 0) / kScan;
  double b = lo + (hi - lo) * std::min(best_i + 1, kScan) / kScan;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = objective(d);
    }
  }
  const double log_gap = 0.5 * (a + b);
  if (!std::isfinite(objective(log_gap))) return est;
  est.t_blow = t_last + std::exp(log_gap);
  est.m_fit = m;
  est.c_fit = std::exp(log_c);
  return est;
}

bool check_lemma1_positivity(double alpha, const TimeSeries& c, const TimeSeries& f) {
  if (!c.mesh.same_nodes(f.mesh)) throw MeshMismatchError("positivity check: c and f live on different meshes");
  FodeProblem problem;
  problem.alpha = alpha;
  problem.y0 = 0.0;
  problem.horizon = c.mesh.end();
  problem.rhs = LinearRhs{[&c](double t) { return c.interpolate(t); }, [&f](double t) { return f.interpolate(t); }};
  const auto solution = solve_fode(problem, c.mesh, FodeOptions{.cap = kInf});
  double lowest = kInf;
  double largest = 0.0;
  for (double v : solution.y.values) {
    lowest = std::min(lowest, v);
    largest = std::max(largest, std::abs(v));
  }
  return lowest >= -1e-8 * largest;
}

TimeSeries power_residual(double alpha, double c0, double p, double a0, const TimeSeries& y) {
  auto out = caputo_l1(y, alpha);
  const double jump = (y[0] - a0) / gamma(1.0 - alpha);
  for (std::size_t n = 1; n < y.size(); ++n) {
    out.values[n] += jump * std::pow(y.mesh[n], -alpha);
    out.values[n] -= c0 * std::pow(std::max(y[n], 0.0), p);
  }
  return out;
}

TimeSeries power_residual_tolerance(double alpha, double c0, double p, double a0, const TimeSeries& y) {
  const auto fine = power_residual(alpha, c0, p, a0, y);
  const auto derivative = caputo_l1(y, alpha);
  std::vector<double> tol(y.size(), 0.0);
  for (std::size_t n = 1; n < y.size(); ++n)
    tol[n] = 1e-9 * (std::abs(derivative[n]) + c0 * std::pow(std::max(y[n], 0.0), p) + std::abs(y[n]));

  if (y.size() >= 5) {
    std::vector<double> nodes;
    std::vector<double> values;
    for (std::size_t n = 0; n < y.size(); n += 2) {
      nodes.push_back(y.mesh[n]);
      values.push_back(y[n]);
    }
    const TimeSeries coarse(TimeMesh::from_nodes(nodes), values);
    const auto coarse_res = power_residual(alpha, c0, p, a0, coarse);
    std::vector<double> estimate(y.size(), 0.0);
    for (std::size_t k = 1; k < coarse.size(); ++k) estimate[2 * k] = 10.0 * std::abs(fine[2 * k] - coarse_res[k]);
    for (std::size_t n = 1; n < y.size(); n += 2) {
      const double left = (n >= 2) ? estimate[n - 1] : 0.0;
      const double right = (n + 1 < y.size()) ? estimate[n + 1] : left;
      estimate[n] = std::max(left, right);
    }
    if (estimate.size() > 1) estimate[1] = std::max(estimate[1], estimate.size() > 2 ? estimate[2] : 0.0);
    for (std::size_t n = 1; n < y.size(); ++n) tol[n] += estimate[n];
  }
  return TimeSeries(y.mesh, std::move(tol));
}

bool check_lemma2_comparison(double alpha, double c0, double p, double a0, const TimeSeries& y_src,
                             const TimeSeries& z_src) {
  if (!y_src.mesh.same_nodes(z_src.mesh)) throw MeshMismatchError("comparison check: y and z live on different meshes");
  const auto ry = power_residual(alpha, c0, p, a0, y_src);
  const auto rz = power_residual(alpha, c0, p, a0, z_src);
  const auto ty = power_residual_tolerance(alpha, c0, p, a0, y_src);
  const auto tz = power_residual_tolerance(alpha, c0, p, a0, z_src);
  for (std::size_t n = 1; n < y_src.size(); ++n) {
    if (ry[n] < -ty[n])
      throw PreconditionViolation("comparison check: y is not a super-solution at t = " + std::to_string(y_src.mesh[n]));
    if (rz[n] > tz[n])
      throw PreconditionViolation("comparison check: z is not a sub-solution at t = " + std::to_string(z_src.mesh[n]));
  }
  double scale = 0.0;
  for (std::size_t n = 0; n < y_src.size(); ++n) scale = std::max({scale, std::abs(y_src[n]), std::abs(z_src[n])});
  const double tol_cmp = 1e-6 * scale;
  for (std::size_t n = 0; n < y_src.size(); ++n)
    if (y_src[n] < z_src[n] - tol_cmp) return false;
  return true;
}

}  // namespace fracblow
