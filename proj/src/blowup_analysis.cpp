#include "fracblow/blowup_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fracblow/error.hpp"
#include "fracblow/special_functions.hpp"

namespace fracblow {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_superlinear(double p, const char* who) {
  if (!(p > 1.0)) throw DomainError(std::string(who) + ": p must exceed 1, got " + std::to_string(p));
}

}  // namespace

void BoundInputs::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ParameterError("BoundInputs: alpha must lie in (0,1], got " + std::to_string(alpha));
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw ParameterError("BoundInputs: |Omega| must be positive");
  if (!(a_min >= 0.0)) throw ParameterError("BoundInputs: a_min must be nonnegative");
  if (!(p > 0.0)) throw ParameterError("BoundInputs: p must be positive");
}

double t_star(const BoundInputs& b) {
  b.validate();
  require_superlinear(b.p, "t_star");
  if (!(b.a_mean > 0.0)) throw DomainError("t_star: a_mean must be positive");
  const double log_t = -(std::log(b.p - 1.0) + std::lgamma(2.0 - b.alpha) + (b.p - 1.0) * std::log(b.a_mean)) / b.alpha;
  return std::exp(log_t);
}

TStarInf t_star_inf(const BoundInputs& b) {
  b.validate();
  require_superlinear(b.p, "t_star_inf");
  if (!(b.a_min > 0.0)) throw DomainError("t_star_inf: a_min must be positive");
  const int m = int(std::floor(1.0 / (b.p - 1.0))) + 1;
  const double log_t = (std::log(double(m)) - std::lgamma(2.0 - b.alpha) - (b.p - 1.0) * std::log(b.a_min)) / b.alpha;
  return {std::exp(log_t), m};
}

int min_m(double p) {
  require_superlinear(p, "min_m");
  int m = std::max(1, int(std::ceil(1.0 / (p - 1.0))) - 1);
  while (double(m) * (p - 1.0) < 1.0) ++m;
  return m;
}

double lower_solution(double a0, double horizon, int m, double t) {
  if (!(horizon > 0.0)) throw ParameterError("lower_solution: T must be positive");
  if (m < 1) throw ParameterError("lower_solution: m must be a positive integer");
  if (!(t >= 0.0) || !(t < horizon))
    throw DomainError("lower_solution: need 0 <= t < T, got t=" + std::to_string(t));
  return a0 * std::pow(horizon / (horizon - t), m);
}

double omega0(double omega, double p) { return std::pow(omega, 1.0 - p); }

double linf_lower_threshold(double alpha, double p, double a1, int m) {
  require_superlinear(p, "linf_lower_threshold");
  if (!(a1 > 0.0)) throw DomainError("linf_lower_threshold: a1 must be positive");
  return std::pow(std::pow(a1, 1.0 - p) * m / gamma(2.0 - alpha), 1.0 / alpha);
}

LowerCertificate certify_lower_solution(double alpha, double c0, double p, double a0, double horizon,
                                        int m, const TimeMesh& mesh) {
  if (!(mesh.end() < horizon))
    throw DomainError("certify_lower_solution: mesh must end before T");
  const auto eta = TimeSeries::sample(mesh, [&](double t) { return lower_solution(a0, horizon, m, t); });
  const auto res = power_residual(alpha, c0, p, a0, eta);
  const auto tol = power_residual_tolerance(alpha, c0, p, a0, eta);
  LowerCertificate out;
  out.worst_excess = -kInf;
  for (std::size_t j = 1; j < eta.size(); ++j) {
    const double excess = res[j] - tol[j];
    const double source = c0 * std::pow(eta[j], p);
    out.worst_excess = std::max(out.worst_excess, excess);
    out.worst_ratio = std::max(out.worst_ratio, (res[j] + source) / source);
    if (excess > 0.0) out.ok = false;
    ++out.nodes;
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::bounded: return "bounded";
    case Verdict::blowup_within_bound: return "blowup_within_bound";
    case Verdict::bound_violated: return "bound_violated";
  }
  return "unknown";
}

BlowupReport verify_theorem1(const RunRecord& run, const BoundInputs& b, const VerifyTolerances& tol) {
  b.validate();
  BlowupReport r;
  r.alpha = b.alpha;
  r.p = b.p;
  r.a_mean = b.a_mean;
  r.a_min = b.a_min;
  r.omega = b.omega;
  r.omega0 = omega0(b.omega, b.p);
  r.eps_bound = tol.eps_bound;
  r.eps_low = tol.eps_low;
  r.t_blow_numeric = run.blowup.detected ? run.blowup.t_blow : kNaN;

  const bool superlinear = run.reaction && b.p > 1.0 && b.a_mean > 0.0;
  r.t_star = superlinear ? t_star(b) : kInf;
  r.t_star_inf = kNaN;
  if (superlinear && b.a_min > 0.0) {
    const auto inf = t_star_inf(b);
    r.t_star_inf = inf.value;
    r.m_inf = inf.m;
  }

  if (run.blowup.detected) {
    r.bound_ok = run.blowup.t_blow <= r.t_star * (1.0 + tol.eps_bound);
  } else {
    r.bound_ok = !(superlinear && run.eta.mesh.end() > r.t_star * (1.0 + tol.eps_bound));
  }

  if (superlinear) {
    r.m_used = min_m(b.p);
    const double a0 = b.a_total();
    const double window = tol.window * r.t_star;
    for (std::size_t j = 0; j < run.eta.size(); ++j) {
      const double t = run.eta.mesh[j];
      if (t > window) break;
      const double eta = run.eta[j];
      if (!std::isfinite(eta)) break;
      const double low = lower_solution(a0, r.t_star, r.m_used, t);
      r.lower_ratio_min = std::min(r.lower_ratio_min, eta / low);
      if (eta < low * (1.0 - tol.eps_low)) r.lower_bound_ok = false;
      ++r.lower_nodes_checked;
    }
  }

  if (!r.bound_ok || !r.lower_bound_ok)
    r.verdict = Verdict::bound_violated;
  else if (run.blowup.detected)
    r.verdict = Verdict::blowup_within_bound;
  else
    r.verdict = Verdict::bounded;
  return r;
}

double profile_constant(double p, double a_mean) {
  require_superlinear(p, "profile_constant");
  return (p - 1.0) * std::pow(a_mean, p - 1.0);
}

TStarProfile t_star_profile(double c_pa, std::span<const double> alphas) {
  if (!(c_pa > 0.0)) throw ParameterError("t_star_profile: C must be positive");
  const auto f = [c_pa](double a) { return std::exp(-(std::log(c_pa) + std::lgamma(2.0 - a)) / a); };
  TStarProfile out;
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw ParameterError("t_star_profile: alpha must lie in (0,1)");
    const double h = 1e-6 * std::min(a, 1.0 - a);
    out.alpha.push_back(a);
    out.value.push_back(f(a));
    out.slope.push_back((f(a + h) - f(a - h)) / (2.0 * h));
  }
  return out;
}

}  // namespace fracblow
