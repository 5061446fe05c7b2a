#include "fracblow/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "fracblow/blowup_analysis.hpp"
#include "fracblow/error.hpp"
#include "fracblow/findiff_oracle.hpp"
#include "fracblow/fode_solver.hpp"
#include "fracblow/fractional_calculus.hpp"
#include "fracblow/special_functions.hpp"
#include "fracblow/spectral_pde.hpp"

namespace fracblow {

namespace {

using std::numbers::pi;

std::string printf_string(const char* format, ...) {
  va_list args;
  va_start(args, format);
  va_list copy;
  va_copy(copy, args);
  const int size = std::vsnprintf(nullptr, 0, format, copy);
  va_end(copy);
  std::string out(std::size_t(std::max(size, 0)) + 1, '\0');
  std::vsnprintf(out.data(), out.size(), format, args);
  va_end(args);
  out.pop_back();
  return out;
}

double rel_err(double value, double ref) { return std::abs(value - ref) / std::max(std::abs(ref), 1e-300); }

struct Outcome {
  bool passed;
  std::string detail;
};

// ---- criterion 1 -----------------------------------------------------------

Outcome special_function_battery(std::uint64_t seed) {
  const MittagLeffler e1({1.0, 1.0});
  double exp_err = 0.0;
  for (int i = 0; i <= 3500; ++i) {
    const double z = -30.0 + 0.01 * i;
    exp_err = std::max(exp_err, rel_err(e1(z), std::exp(z)));
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> alpha_dist(0.2, 1.0);
  std::uniform_real_distribution<double> beta_offset(0.0, 2.0);
  std::uniform_real_distribution<double> z_dist(-50.0, 2.0);
  double rec_err = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double a = alpha_dist(rng);
    const double b = a + beta_offset(rng);
    const double z = z_dist(rng);
    const double lhs = mittag_leffler({a, b}, z);
    const double rhs = 1.0 / gamma(b) + z * mittag_leffler({a, a + b}, z);
    rec_err = std::max(rec_err, rel_err(rhs, lhs));
  }

  const double spot = mittag_leffler({0.5, 1.0}, -1.0);
  const bool ok = exp_err <= 1e-9 && rec_err <= 1e-9 && std::abs(spot - 0.4275836) <= 1e-6;
  return {ok, printf_string("exp rel %.1e, recurrence rel %.1e (500 triples), E_{1/2,1}(-1) = %.9f", exp_err,
                            rec_err, spot)};
}

// ---- criterion 2 -----------------------------------------------------------

double power_rule(int k, double alpha, double t) {
  return std::tgamma(k + 1.0) / std::tgamma(k + 1.0 - alpha) * std::pow(t, k - alpha);
}

Outcome l1_order() {
  bool ok = true;
  std::string detail;
  double exact_err = 0.0;
  for (double alpha : {0.3, 0.5, 0.7}) {
    std::vector<double> errors;
    for (std::size_t n : {64, 128, 256, 512}) {
      const auto mesh = TimeMesh::uniform(1.0, n);
      for (int k : {1, 3}) {
        const auto d = caputo_l1(TimeSeries::sample(mesh, [k](double t) { return std::pow(t, k); }), alpha);
        double e = 0.0;
        for (std::size_t j = 1; j < mesh.size(); ++j)
          e = std::max(e, std::abs(d[j] - power_rule(k, alpha, mesh[j])) / power_rule(k, alpha, 1.0));
        if (k == 1)
          exact_err = std::max(exact_err, e);
        else
          errors.push_back(e);
      }
    }
    double lo = 10.0;
    double hi = -10.0;
    for (std::size_t i = 1; i < errors.size(); ++i) {
      const double q = std::log2(errors[i - 1] / errors[i]);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
      if (std::abs(q - (2.0 - alpha)) > 0.2) ok = false;
    }
    detail += printf_string("alpha=%.1f k=3 orders [%.3f, %.3f]; ", alpha, lo, hi);
  }
  if (exact_err > 1e-13) ok = false;
  detail += printf_string("k=1 exact to %.1e", exact_err);
  return {ok, detail};
}

// ---- criterion 3 -----------------------------------------------------------

Outcome counterexample() {
  bool ok = true;
  std::string detail;
  for (double alpha : {0.3, 0.5, 0.7}) {
    const double k = gamma(2 * alpha + 1) / gamma(alpha + 1);
    std::vector<double> residuals;
    for (std::size_t n : {32, 64, 128, 256}) {
      const auto mesh = TimeMesh::graded(1.0, n, TimeMesh::default_grading(alpha));
      const auto y = TimeSeries::sample(mesh, [&](double t) { return std::pow(t, 2 * alpha); });
      const auto d = caputo_l1(y, alpha);
      double r = 0.0;
      for (std::size_t j = 1; j < mesh.size(); ++j) r = std::max(r, std::abs(d[j] - k * std::sqrt(y[j])));
      residuals.push_back(r);
    }
    double worst = 1e300;
    for (std::size_t i = 1; i < residuals.size(); ++i) {
      const bool at_rounding = residuals[i] <= 1e-13;
      const double ratio = residuals[i - 1] / residuals[i];
      if (!at_rounding) worst = std::min(worst, ratio);
      if (!at_rounding && !(ratio >= 1.5)) ok = false;
    }
    if (worst == 1e300)
      detail += printf_string("alpha=%.1f residual at rounding (%.1e); ", alpha, residuals.back());
    else
      detail += printf_string("alpha=%.1f min ratio %.2f; ", alpha, worst);

    FodeProblem pr;
    pr.alpha = alpha;
    pr.y0 = 0.0;
    pr.rhs = SqrtCounterexampleRhs{};
    pr.horizon = 1.0;
    const auto sol = solve_fode(pr, TimeMesh::uniform(1.0, 200));
    for (double v : sol.y.values)
      if (v != 0.0) ok = false;
  }
  detail += "zero branch exact";
  return {ok, detail};
}

// ---- criterion 4 -----------------------------------------------------------

struct RandomTrig {
  std::vector<double> amp;
  std::vector<double> phase;
  double horizon = 1.0;
  double operator()(double t) const {
    double v = 0.0;
    for (std::size_t k = 0; k < amp.size(); ++k) v += amp[k] * std::cos(double(k) * pi * t / horizon + phase[k]);
    return v;
  }
};

RandomTrig random_trig(std::mt19937_64& rng, double scale, double horizon) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
  RandomTrig f;
  f.horizon = horizon;
  for (int k = 0; k < 4; ++k) {
    f.amp.push_back(scale * unit(rng) / (1.0 + k));
    f.phase.push_back(angle(rng));
  }
  return f;
}

FodeProblem power_problem(double alpha, double c0, double p, double y0, double horizon,
                          std::function<double(double)> g = {}) {
  FodeProblem pr;
  pr.alpha = alpha;
  pr.y0 = y0;
  pr.rhs = PowerRhs{c0, p, std::move(g)};
  pr.horizon = horizon;
  return pr;
}

Outcome comparison_suites(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double alphas[] = {0.3, 0.5, 0.7};

  int positive = 0;
  for (int i = 0; i < 200; ++i) {
    const double alpha = alphas[i % 3];
    const double horizon = 0.5 + 2.0 * unit(rng);
    const auto mesh = TimeMesh::uniform(horizon, 150);
    auto c_fn = random_trig(rng, 1.0, horizon);
    auto f_fn = random_trig(rng, 1.0, horizon);
    const auto c = TimeSeries::sample(mesh, [&](double t) { return std::clamp(2.0 * c_fn(t), -2.0, 2.0); });
    const auto f = TimeSeries::sample(mesh, [&](double t) { return std::max(f_fn(t), 0.0); });
    if (check_lemma1_positivity(alpha, c, f)) ++positive;
  }

  int certified = 0;
  int ordered = 0;
  for (int i = 0; i < 100; ++i) {
    const double alpha = alphas[i % 3];
    const double p = 1.2 + 1.8 * unit(rng);
    const double c0 = 0.5 + 1.5 * unit(rng);
    const double a0 = 0.5 + unit(rng);
    const auto probe = solve_fode(power_problem(alpha, c0, p, a0, 50.0),
                                  TimeMesh::graded(50.0, 800, TimeMesh::default_grading(alpha)));
    if (!probe.blowup.detected) continue;
    const double horizon = 0.4 * probe.blowup.t_blow;
    const auto mesh = TimeMesh::graded(horizon, 160, TimeMesh::default_grading(alpha));
    auto g_up = random_trig(rng, 0.3 * a0, horizon);
    auto g_down = random_trig(rng, 0.3 * a0, horizon);
    const double kind = unit(rng);
    FodeProblem super_pr = power_problem(alpha, c0, p, a0, horizon, [g_up](double t) { return std::abs(g_up(t)); });
    if (kind < 0.3) super_pr = power_problem(alpha, 1.1 * c0, p, a0, horizon);
    if (kind > 0.7) super_pr = power_problem(alpha, c0, p, a0 * 1.05, horizon);
    const FodeProblem sub_pr =
        power_problem(alpha, c0, p, a0, horizon, [g_down](double t) { return -std::abs(g_down(t)); });
    const auto y = solve_fode(super_pr, mesh);
    const auto z = solve_fode(sub_pr, mesh);
    if (!y.y.mesh.same_nodes(mesh) || !z.y.mesh.same_nodes(mesh)) continue;
    try {
      const bool ok = check_lemma2_comparison(alpha, c0, p, a0, y.y, z.y);
      ++certified;
      if (ok) ++ordered;
    } catch (const PreconditionViolation&) {
    }
  }
  return {positive == 200 && certified == 100 && ordered == 100,
          printf_string("linear positivity %d/200; sub/super-solution pairs certified %d/100, ordered %d/100", positive, certified,
                        ordered)};
}

// ---- criteria 5 and 6 ------------------------------------------------------

struct GridRun {
  double alpha, p, a0;
  double t_star;
  BlowupReport ode;
  BlowupReport pde;
  double agreement;
};

constexpr std::size_t kGridNodes = 1200;

std::vector<GridRun> blowup_grid() {
  std::vector<GridRun> runs;
  const auto dom = Domain::interval(1.0, 8);
  const SpectralBasis basis(dom, 4);
  for (double alpha : {0.3, 0.5, 0.7})
    for (double p : {1.5, 2.0, 3.0})
      for (double a0 : {0.5, 1.0, 2.0}) {
        const BoundInputs b{alpha, p, a0, a0, dom.measure()};
        const double ts = t_star(b);
        const double horizon = ts * 1.05;
        const auto mesh = TimeMesh::graded(horizon, kGridNodes, TimeMesh::default_grading(alpha));

        const auto ode = solve_fode(power_problem(alpha, 1.0, p, a0, horizon), mesh);
        std::vector<double> eta(ode.y.values);
        for (double& v : eta) v *= dom.measure();
        const RunRecord ode_run{TimeSeries(ode.y.mesh, eta, ode.y.blowup), ode.blowup, true};

        FracProblem prob;
        prob.alpha = alpha;
        prob.p = p;
        const auto pde = solve_semilinear(prob, basis, Field::constant(dom, a0), mesh);
        const RunRecord pde_run{pde.eta, pde.blowup, true};

        const double end = ode.blowup.detected ? 0.5 * ode.blowup.t_blow : 0.5 * ts;
        double agreement = 0.0;
        for (std::size_t j = 0; j < pde.eta.size(); ++j) {
          const double t = pde.eta.mesh[j];
          if (t > end) break;
          agreement = std::max(agreement, rel_err(pde.eta[j], dom.measure() * ode.y.interpolate(t)));
        }
        runs.push_back({alpha, p, a0, ts, verify_theorem1(ode_run, b), verify_theorem1(pde_run, b), agreement});
      }
  return runs;
}

Outcome blowup_bound(const std::vector<GridRun>& runs) {
  int ode_ok = 0;
  int pde_ok = 0;
  int agree = 0;
  double worst_agreement = 0.0;
  double worst_ratio = 0.0;
  double spot = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : runs) {
    if (r.ode.verdict != Verdict::bound_violated && r.ode.bound_ok && std::isfinite(r.ode.t_blow_numeric)) ++ode_ok;
    if (r.pde.verdict != Verdict::bound_violated && r.pde.bound_ok && std::isfinite(r.pde.t_blow_numeric)) ++pde_ok;
    if (r.agreement <= 1e-3) ++agree;
    worst_agreement = std::max(worst_agreement, r.agreement);
    worst_ratio = std::max({worst_ratio, r.ode.t_blow_numeric / r.t_star, r.pde.t_blow_numeric / r.t_star});
    if (r.alpha == 0.5 && r.p == 2.0 && r.a0 == 1.0) spot = std::max(r.ode.t_blow_numeric, r.pde.t_blow_numeric);
  }
  const int n = int(runs.size());
  const bool ok = ode_ok == n && pde_ok == n && agree == n && spot <= 4.0 / pi * 1.05;
  return {ok, printf_string("blowup within 1.05 T*: ode %d/%d, spectral %d/%d; max t_blow/T* %.4f; engine "
                            "agreement %d/%d (worst %.2e); spot t_blow %.5f vs 4/pi = %.5f",
                            ode_ok, n, pde_ok, n, worst_ratio, agree, n, worst_agreement, spot, 4.0 / pi)};
}

Outcome lower_growth(const std::vector<GridRun>& runs) {
  int ok_runs = 0;
  double worst = 1e300;
  std::size_t nodes = 0;
  for (const auto& r : runs) {
    if (r.ode.lower_bound_ok && r.pde.lower_bound_ok) ++ok_runs;
    worst = std::min({worst, r.ode.lower_ratio_min, r.pde.lower_ratio_min});
    nodes += r.ode.lower_nodes_checked + r.pde.lower_nodes_checked;
  }
  return {ok_runs == int(runs.size()), printf_string("%d/%zu cases (both engines), min eta/lower %.4f over %zu nodes",
                                                     ok_runs, runs.size(), worst, nodes)};
}

// ---- criterion 7 -----------------------------------------------------------

Outcome sublinear_regime() {
  const auto dom = Domain::interval(1.0, 64);
  const SpectralBasis basis(dom, 32);
  const auto a = Field::sample(dom, [](double x, double) { return 0.5 + 0.5 * std::cos(pi * x); });
  bool ok = a.min() >= 0.0;
  int good = 0;
  int total = 0;
  double worst_neg = 0.0;
  double max_u = 0.0;
  std::string failures;
  for (double p : {0.3, 0.5, 0.8})
    for (double alpha : {0.3, 0.7}) {
      ++total;
      FracProblem prob;
      prob.alpha = alpha;
      prob.p = p;
      try {
        const auto sol = solve_semilinear(prob, basis, a, TimeMesh::uniform(10.0, 500), {10});
        bool run_ok = sol.eta.mesh.end() == 10.0 && !sol.blowup.detected && sol.halvings == 0 &&
                      sol.max_picard_iterations < prob.picard_max;
        for (const auto& s : sol.snapshots) {
          worst_neg = std::min(worst_neg, s.u.min() / s.u.max());
          if (s.u.min() < -1e-7 * s.u.max()) run_ok = false;
        }
        for (double v : sol.linf.values) {
          if (!std::isfinite(v)) run_ok = false;
          max_u = std::max(max_u, v);
        }
        if (run_ok) ++good;
        else failures += printf_string(" p=%.1f,alpha=%.1f", p, alpha);
      } catch (const Error& e) {
        failures += printf_string(" p=%.1f,alpha=%.1f(%s)", p, alpha, e.what());
      }
    }
  ok = ok && good == total;
  return {ok, printf_string("%d/%d runs finite to T=10 without halving or fixed-point failure; max u %.3g; min u/max u "
                            "%.1e%s%s",
                            good, total, max_u, worst_neg, failures.empty() ? "" : "; failed:", failures.c_str())};
}

// ---- criterion 8 -----------------------------------------------------------

constexpr std::size_t kMassNodes = 3200;

Outcome mass_identity() {
  const auto dom = Domain::interval(2.0, 64);
  const SpectralBasis basis(dom, 32);
  const auto a = Field::sample(dom, [](double x, double) { return 0.6 + 0.4 * std::cos(pi * x / 2.0); });
  bool ok = true;
  std::string detail;
  for (double p : {1.5, 2.0, 3.0}) {
    FracProblem prob;
    prob.alpha = 0.5;
    prob.p = p;
    const BoundInputs b{prob.alpha, p, a.integral() / dom.measure(), a.min(), dom.measure()};
    const double horizon = t_star(b);
    const auto sol = solve_semilinear(prob, basis, a, TimeMesh::uniform(horizon, kMassNodes), {kMassNodes / 40});
    std::vector<double> shifted(sol.eta.values);
    const double e0 = shifted[0];
    for (double& v : shifted) v -= e0;
    const auto d = caputo_l1(sol.eta.mesh, shifted, prob.alpha);
    const double end = sol.blowup.detected ? 0.5 * sol.blowup.t_blow : horizon;
    double err = 0.0;
    for (std::size_t j = 1; j < d.size(); ++j) {
      const double t = sol.eta.mesh[j];
      if (t < 0.1 * end || t > end) continue;
      err = std::max(err, rel_err(d[j], sol.reaction[j]));
    }
    const double w0 = omega0(dom.measure(), p);
    double hoelder = 1e300;
    for (const auto& s : sol.snapshots) {
      double up = 0.0;
      for (double v : s.u.values) up += std::pow(std::max(v, 0.0), p);
      up *= dom.cell_area();
      hoelder = std::min(hoelder, up / (w0 * std::pow(mass_functional(s.u), p)));
    }
    if (!(err <= 5e-3) || !(hoelder >= 1.0 - 1e-12)) ok = false;
    detail += printf_string("p=%.1f: identity rel %.1e, min int u^p / (omega0 eta^p) %.6f over %zu snapshots; ", p,
                            err, hoelder, sol.snapshots.size());
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

// ---- criterion 9 -----------------------------------------------------------

Outcome bound_comparison() {
  int ordered = 0;
  int total = 0;
  for (double alpha : {0.3, 0.5, 0.7})
    for (double p : {1.5, 2.0, 3.0})
      for (double a0 : {0.5, 1.0, 2.0}) {
        const BoundInputs b{alpha, p, a0, a0, 1.0};
        ++total;
        if (t_star(b) < t_star_inf(b).value) ++ordered;
      }
  std::vector<double> alphas;
  for (int i = 0; i <= 18; ++i) alphas.push_back(0.05 + 0.05 * i);
  const auto up = t_star_profile(10.0, alphas);
  const auto down = t_star_profile(0.1, alphas);
  const bool rising = std::all_of(up.slope.begin(), up.slope.end(), [](double s) { return s > 0.0; });
  const bool falling = std::all_of(down.slope.begin(), down.slope.end(), [](double s) { return s < 0.0; });
  const double limit = std::exp(1.0 - std::numbers::egamma);
  const double at_zero = t_star_profile(1.0, std::vector<double>{1e-3}).value[0];
  const double err = rel_err(at_zero, limit);
  return {ordered == total && rising && falling && err <= 1e-3,
          printf_string("T* < T*inf in %d/%d; slopes positive at C=10: %s, negative at C=0.1: %s; f(1e-3) = %.7f "
                        "(rel %.1e to e^(1-gamma))",
                        ordered, total, rising ? "yes" : "no", falling ? "yes" : "no", at_zero, err)};
}

// ---- criterion 10 ----------------------------------------------------------

Outcome engine_equivalence() {
  const auto dom = Domain::interval(1.0, 64);
  const SpectralBasis basis(dom, 32);
  const auto a = Field::sample(dom, [](double x, double) { return 1.0 + 0.5 * std::cos(pi * x); });
  FracProblem prob;
  prob.alpha = 0.9;
  prob.p = 2.0;
  const BoundInputs b{prob.alpha, prob.p, a.integral() / dom.measure(), a.min(), dom.measure()};
  const double horizon = 0.5 * t_star(b);
  const std::size_t n = 1600;
  const auto mesh = TimeMesh::uniform(horizon, n);
  const auto sp = solve_semilinear(prob, basis, a, mesh, {n / 16});
  const auto fd = solve_fd(prob, a, mesh, {n / 16});
  double worst = 0.0;
  bool ok = sp.snapshots.size() == fd.snapshots.size() && sp.snapshots.size() == 17;
  for (std::size_t k = 0; ok && k < sp.snapshots.size(); ++k)
    worst = std::max(worst, relative_l2_error(fd.snapshots[k].u, sp.snapshots[k].u));
  ok = ok && worst <= 1e-3;
  return {ok, printf_string("alpha=0.9, p=2, a=1+0.5cos(pi x), t <= 0.5 T* = %.4f, N=%zu: max rel L2 %.2e over %zu "
                            "snapshots",
                            horizon, n, worst, sp.snapshots.size())};
}

struct CriterionSpec {
  int id;
  const char* title;
  double budget;
};

constexpr CriterionSpec kCriteria[] = {
    {1, "special-function battery", 5.0},
    {2, "L1 scheme order", 10.0},
    {3, "non-uniqueness counterexample", 5.0},
    {4, "comparison-principle suites", 60.0},
    {5, "blowup-time upper bound", 300.0},
    {6, "lower-solution growth", 0.0},
    {7, "global existence for p < 1", 180.0},
    {8, "mass identity and Hoelder inequality", 0.0},
    {9, "bound comparison and T* profile", 0.0},
    {10, "spectral and finite-difference engines agree", 0.0},
};

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  const auto wanted = [&](int id) {
    return options.only.empty() || std::find(options.only.begin(), options.only.end(), id) != options.only.end();
  };
  std::vector<CriterionResult> results;
  std::vector<GridRun> grid;
  for (const auto& crit : kCriteria) {
    if (!wanted(crit.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    const auto elapsed = [&] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    Outcome out{false, ""};
    try {
      switch (crit.id) {
        case 1: out = special_function_battery(options.seed); break;
        case 2: out = l1_order(); break;
        case 3: out = counterexample(); break;
        case 4: out = comparison_suites(options.seed); break;
        case 5:
        case 6:
          if (grid.empty()) {
            grid = blowup_grid();
          }
          out = crit.id == 5 ? blowup_bound(grid) : lower_growth(grid);
          break;
        case 7: out = sublinear_regime(); break;
        case 8: out = mass_identity(); break;
        case 9: out = bound_comparison(); break;
        case 10: out = engine_equivalence(); break;
      }
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    CriterionResult r{crit.id, crit.title, out.passed, out.detail, elapsed(), crit.budget};
    if (r.budget > 0.0 && r.seconds > r.budget) {
      r.passed = false;
      r.detail += printf_string("; over the %.0f s budget", r.budget);
    }
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_result(const CriterionResult& r) {
  return printf_string("criterion %d: %s  %s: %s  (%.1f s)", r.id, r.passed ? "PASS" : "FAIL", r.title.c_str(),
                       r.detail.c_str(), r.seconds);
}

}  // namespace fracblow
