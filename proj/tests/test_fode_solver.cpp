#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "fracblow/error.hpp"
#include "fracblow/fode_solver.hpp"
#include "fracblow/fractional_calculus.hpp"
#include "fracblow/special_functions.hpp"

using namespace fracblow;

namespace {

FodeProblem power_problem(double alpha, double c0, double p, double y0, double horizon,
                          std::function<double(double)> g = {}) {
  FodeProblem pr;
  pr.alpha = alpha;
  pr.y0 = y0;
  pr.rhs = PowerRhs{c0, p, std::move(g)};
  pr.horizon = horizon;
  return pr;
}

// Smooth random function sum_k a_k cos(k pi t / T + phi_k), k = 0..3.
struct RandomTrig {
  std::vector<double> amp;
  std::vector<double> phase;
  double horizon = 1.0;
  double operator()(double t) const {
    double v = 0.0;
    for (std::size_t k = 0; k < amp.size(); ++k)
      v += amp[k] * std::cos(double(k) * std::numbers::pi * t / horizon + phase[k]);
    return v;
  }
};

RandomTrig random_trig(std::mt19937_64& rng, double scale, double horizon) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  RandomTrig f;
  f.horizon = horizon;
  for (int k = 0; k < 4; ++k) {
    f.amp.push_back(scale * unit(rng) / (1.0 + k));
    f.phase.push_back(angle(rng));
  }
  return f;
}

}  // namespace

TEST_CASE("fode: problem validation") {
  CHECK_THROWS_AS(power_problem(1.0, 1.0, 2.0, 1.0, 1.0).validate(), ParameterError);
  CHECK_THROWS_AS(power_problem(0.5, 0.0, 2.0, 1.0, 1.0).validate(), ParameterError);
  CHECK_THROWS_AS(power_problem(0.5, 1.0, -1.0, 1.0, 1.0).validate(), ParameterError);
  CHECK_THROWS_AS(power_problem(0.5, 1.0, 2.0, -1.0, 1.0).validate(), ParameterError);
  const auto pr = power_problem(0.5, 1.0, 2.0, 1.0, 1.0);
  CHECK_THROWS_AS(solve_fode(pr, TimeMesh::uniform(2.0, 10)), ParameterError);
  CHECK_THROWS_AS(solve_fode(pr, TimeMesh::uniform(1.0, 10), FodeOptions{.cap = 0.5}), ParameterError);
}

TEST_CASE("fode: linear relaxation follows E_{alpha,1}(-t^alpha)") {
  for (double alpha : {0.3, 0.5, 0.7}) {
    const MittagLeffler e({alpha, 1.0});
    FodeProblem pr;
    pr.alpha = alpha;
    pr.y0 = 1.0;
    pr.rhs = LinearRhs{[](double) { return -1.0; }, [](double) { return 0.0; }};
    pr.horizon = 2.0;
    std::vector<double> errors;
    for (std::size_t n : {50, 100, 200, 400}) {
      const auto mesh = TimeMesh::graded(2.0, n, TimeMesh::default_grading(alpha));
      const auto sol = solve_fode(pr, mesh);
      CHECK_FALSE(sol.blowup.detected);
      CHECK(sol.y.mesh.same_nodes(mesh));
      double err = 0.0;
      for (std::size_t j = 0; j < mesh.size(); ++j)
        err = std::max(err, std::abs(sol.y[j] - e(-std::pow(mesh[j], alpha))));
      errors.push_back(err);
    }
    INFO("alpha = " << alpha);
    for (std::size_t i = 1; i < errors.size(); ++i) CHECK(errors[i] < 0.75 * errors[i - 1]);
    CHECK(errors.back() < 2e-3);
  }
}

TEST_CASE("fode: sqrt counterexample stays on the zero branch by default") {
  for (double alpha : {0.3, 0.5, 0.7}) {
    FodeProblem pr;
    pr.alpha = alpha;
    pr.y0 = 0.0;
    pr.rhs = SqrtCounterexampleRhs{};
    pr.horizon = 1.0;
    for (auto scheme : {FodeScheme::implicit_l1, FodeScheme::predictor_corrector}) {
      const auto sol = solve_fode(pr, TimeMesh::uniform(1.0, 64), FodeOptions{.scheme = scheme});
      for (double v : sol.y.values) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("fode: sqrt counterexample analytic seed tracks t^(2 alpha)") {
  for (double alpha : {0.3, 0.5, 0.7}) {
    FodeProblem pr;
    pr.alpha = alpha;
    pr.y0 = 0.0;
    pr.rhs = SqrtCounterexampleRhs{};
    pr.horizon = 1.0;
    std::vector<double> errors;
    for (std::size_t n : {100, 400}) {
      const auto mesh = TimeMesh::graded(1.0, n, TimeMesh::default_grading(alpha));
      const auto sol = solve_fode(pr, mesh, FodeOptions{.branch = FodeBranch::analytic_seed});
      double err = 0.0;
      for (std::size_t j = 0; j < mesh.size(); ++j) err = std::max(err, std::abs(sol.y[j] - std::pow(mesh[j], 2 * alpha)));
      errors.push_back(err);
    }
    INFO("alpha = " << alpha << " errors = " << errors[0] << ", " << errors[1]);
    CHECK(errors[1] < 0.3 * errors[0]);
    CHECK(errors[1] < 3e-2);
  }
}

TEST_CASE("fode: counterexample residual of t^(2 alpha) decays under refinement") {
  for (double alpha : {0.3, 0.7}) {
    const double k = std::tgamma(2 * alpha + 1) / std::tgamma(alpha + 1);
    std::vector<double> residuals;
    for (std::size_t n : {32, 64, 128, 256}) {
      const auto mesh = TimeMesh::graded(1.0, n, TimeMesh::default_grading(alpha));
      const auto y = TimeSeries::sample(mesh, [&](double t) { return std::pow(t, 2 * alpha); });
      const auto d = caputo_l1(y, alpha);
      double r = 0.0;
      for (std::size_t j = 1; j < mesh.size(); ++j) r = std::max(r, std::abs(d[j] - k * std::sqrt(y[j])));
      residuals.push_back(r);
    }
    const double floor_rate = std::min(2 - alpha, 1 + alpha) - 0.3;
    for (std::size_t i = 1; i < residuals.size(); ++i) {
      INFO("alpha = " << alpha << " rate = " << std::log2(residuals[i - 1] / residuals[i]));
      CHECK(std::log2(residuals[i - 1] / residuals[i]) >= floor_rate);
    }
  }
}

TEST_CASE("fode: power blowup for alpha = 1/2, p = 2, y0 = 1 lies below 4/pi") {
  const auto pr = power_problem(0.5, 1.0, 2.0, 1.0, 4.0 / std::numbers::pi);
  const auto mesh = TimeMesh::graded(pr.horizon, 400, 3.0);
  for (auto scheme : {FodeScheme::implicit_l1, FodeScheme::predictor_corrector}) {
    const auto sol = solve_fode(pr, mesh, FodeOptions{.scheme = scheme});
    CHECK(sol.blowup.detected);
    CHECK(sol.y.blowup);
    CHECK(sol.blowup.t_blow <= 4.0 / std::numbers::pi);
    CHECK(sol.blowup.t_blow >= sol.y.mesh.end());
    CHECK(sol.blowup.m_fit > 0.0);
    if (sol.blowup.reason == StopReason::cap_exceeded) CHECK(sol.blowup.t_blow >= sol.blowup.threshold_hit);
  }
}

TEST_CASE("fode: blowup time is nonincreasing in y0 and c0") {
  for (double alpha : {0.4, 0.6}) {
    std::vector<std::vector<double>> t_blow;
    for (double c0 : {0.5, 1.0, 2.0}) {
      t_blow.emplace_back();
      for (double y0 : {0.5, 1.0, 2.0, 4.0}) {
        const auto pr = power_problem(alpha, c0, 2.0, y0, 20.0);
        const auto sol = solve_fode(pr, TimeMesh::graded(20.0, 2000, TimeMesh::default_grading(alpha)));
        REQUIRE(sol.blowup.detected);
        t_blow.back().push_back(sol.blowup.t_blow);
      }
    }
    for (std::size_t i = 0; i < t_blow.size(); ++i)
      for (std::size_t j = 0; j < t_blow[i].size(); ++j) {
        INFO("alpha=" << alpha << " c0 index " << i << " y0 index " << j);
        if (j > 0) CHECK(t_blow[i][j] <= t_blow[i][j - 1]);
        if (i > 0) CHECK(t_blow[i][j] <= t_blow[i - 1][j]);
      }
  }
}

TEST_CASE("fode: implicit L1 and predictor-corrector agree before blowup") {
  for (double alpha : {0.3, 0.5, 0.7}) {
    const auto probe = solve_fode(power_problem(alpha, 1.0, 2.0, 1.0, 5.0),
                                  TimeMesh::graded(5.0, 1000, TimeMesh::default_grading(alpha)));
    REQUIRE(probe.blowup.detected);
    const double horizon = 0.5 * probe.blowup.t_blow;
    const auto pr = power_problem(alpha, 1.0, 2.0, 1.0, horizon);
    // the predictor-corrector converges at order 1 + alpha, so small alpha needs more nodes
    const std::size_t n = alpha < 0.4 ? 4000 : 2000;
    const auto mesh = TimeMesh::graded(horizon, n, TimeMesh::default_grading(alpha));
    const auto l1 = solve_fode(pr, mesh);
    const auto pc = solve_fode(pr, mesh, FodeOptions{.scheme = FodeScheme::predictor_corrector});
    REQUIRE_FALSE(l1.blowup.detected);
    REQUIRE_FALSE(pc.blowup.detected);
    double worst = 0.0;
    for (std::size_t j = 0; j < mesh.size(); ++j) worst = std::max(worst, std::abs(l1.y[j] - pc.y[j]) / std::abs(pc.y[j]));
    INFO("alpha = " << alpha << " worst = " << worst);
    CHECK(worst <= 1e-4);
  }
}

TEST_CASE("fit_blowup recovers an exact power law") {
  std::vector<double> t;
  std::vector<double> y;
  for (int i = 0; i < 10; ++i) {
    const double ti = 1.0 - std::pow(0.5, i + 1);
    t.push_back(ti);
    y.push_back(3.0 * std::pow(1.0 - ti, -0.7));
  }
  const auto est = fit_blowup(t, y);
  CHECK(est.detected);
  CHECK(est.t_blow == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(est.m_fit == doctest::Approx(0.7).epsilon(1e-5));
  CHECK(est.c_fit == doctest::Approx(3.0).epsilon(1e-4));
}

TEST_CASE("linear positivity examples") {
  const double alpha = 0.5;
  const auto mesh = TimeMesh::uniform(1.0, 100);
  const auto zero = TimeSeries::sample(mesh, [](double) { return 0.0; });
  const auto one = TimeSeries::sample(mesh, [](double) { return 1.0; });
  CHECK(check_lemma1_positivity(alpha, zero, one));
  CHECK(check_lemma1_positivity(alpha, zero, zero));
  CHECK_THROWS_AS(check_lemma1_positivity(alpha, zero, TimeSeries::sample(TimeMesh::uniform(1.0, 50), [](double) { return 1.0; })),
                  MeshMismatchError);
}

TEST_CASE("linear positivity over 200 randomized linear problems") {
  std::mt19937_64 rng(1729);
  const double alphas[] = {0.3, 0.5, 0.7};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int holds = 0;
  for (int i = 0; i < 200; ++i) {
    const double alpha = alphas[i % 3];
    const double horizon = 0.5 + 2.0 * unit(rng);
    const auto mesh = TimeMesh::uniform(horizon, 150);
    auto c_fn = random_trig(rng, 1.0, horizon);
    auto f_fn = random_trig(rng, 1.0, horizon);
    // c clipped into [-2, 2]; f clipped at zero so that it vanishes on whole subintervals
    const auto c = TimeSeries::sample(mesh, [&](double t) { return std::clamp(2.0 * c_fn(t), -2.0, 2.0); });
    const auto f = TimeSeries::sample(mesh, [&](double t) { return std::max(f_fn(t), 0.0); });
    if (check_lemma1_positivity(alpha, c, f)) ++holds;
  }
  CHECK(holds == 200);
}

TEST_CASE("comparison reflexivity and swapped pairs") {
  const double alpha = 0.5, c0 = 1.0, p = 2.0, a0 = 1.0;
  const auto mesh = TimeMesh::graded(0.05, 200, 3.0);
  const auto y = solve_fode(power_problem(alpha, c0, p, a0, 0.05), mesh).y;
  CHECK(check_lemma2_comparison(alpha, c0, p, a0, y, y));
  const auto super = solve_fode(power_problem(alpha, 1.5 * c0, p, a0, 0.05), mesh).y;
  CHECK(check_lemma2_comparison(alpha, c0, p, a0, super, y));
  CHECK_THROWS_AS(check_lemma2_comparison(alpha, c0, p, a0, y, super), PreconditionViolation);
}

TEST_CASE("comparison ordering over 100 certified sub/super-solution pairs") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double alphas[] = {0.3, 0.5, 0.7};
  int certified = 0;
  int ordered = 0;
  for (int i = 0; i < 100; ++i) {
    const double alpha = alphas[i % 3];
    const double p = 1.2 + 1.8 * unit(rng);
    const double c0 = 0.5 + 1.5 * unit(rng);
    const double a0 = 0.5 + unit(rng);
    // The blowup time of the equality case sets the horizon.
    const auto probe = solve_fode(power_problem(alpha, c0, p, a0, 50.0),
                                  TimeMesh::graded(50.0, 800, TimeMesh::default_grading(alpha)));
    REQUIRE(probe.blowup.detected);
    const double horizon = 0.4 * probe.blowup.t_blow;
    const auto mesh = TimeMesh::graded(horizon, 160, TimeMesh::default_grading(alpha));
    auto g_up = random_trig(rng, 0.3 * a0, horizon);
    auto g_down = random_trig(rng, 0.3 * a0, horizon);
    const double kind = unit(rng);
    FodeProblem super_pr = power_problem(alpha, c0, p, a0, horizon, [g_up](double t) { return std::abs(g_up(t)); });
    if (kind < 0.3) super_pr = power_problem(alpha, 1.1 * c0, p, a0, horizon);
    if (kind > 0.7) super_pr = power_problem(alpha, c0, p, a0 * 1.05, horizon);
    const FodeProblem sub_pr = power_problem(alpha, c0, p, a0, horizon, [g_down](double t) { return -std::abs(g_down(t)); });
    const auto y = solve_fode(super_pr, mesh);
    const auto z = solve_fode(sub_pr, mesh);
    REQUIRE(y.y.mesh.same_nodes(mesh));
    REQUIRE(z.y.mesh.same_nodes(mesh));
    bool ok = false;
    try {
      ok = check_lemma2_comparison(alpha, c0, p, a0, y.y, z.y);
      ++certified;
    } catch (const PreconditionViolation& e) {
      INFO("case " << i << ": " << e.what());
      CHECK(false);
    }
    if (ok) ++ordered;
  }
  CHECK(certified == 100);
  CHECK(ordered == 100);
}
