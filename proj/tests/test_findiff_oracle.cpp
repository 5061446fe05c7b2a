#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "fracblow/blowup_analysis.hpp"
#include "fracblow/error.hpp"
#include "fracblow/findiff_oracle.hpp"
#include "fracblow/fode_solver.hpp"
#include "fracblow/fractional_calculus.hpp"
#include "fracblow/special_functions.hpp"
#include "fracblow/spectral_pde.hpp"

using namespace fracblow;
using std::numbers::pi;

namespace {

// max over j >= 1 of |L1 Caputo derivative of eta - reaction| / reaction
double mass_identity_defect(const PdeSolution& sol, double alpha) {
  std::vector<double> shifted(sol.eta.values);
  const double e0 = shifted[0];
  for (double& v : shifted) v -= e0;
  const auto d = caputo_l1(sol.eta.mesh, shifted, alpha);
  double worst = 0.0;
  for (std::size_t j = 1; j < d.size(); ++j) worst = std::max(worst, std::abs(d[j] - sol.reaction[j]) / sol.reaction[j]);
  return worst;
}

}  // namespace

TEST_CASE("grid and discrete Laplacian") {
  CHECK_THROWS_AS(FdGrid(Domain::interval(1.0, 7)), ParameterError);
  CHECK_THROWS_AS(FdGrid(Domain::rectangle(1.0, 1.0, 16, 4)), ParameterError);
  CHECK_NOTHROW(FdGrid(Domain::interval(1.0, 8)));

  SUBCASE("constants are harmonic and the stencil is conservative") {
    const auto dom = Domain::rectangle(1.0, 3.0, 12, 20);
    const FdGrid grid(dom);
    std::vector<double> out;
    grid.laplacian(std::vector<double>(dom.size(), 2.5), out);
    for (double v : out) CHECK(v == 0.0);
    const auto f = Field::sample(dom, [](double x, double y) { return std::exp(x) * std::sin(3.0 * y) + x * y; });
    grid.laplacian(f.values, out);
    double sum = 0.0;
    double scale = 0.0;
    for (double v : out) {
      sum += v;
      scale += std::abs(v);
    }
    CHECK(std::abs(sum) <= 1e-12 * scale);
  }

  SUBCASE("cosines on the cell-centred grid are exact eigenvectors") {
    const double len = 2.0;
    const auto dom = Domain::interval(len, 32);
    const FdGrid grid(dom);
    for (int k = 1; k < 6; ++k) {
      const auto f = Field::sample(dom, [&](double x, double) { return std::cos(k * pi * x / len); });
      const double h = dom.hx();
      const double lam_h = std::pow(2.0 / h * std::sin(k * pi * h / (2.0 * len)), 2);
      std::vector<double> out;
      grid.laplacian(f.values, out);
      for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == doctest::Approx(-lam_h * f.values[i]).scale(1.0));
    }
  }
}

TEST_CASE("linear problems") {
  FracProblem prob;
  prob.alpha = 0.6;
  prob.reaction = false;

  SUBCASE("constant data stays constant") {
    const auto dom = Domain::rectangle(1.0, 1.0, 8, 8);
    const auto sol = solve_fd(prob, Field::constant(dom, 3.0), TimeMesh::uniform(2.0, 50), {10});
    for (const auto& s : sol.snapshots)
      for (double v : s.u.values) CHECK(v == doctest::Approx(3.0).epsilon(1e-13));
  }

  SUBCASE("a cosine mode converges to the Mittag-Leffler decay") {
    const double len = 1.0;
    const double horizon = 0.5;
    const MittagLeffler e({prob.alpha, 1.0});
    std::vector<double> errors;
    for (std::size_t q : {16, 32, 64}) {
      const auto dom = Domain::interval(len, q);
      const auto a = Field::sample(dom, [&](double x, double) { return 1.0 + std::cos(pi * x / len); });
      const auto mesh = TimeMesh::graded(horizon, 10 * q, TimeMesh::default_grading(prob.alpha));
      const auto sol = solve_fd(prob, a, mesh);
      const double decay = e(-pi * pi / (len * len) * std::pow(horizon, prob.alpha));
      const auto exact = Field::sample(dom, [&](double x, double) { return 1.0 + decay * std::cos(pi * x / len); });
      errors.push_back(relative_l2_error(sol.snapshots.back().u, exact));
      for (double eta : sol.eta.values) CHECK(eta == doctest::Approx(a.integral()).epsilon(1e-12));
    }
    CHECK(errors[1] < errors[0]);
    CHECK(errors[2] < errors[1]);
    CHECK(errors[2] <= 1e-3);
  }
}

TEST_CASE("uniform data reproduces the ODE reduction") {
  const auto dom = Domain::interval(1.0, 8);
  FracProblem prob;
  prob.alpha = 0.5;
  prob.p = 2.0;
  const double horizon = 4.0 / pi;
  const auto mesh = TimeMesh::graded(horizon, 1600, TimeMesh::default_grading(0.5));
  const auto fd = solve_fd(prob, Field::constant(dom, 1.0), mesh);
  FodeProblem ode;
  ode.alpha = 0.5;
  ode.y0 = 1.0;
  ode.rhs = PowerRhs{1.0, 2.0, {}};
  ode.horizon = horizon;
  const auto ref = solve_fode(ode, mesh);
  REQUIRE(fd.blowup.detected);
  CHECK(fd.blowup.t_blow <= horizon);
  CHECK(fd.blowup.t_blow == doctest::Approx(ref.blowup.t_blow).epsilon(0.02));
  double worst = 0.0;
  for (std::size_t j = 0; j < fd.eta.size(); ++j) {
    const double t = fd.eta.mesh[j];
    if (t > 0.5 * ref.blowup.t_blow) break;
    worst = std::max(worst, std::abs(fd.eta[j] / ref.y.interpolate(t) - 1.0));
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("discrete mass identity holds to rounding") {
  SUBCASE("interval") {
    for (double p : {0.5, 2.0}) {
      CAPTURE(p);
      const auto dom = Domain::interval(2.0, 64);
      const auto a = Field::sample(dom, [](double x, double) { return 0.6 + 0.4 * std::cos(pi * x / 2.0); });
      FracProblem prob;
      prob.alpha = 0.5;
      prob.p = p;
      const auto sol = solve_fd(prob, a, TimeMesh::uniform(p < 1.0 ? 2.0 : 0.6, 300));
      CHECK(mass_identity_defect(sol, prob.alpha) <= 1e-10);
    }
  }
  SUBCASE("rectangle") {
    const auto dom = Domain::rectangle(1.0, 2.0, 12, 16);
    const auto a = Field::sample(dom, [](double x, double y) { return 1.0 + 0.5 * std::cos(pi * x) * std::cos(pi * y / 2.0); });
    FracProblem prob;
    prob.alpha = 0.7;
    prob.p = 1.5;
    const auto sol = solve_fd(prob, a, TimeMesh::graded(0.5, 200, TimeMesh::default_grading(0.7)));
    CHECK(mass_identity_defect(sol, prob.alpha) <= 1e-10);
  }
}

TEST_CASE("agreement with the spectral engine") {
  SUBCASE("interval benchmark") {
    const auto dom = Domain::interval(1.0, 64);
    const SpectralBasis basis(dom, 32);
    const auto a = Field::sample(dom, [](double x, double) { return 1.0 + 0.5 * std::cos(pi * x); });
    FracProblem prob;
    prob.alpha = 0.9;
    prob.p = 2.0;
    BoundInputs b{prob.alpha, prob.p, a.integral() / dom.measure(), 0.5, dom.measure()};
    const double horizon = 0.5 * t_star(b);
    const std::size_t n = 800;
    const auto mesh = TimeMesh::uniform(horizon, n);
    const auto sp = solve_semilinear(prob, basis, a, mesh, {n / 8});
    const auto fd = solve_fd(prob, a, mesh, {n / 8});
    REQUIRE(sp.snapshots.size() == fd.snapshots.size());
    for (std::size_t k = 0; k < sp.snapshots.size(); ++k) {
      CAPTURE(sp.snapshots[k].t);
      CHECK(sp.snapshots[k].t == fd.snapshots[k].t);
      CHECK(relative_l2_error(fd.snapshots[k].u, sp.snapshots[k].u) <= 1e-3);
    }
  }
  SUBCASE("rectangle") {
    const auto dom = Domain::rectangle(1.0, 2.0, 16, 32);
    const SpectralBasis basis(dom, 8, 16);
    const auto a =
        Field::sample(dom, [](double x, double y) { return 1.0 + 0.3 * std::cos(pi * x) * std::cos(pi * y / 2.0); });
    FracProblem prob;
    prob.alpha = 0.9;
    prob.p = 2.0;
    const auto mesh = TimeMesh::uniform(0.3, 300);
    const auto sp = solve_semilinear(prob, basis, a, mesh, {100});
    const auto fd = solve_fd(prob, a, mesh, {100});
    for (std::size_t k = 0; k < sp.snapshots.size(); ++k)
      CHECK(relative_l2_error(fd.snapshots[k].u, sp.snapshots[k].u) <= 1e-3);
  }
}

TEST_CASE("nonnegativity is preserved") {
  for (double p : {0.5, 2.0}) {
    const auto dom = Domain::interval(1.0, 64);
    const auto a = Field::sample(dom, [](double x, double) { return 0.5 + 0.5 * std::cos(pi * x); });
    FracProblem prob;
    prob.alpha = 0.5;
    prob.p = p;
    const auto sol = solve_fd(prob, a, TimeMesh::uniform(p < 1.0 ? 3.0 : 0.5, 300), {1});
    for (const auto& s : sol.snapshots) CHECK(s.u.min() >= -1e-7 * s.u.max());
  }
}

TEST_CASE("blowup is detected and input errors are reported") {
  const auto dom = Domain::interval(1.0, 16);
  FracProblem prob;
  prob.alpha = 0.5;
  prob.p = 2.0;
  prob.cap = 50.0;
  const auto sol = solve_fd(prob, Field::constant(dom, 1.0), TimeMesh::uniform(1.0, 400));
  CHECK(sol.blowup.detected);
  CHECK(sol.blowup.reason == StopReason::cap_exceeded);
  CHECK(sol.linf.values.back() > 50.0);
  CHECK(sol.blowup.t_blow <= 4.0 / pi * 1.02);

  const auto mesh = TimeMesh::uniform(1.0, 10);
  prob.cap = 1e8;
  CHECK_THROWS_AS(solve_fd(prob, Field::constant(dom, -1.0), mesh), ParameterError);
  prob.alpha = 1.0;
  CHECK_THROWS_AS(solve_fd(prob, Field::constant(dom, 1.0), mesh), ParameterError);
  prob.alpha = 0.0;
  CHECK_THROWS_AS(solve_fd(prob, Field::constant(dom, 1.0), mesh), ParameterError);
}
