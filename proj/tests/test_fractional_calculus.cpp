#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "fracblow/error.hpp"
#include "fracblow/fractional_calculus.hpp"
#include "fracblow/special_functions.hpp"

using namespace fracblow;

namespace {

double power_rule(int k, double alpha, double t) {
  return std::tgamma(k + 1.0) / std::tgamma(k + 1.0 - alpha) * std::pow(t, k - alpha);
}

double max_abs_diff(const TimeSeries& a, const TimeSeries& b) {
  double e = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) e = std::max(e, std::abs(a[j] - b[j]));
  return e;
}

std::vector<double> observed_orders(const std::vector<double>& errors) {
  std::vector<double> orders;
  for (std::size_t i = 1; i < errors.size(); ++i) orders.push_back(std::log2(errors[i - 1] / errors[i]));
  return orders;
}

}  // namespace

TEST_CASE("time mesh construction and validation") {
  const auto u = TimeMesh::uniform(2.0, 4);
  CHECK(u.size() == 5);
  CHECK(u[2] == doctest::Approx(1.0));
  CHECK(u.end() == 2.0);
  const auto g = TimeMesh::graded(1.0, 4, 2.0);
  CHECK(g[1] == doctest::Approx(1.0 / 16));
  CHECK(g.kind() == MeshKind::graded);
  CHECK(TimeMesh::default_grading(0.5) == doctest::Approx(3.0));
  CHECK_THROWS_AS(TimeMesh::uniform(1.0, 1), ParameterError);
  CHECK_THROWS_AS(TimeMesh::graded(1.0, 8, 0.5), ParameterError);
  CHECK_THROWS_AS(TimeMesh::from_nodes({0.0, 0.5, 0.5}), ParameterError);
  CHECK_THROWS_AS(TimeMesh::from_nodes({0.1, 0.5, 1.0}), ParameterError);
  CHECK_THROWS_AS(TimeSeries(u, {1.0, 2.0}), MeshMismatchError);
  CHECK_THROWS_AS(TimeSeries(u, {0.0, 1.0, INFINITY, 1.0, 1.0}), ParameterError);
  CHECK_NOTHROW(TimeSeries(u, {0.0, 1.0, INFINITY, 1.0, 1.0}, true));
}

TEST_CASE("caputo_l1: constants map to zero and linear data is exact") {
  const auto mesh = TimeMesh::graded(3.0, 40, 2.5);
  const auto c = TimeSeries::sample(mesh, [](double) { return 7.25; });
  for (double alpha : {0.1, 0.5, 0.9}) {
    const auto d = caputo_l1(c, alpha);
    for (double v : d.values) CHECK(v == 0.0);
    const auto lin = TimeSeries::sample(mesh, [](double t) { return 2.0 + t; });
    const auto dl = caputo_l1(lin, alpha);
    for (std::size_t j = 1; j < mesh.size(); ++j) {
      const double exact = power_rule(1, alpha, mesh[j]);
      CHECK(std::abs(dl[j] - exact) <= 1e-12 * exact);
    }
  }
}

TEST_CASE("caputo_l1: parameter and mesh errors") {
  const auto mesh = TimeMesh::uniform(1.0, 8);
  const auto f = TimeSeries::sample(mesh, [](double t) { return t; });
  CHECK_THROWS_AS(caputo_l1(f, 0.0), ParameterError);
  CHECK_THROWS_AS(caputo_l1(f, 1.0), ParameterError);
  const std::vector<double> short_values(5, 0.0);
  CHECK_THROWS_AS(caputo_l1(mesh, short_values, 0.5), MeshMismatchError);
}

TEST_CASE("caputo_l1: order 2 - alpha for t^3 on uniform meshes") {
  for (double alpha : {0.3, 0.5, 0.7}) {
    std::vector<double> errors;
    for (std::size_t n : {64, 128, 256, 512}) {
      const auto mesh = TimeMesh::uniform(1.0, n);
      const auto d = caputo_l1(TimeSeries::sample(mesh, [](double t) { return t * t * t; }), alpha);
      double e = 0.0;
      for (std::size_t j = 1; j < mesh.size(); ++j) e = std::max(e, std::abs(d[j] - power_rule(3, alpha, mesh[j])));
      errors.push_back(e);
    }
    for (double q : observed_orders(errors)) {
      INFO("alpha = " << alpha << " order = " << q);
      CHECK(std::abs(q - (2.0 - alpha)) <= 0.2);
    }
  }
}

TEST_CASE("caputo_l1: t^(2 alpha) converges to Gamma(2 alpha + 1)/Gamma(alpha + 1) t^alpha") {
  const double alpha = 0.5;
  const auto mesh = TimeMesh::uniform(1.0, 16);
  const auto d = caputo_l1(TimeSeries::sample(mesh, [&](double t) { return std::pow(t, 2 * alpha); }), alpha);
  for (std::size_t j = 1; j < mesh.size(); ++j)
    CHECK(d[j] == doctest::Approx(1.1283791671 * std::sqrt(mesh[j])).epsilon(1e-10));
}

TEST_CASE("caputo_l1: Mittag-Leffler eigenrelation away from the initial layer") {
  for (double alpha : {0.3, 0.5, 0.7}) {
    const MittagLeffler e({alpha, 1.0});
    const double lambda = 2.0;
    std::vector<double> errors;
    for (std::size_t n : {64, 128, 256, 512}) {
      const auto mesh = TimeMesh::graded(1.0, n, TimeMesh::default_grading(alpha));
      const auto f = TimeSeries::sample(mesh, [&](double t) { return e(-lambda * std::pow(t, alpha)); });
      const auto d = caputo_l1(f, alpha);
      double err = 0.0;
      for (std::size_t j = 1; j < mesh.size(); ++j)
        if (mesh[j] >= 0.1) err = std::max(err, std::abs(d[j] + lambda * f[j]));
      errors.push_back(err);
    }
    for (double q : observed_orders(errors)) {
      INFO("alpha = " << alpha << " order = " << q);
      CHECK(q >= 1.0);
    }
  }
}

TEST_CASE("rl_integral: closed forms for constants") {
  const auto mesh = TimeMesh::graded(2.0, 30, 1.7);
  const auto one = TimeSeries::sample(mesh, [](double) { return 1.0; });
  const auto plain = rl_integral(one, 1.0);
  for (std::size_t j = 0; j < mesh.size(); ++j) CHECK(plain[j] == doctest::Approx(mesh[j]).epsilon(1e-14));
  for (double beta : {0.2, 0.5, 1.5, 2.5}) {
    const auto j_beta = rl_integral(one, beta);
    for (std::size_t j = 0; j < mesh.size(); ++j)
      CHECK(std::abs(j_beta[j] - std::pow(mesh[j], beta) / std::tgamma(beta + 1.0)) < 1e-13);
  }
  CHECK_THROWS_AS(rl_integral(one, 0.0), ParameterError);
  CHECK_THROWS_AS(rl_integral(one, -1.0), ParameterError);
}

TEST_CASE("rl_integral inverts caputo_l1 at first order or better") {
  const auto fs = std::vector<std::function<double(double)>>{
      [](double t) { return t; }, [](double t) { return t * t; }, [](double t) { return std::sin(t); }};
  for (double alpha : {0.3, 0.5, 0.7}) {
    for (const auto& fn : fs) {
      std::vector<double> errors;
      for (std::size_t n : {32, 64, 128, 256}) {
        const auto mesh = TimeMesh::uniform(1.0, n);
        const auto f = TimeSeries::sample(mesh, fn);
        const auto back = rl_integral(caputo_l1(f, alpha), alpha);
        auto shifted = f;
        for (double& v : shifted.values) v -= f[0];
        errors.push_back(max_abs_diff(back, shifted));
      }
      for (double q : observed_orders(errors)) {
        INFO("alpha = " << alpha << " order = " << q);
        CHECK(q >= 0.95);
      }
    }
  }
}

TEST_CASE("rl_integral: semigroup J^b J^g 1 = J^(b+g) 1 up to discretization error") {
  // The interpolation error of t^g near 0 limits the rate to min(1, b + g).
  for (auto [beta, gam] : {std::pair{0.3, 0.4}, std::pair{0.5, 0.5}}) {
    std::vector<double> errors;
    for (std::size_t n : {64, 128, 256, 512}) {
      const auto mesh = TimeMesh::uniform(1.0, n);
      const auto one = TimeSeries::sample(mesh, [](double) { return 1.0; });
      errors.push_back(max_abs_diff(rl_integral(rl_integral(one, gam), beta), rl_integral(one, beta + gam)));
    }
    for (double q : observed_orders(errors)) {
      INFO("beta = " << beta << " gamma = " << gam << " order = " << q);
      CHECK(q >= std::min(1.0, beta + gam) - 0.05);
    }
  }
}

TEST_CASE("caputo_reciprocal_power: majorant over the parameter grid") {
  int checked = 0;
  for (int m = 1; m <= 5; ++m)
    for (double horizon : {0.5, 1.0, 4.0})
      for (double alpha : {0.25, 0.5, 0.75})
        for (int i = 1; i <= 9; ++i) {
          const double t = horizon * 0.1 * i;
          const double v = caputo_reciprocal_power(m, horizon, alpha, t);
          INFO("m=" << m << " T=" << horizon << " alpha=" << alpha << " t=" << t);
          CHECK(v > 0.0);
          CHECK(v <= caputo_reciprocal_power_majorant(m, horizon, alpha, t));
          ++checked;
        }
  CHECK(checked == 5 * 3 * 3 * 9);
}

TEST_CASE("caputo_reciprocal_power: agrees with the L1 derivative of (T - t)^-m") {
  for (int m : {1, 2, 3}) {
    for (double alpha : {0.3, 0.7}) {
      const double horizon = 1.0;
      const auto mesh = TimeMesh::uniform(0.6, 3000);
      const auto f = TimeSeries::sample(mesh, [&](double t) { return std::pow(horizon - t, -m); });
      const auto d = caputo_l1(f, alpha);
      for (std::size_t j : {500ul, 1500ul, 3000ul}) {
        const double series = caputo_reciprocal_power(m, horizon, alpha, mesh[j]);
        INFO("m=" << m << " alpha=" << alpha << " t=" << mesh[j]);
        CHECK(std::abs(d[j] - series) <= 2e-4 * series);
      }
    }
  }
}

TEST_CASE("caputo_reciprocal_power: alpha -> 1 recovers the classical derivative") {
  const double horizon = 2.0;
  const double t = 1.0;
  double previous_gap = INFINITY;
  for (double alpha : {0.9, 0.99, 0.999, 0.9999}) {
    for (int m : {1, 2}) {
      const double classical = m / std::pow(horizon - t, m + 1);
      const double gap = std::abs(caputo_reciprocal_power(m, horizon, alpha, t) - classical) / classical;
      if (m == 1) {
        CHECK(gap < previous_gap);
        previous_gap = gap;
      }
    }
  }
  CHECK(previous_gap < 1e-3);
}

TEST_CASE("caputo_reciprocal_power: edge cases and errors") {
  CHECK(caputo_reciprocal_power(3, 1.0, 0.5, 0.0) == 0.0);
  CHECK_THROWS_AS(caputo_reciprocal_power(1, 1.0, 0.5, 1.0 - 1e-13), ConvergenceError);
  CHECK_THROWS_AS(caputo_reciprocal_power(1, 1.0, 0.5, 1.5), DomainError);
  CHECK_THROWS_AS(caputo_reciprocal_power(1, 1.0, 0.5, -0.1), DomainError);
  CHECK_THROWS_AS(caputo_reciprocal_power(0, 1.0, 0.5, 0.5), ParameterError);
  CHECK_THROWS_AS(caputo_reciprocal_power(1, 1.0, 1.0, 0.5), ParameterError);
  CHECK_THROWS_AS(caputo_reciprocal_power(1, 1.0, 0.5, 0.5, 10), ParameterError);
  const double auto_cut = caputo_reciprocal_power(2, 1.0, 0.5, 0.5);
  const double explicit_cut = caputo_reciprocal_power(2, 1.0, 0.5, 0.5, 200);
  CHECK(std::abs(auto_cut - explicit_cut) <= 1e-15 * auto_cut);
}
