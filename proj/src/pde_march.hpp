#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fracblow/error.hpp"
#include "fracblow/spectral_pde.hpp"

namespace fracblow::detail {

enum class StepStatus { accepted, rejected };

/// Drives a PDE stepper over the nodes of `mesh` with step halving and packages the result.
/// The stepper provides step(t_new, uniform_history, h) plus the accepted histories
/// t(), eta(), linf(), l2(), reaction(), last() and max_iterations().
template <class Stepper>
PdeSolution run_pde_march(Stepper& march, const FracProblem& problem, const Field& a, const TimeMesh& mesh,
                          const PdeOptions& options, const std::string& engine) {
  std::vector<Snapshot> snapshots{{0.0, a}};
  int halvings = 0;
  const auto base = mesh.nodes();
  bool uniform = mesh.kind() == MeshKind::uniform;
  const double h_uniform = base[1] - base[0];
  StopReason reason = StopReason::reached_end;
  double threshold_hit = std::numeric_limits<double>::quiet_NaN();
  std::size_t next = 1;
  double h = base[1] - base[0];
  while (next < base.size()) {
    const double t_cur = march.t().back();
    const double target = base[next];
    const double t_new = (t_cur + h >= target - 1e-12 * h) ? target : t_cur + h;
    if (march.step(t_new, uniform, h_uniform) == StepStatus::rejected) {
      if (halvings == problem.max_halvings) {
        reason = StopReason::step_limit;
        break;
      }
      ++halvings;
      uniform = false;
      h = 0.5 * (t_new - t_cur);
      continue;
    }
    const std::size_t accepted = march.t().size() - 1;
    if (options.snapshot_every > 0 && accepted % options.snapshot_every == 0)
      snapshots.push_back({t_new, march.last()});
    if (march.linf().back() > problem.cap) {
      reason = StopReason::cap_exceeded;
      threshold_hit = t_new;
      break;
    }
    if (t_new == target) {
      ++next;
      if (next < base.size()) h = base[next] - base[next - 1];
    }
  }

  if (reason == StopReason::step_limit && !problem.superlinear())
    throw ConvergenceError(engine + ": fixed-point iteration did not converge within the halving budget");

  const auto& t = march.t();
  if (t.size() < 3) throw NumericalFailure(engine + ": march stopped before two steps were accepted");
  if (snapshots.back().t != t.back()) snapshots.push_back({t.back(), march.last()});

  BlowupEstimate estimate;
  if (reason == StopReason::reached_end) {
    estimate.t_blow = std::numeric_limits<double>::infinity();
  } else {
    estimate = fit_blowup(t, march.eta());
  }
  estimate.reason = reason;
  estimate.threshold_hit = threshold_hit;

  const TimeMesh out_mesh = t.size() == base.size() ? mesh : TimeMesh::from_nodes(t);
  const bool blew = estimate.detected;
  return PdeSolution{std::move(snapshots),
                     TimeSeries(out_mesh, march.eta(), blew),
                     TimeSeries(out_mesh, march.linf(), blew),
                     TimeSeries(out_mesh, march.l2(), blew),
                     TimeSeries(out_mesh, march.reaction(), blew),
                     estimate,
                     halvings,
                     march.max_iterations()};
}

/// Shared input checks of the two PDE engines.
inline void check_pde_inputs(const FracProblem& problem, const Field& a, const std::string& engine) {
  problem.validate();
  if (problem.reaction && a.min() < 0.0) throw ParameterError(engine + ": initial value must be nonnegative");
  if (!(problem.cap > a.max_abs())) throw ParameterError(engine + ": cap must exceed max |a|");
}

/// Throws when u dips below -1e-7 max u.
inline void check_negativity(const Field& u, double t, const std::string& engine) {
  const double lo = u.min();
  if (lo < -1e-7 * u.max())
    throw NumericalFailure(engine + ": negative density " + std::to_string(lo) + " at t=" + std::to_string(t) +
                           " (comparison principle violated by the discretization)");
}

}  // namespace fracblow::detail
