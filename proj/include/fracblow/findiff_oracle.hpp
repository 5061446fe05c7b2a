#pragma once

#include <cstddef>

#include "fracblow/spectral_pde.hpp"

namespace fracblow {

/// Cell-centred finite-difference grid; the nodes coincide with the collocation grid
/// of the Domain, so fields can be compared point by point with the spectral engine.
class FdGrid {
 public:
  explicit FdGrid(const Domain& domain);

  const Domain& domain() const { return domain_; }
  int dimension() const { return domain_.dimension(); }
  std::size_t size() const { return domain_.size(); }
  double hx() const { return domain_.hx(); }
  double hy() const { return domain_.hy(); }

  /// Five-point (three-point in 1-D) Laplacian with mirrored ghost values.
  void laplacian(const std::vector<double>& u, std::vector<double>& out) const;

 private:
  Domain domain_;
};

/// L1 in time, second-order differences in space, u^p lagged with one correction.
/// Steps are halved when the correction grows instead of shrinking, or when a
/// superlinear problem more than doubles max u in one step.
PdeSolution solve_fd(const FracProblem& problem, const Field& a, const TimeMesh& mesh,
                     const PdeOptions& options = {});

}  // namespace fracblow
