#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fracblow {

enum class MeshKind { uniform, graded, custom };

/// Temporal grid 0 = t_0 < t_1 < ... < t_N.
class TimeMesh {
 public:
  /// t_j = T j / N.
  static TimeMesh uniform(double t_end, std::size_t intervals);
  /// t_j = T (j/N)^r, r >= 1.
  static TimeMesh graded(double t_end, std::size_t intervals, double grading);
  /// Arbitrary strictly increasing nodes starting at 0 (used by adaptive solvers).
  static TimeMesh from_nodes(std::vector<double> nodes);

  /// Grading exponent (2 - alpha)/alpha recommended for t^alpha initial layers.
  static double default_grading(double alpha);

  std::span<const double> nodes() const { return nodes_; }
  double operator[](std::size_t j) const { return nodes_[j]; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t intervals() const { return nodes_.size() - 1; }
  double end() const { return nodes_.back(); }
  double step(std::size_t j) const { return nodes_[j] - nodes_[j - 1]; }
  MeshKind kind() const { return kind_; }
  double grading() const { return grading_; }

  bool same_nodes(const TimeMesh& other) const { return nodes_ == other.nodes_; }

 private:
  TimeMesh(std::vector<double> nodes, MeshKind kind, double grading);

  std::vector<double> nodes_;
  MeshKind kind_;
  double grading_;
};

/// A scalar function sampled at the nodes of a mesh.
struct TimeSeries {
  TimeMesh mesh;
  std::vector<double> values;
  /// Set when the sampled function is known to leave every bound (values may be inf).
  bool blowup = false;

  TimeSeries(TimeMesh m, std::vector<double> v, bool blew_up = false);

  static TimeSeries sample(const TimeMesh& mesh, const std::function<double(double)>& f);

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t j) const { return values[j]; }

  /// Piecewise-linear interpolant (constant extrapolation outside the mesh).
  double interpolate(double t) const;
};

}  // namespace fracblow
