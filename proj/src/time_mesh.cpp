#include "fracblow/time_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracblow/error.hpp"

namespace fracblow {

TimeMesh::TimeMesh(std::vector<double> nodes, MeshKind kind, double grading)
    : nodes_(std::move(nodes)), kind_(kind), grading_(grading) {
  if (nodes_.size() < 3) throw ParameterError("TimeMesh: need at least 2 intervals");
  if (nodes_.front() != 0.0) throw ParameterError("TimeMesh: first node must be 0");
  for (std::size_t j = 1; j < nodes_.size(); ++j) {
    if (!(nodes_[j] > nodes_[j - 1]) || !std::isfinite(nodes_[j]))
      throw ParameterError("TimeMesh: nodes must be finite and strictly increasing (node " +
                           std::to_string(j) + ")");
  }
}

TimeMesh TimeMesh::uniform(double t_end, std::size_t intervals) {
  if (!(t_end > 0.0)) throw ParameterError("TimeMesh: end time must be positive");
  if (intervals < 2) throw ParameterError("TimeMesh: need at least 2 intervals");
  std::vector<double> nodes(intervals + 1);
  const double tau = t_end / double(intervals);
  for (std::size_t j = 0; j <= intervals; ++j) nodes[j] = tau * double(j);
  nodes.back() = t_end;
  return TimeMesh(std::move(nodes), MeshKind::uniform, 1.0);
}

TimeMesh TimeMesh::graded(double t_end, std::size_t intervals, double grading) {
  if (!(t_end > 0.0)) throw ParameterError("TimeMesh: end time must be positive");
  if (intervals < 2) throw ParameterError("TimeMesh: need at least 2 intervals");
  if (!(grading >= 1.0)) throw ParameterError("TimeMesh: grading exponent must be >= 1");
  std::vector<double> nodes(intervals + 1);
  for (std::size_t j = 0; j <= intervals; ++j)
    nodes[j] = t_end * std::pow(double(j) / double(intervals), grading);
  nodes.back() = t_end;
  return TimeMesh(std::move(nodes), MeshKind::graded, grading);
}

TimeMesh TimeMesh::from_nodes(std::vector<double> nodes) {
  return TimeMesh(std::move(nodes), MeshKind::custom, 1.0);
}

double TimeMesh::default_grading(double alpha) { return std::max(1.0, (2.0 - alpha) / alpha); }

TimeSeries::TimeSeries(TimeMesh m, std::vector<double> v, bool blew_up)
    : mesh(std::move(m)), values(std::move(v)), blowup(blew_up) {
  if (values.size() != mesh.size())
    throw MeshMismatchError("TimeSeries: " + std::to_string(values.size()) + " values for " +
                            std::to_string(mesh.size()) + " nodes");
  if (!blowup) {
    for (double v_j : values)
      if (!std::isfinite(v_j)) throw ParameterError("TimeSeries: non-finite value without blowup flag");
  }
}

TimeSeries TimeSeries::sample(const TimeMesh& mesh, const std::function<double(double)>& f) {
  std::vector<double> v(mesh.size());
  for (std::size_t j = 0; j < mesh.size(); ++j) v[j] = f(mesh[j]);
  return TimeSeries(mesh, std::move(v));
}

double TimeSeries::interpolate(double t) const {
  const auto nodes = mesh.nodes();
  if (t <= nodes.front()) return values.front();
  if (t >= nodes.back()) return values.back();
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
  const std::size_t j = std::size_t(it - nodes.begin());
  const double w = (t - nodes[j - 1]) / (nodes[j] - nodes[j - 1]);
  return (1.0 - w) * values[j - 1] + w * values[j];
}

}  // namespace fracblow
