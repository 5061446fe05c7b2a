#include "fracblow/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fracblow/error.hpp"

namespace fracblow {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += ',';
    out += header[c];
  }
  out += '\n';
  const std::size_t rows = columns.empty() ? 0 : columns[0].size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += format_number(columns[c][r]);
    }
    out += '\n';
  }
  return out;
}

CsvTable eta_table(const PdeSolution& sol) {
  const auto nodes = sol.eta.mesh.nodes();
  return {{"t", "eta", "linf", "l2"},
          {std::vector<double>(nodes.begin(), nodes.end()), sol.eta.values, sol.linf.values, sol.l2.values}};
}

CsvTable field_table(const Field& u) {
  const Domain& d = u.domain;
  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < d.qy(); ++j)
    for (std::size_t i = 0; i < d.qx(); ++i) {
      xs.push_back(d.x(i));
      ys.push_back(d.y(j));
    }
  if (d.dimension() == 1) return {{"x", "u"}, {xs, u.values}};
  return {{"x", "y", "u"}, {xs, ys, u.values}};
}

CsvTable series_table(const TimeSeries& s, const std::string& name) {
  const auto nodes = s.mesh.nodes();
  return {{"t", name}, {std::vector<double>(nodes.begin(), nodes.end()), s.values}};
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "alpha,p,a_mean,t_star,t_star_inf,t_blow_numeric,margin,verdict\n";
  for (const auto& r : rows) {
    for (double v : {r.alpha, r.p, r.a_mean, r.t_star, r.t_star_inf, r.t_blow_numeric, r.margin})
      out += format_number(v) + ',';
    out += r.verdict + '\n';
  }
  return out;
}

namespace {

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const BlowupEstimate& e) {
  return {{"detected", e.detected},
          {"t_blow", number(e.t_blow)},
          {"m_fit", number(e.m_fit)},
          {"c_fit", number(e.c_fit)},
          {"threshold_hit", number(e.threshold_hit)},
          {"reason", to_string(e.reason)}};
}

nlohmann::json report_json(const BlowupReport& r, const nlohmann::json& config, const nlohmann::json& run) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["alpha"] = number(r.alpha);
  j["p"] = number(r.p);
  j["a_mean"] = number(r.a_mean);
  j["a_min"] = number(r.a_min);
  j["omega"] = number(r.omega);
  j["omega0"] = number(r.omega0);
  j["t_star"] = number(r.t_star);
  j["t_star_inf"] = number(r.t_star_inf);
  j["m_inf"] = r.m_inf;
  j["m_used"] = r.m_used;
  j["t_blow_numeric"] = number(r.t_blow_numeric);
  j["bound_ok"] = r.bound_ok;
  j["lower_bound_ok"] = r.lower_bound_ok;
  j["lower_ratio_min"] = number(r.lower_ratio_min);
  j["lower_nodes_checked"] = r.lower_nodes_checked;
  j["eps_bound"] = number(r.eps_bound);
  j["eps_low"] = number(r.eps_low);
  j["verdict"] = to_string(r.verdict);
  j["config"] = config;
  j["run"] = run;
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << content;
  f.close();
  if (!f) throw IoError("failed writing " + path);
}

std::size_t CsvData::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name) return c;
  throw IoError("CSV has no column '" + name + "'");
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

CsvData read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  CsvData data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split(line);
    if (data.header.empty()) {
      data.header = std::move(cells);
      continue;
    }
    if (cells.size() != data.header.size())
      throw IoError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(data.header.size()) +
                    " fields, found " + std::to_string(cells.size()));
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || *end != '\0')
        throw IoError(path + ":" + std::to_string(line_no) + ": not a number: '" + c + "'");
      row.push_back(v);
    }
    data.rows.push_back(std::move(row));
  }
  if (data.header.empty()) throw IoError(path + ": empty file");
  return data;
}

TimeSeries read_series_csv(const std::string& path) {
  const auto data = read_csv(path);
  if (data.header.size() != 2) throw IoError(path + ": expected two columns (t, value)");
  if (data.rows.size() < 2) throw IoError(path + ": need at least two rows");
  std::vector<double> t, v;
  for (const auto& r : data.rows) {
    t.push_back(r[0]);
    v.push_back(r[1]);
  }
  return TimeSeries(TimeMesh::from_nodes(std::move(t)), std::move(v));
}

Field read_field_csv(const std::string& path, const Domain& domain) {
  const auto data = read_csv(path);
  const bool two_d = domain.dimension() == 2;
  const std::size_t cu = data.column("u");
  const std::size_t cx = data.column("x");
  const std::size_t cy = two_d ? data.column("y") : 0;
  if (data.rows.size() != domain.size())
    throw MeshMismatchError(path + ": " + std::to_string(data.rows.size()) + " rows for the " + describe(domain) +
                            " grid of " + std::to_string(domain.size()) + " nodes");
  std::vector<double> values(domain.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::size_t i = k % domain.qx();
    const std::size_t j = k / domain.qx();
    const auto& r = data.rows[k];
    const double tol = 1e-9 * (domain.lx() + domain.ly());
    if (std::abs(r[cx] - domain.x(i)) > tol || (two_d && std::abs(r[cy] - domain.y(j)) > tol))
      throw MeshMismatchError(path + ": row " + std::to_string(k + 1) + " is not the cell centre of node (" +
                              std::to_string(i) + ", " + std::to_string(j) + ") of " + describe(domain));
    values[k] = r[cu];
  }
  return Field(domain, std::move(values));
}

}  // namespace fracblow
