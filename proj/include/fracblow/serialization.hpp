#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fracblow/blowup_analysis.hpp"
#include "fracblow/fode_solver.hpp"
#include "fracblow/spectral_pde.hpp"
#include "fracblow/time_mesh.hpp"

namespace fracblow {

inline constexpr const char* kVersion = "0.1.0";

/// 17 significant digits in the C locale; non-finite values as inf, -inf and nan.
std::string format_number(double v);

/// Comma-separated table with a mandatory header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::string str() const;
};

/// Columns t,eta,linf,l2.
CsvTable eta_table(const PdeSolution& sol);
/// Columns x,u (interval) or x,y,u (rectangle), x fastest.
CsvTable field_table(const Field& u);
/// Columns t,<name>.
CsvTable series_table(const TimeSeries& s, const std::string& name);

/// One row of the sweep file.
struct SweepRow {
  double alpha = 0.0;
  double p = 0.0;
  double a_mean = 0.0;
  double t_star = 0.0;
  double t_star_inf = 0.0;
  double t_blow_numeric = 0.0;
  /// (t_star - t_blow_numeric) / t_star; nan when no blowup was detected.
  double margin = 0.0;
  /// to_string(Verdict), or "error" when the run failed.
  std::string verdict;
};

/// Columns alpha,p,a_mean,t_star,t_star_inf,t_blow_numeric,margin,verdict.
std::string sweep_csv(const std::vector<SweepRow>& rows);

nlohmann::json to_json(const BlowupEstimate& e);

/// BlowupReport fields at the top level plus "version", "config" (the resolved run
/// configuration) and "run" (engine details). Non-finite numbers become null.
nlohmann::json report_json(const BlowupReport& r, const nlohmann::json& config, const nlohmann::json& run);

/// Writes `content` to `path`, throwing IoError on failure.
void write_text_file(const std::string& path, const std::string& content);

/// Parsed CSV: header names and numeric rows (all rows must have the header's width).
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column; IoError when absent.
  std::size_t column(const std::string& name) const;
};

CsvData read_csv(const std::string& path);

/// Two-column CSV (t, value) on nodes starting at t = 0.
TimeSeries read_series_csv(const std::string& path);

/// Field on `domain` from a CSV in the field_table layout. The coordinates must be the
/// grid's cell centres in x-fastest order (MeshMismatchError otherwise).
Field read_field_csv(const std::string& path, const Domain& domain);

}  // namespace fracblow
