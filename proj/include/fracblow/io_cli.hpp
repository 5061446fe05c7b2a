#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

namespace fracblow {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

enum class Engine { ode, spectral, fd };
std::string to_string(Engine e);

struct MlfArgs {
  double alpha = 1.0;
  double beta = 1.0;
  std::vector<double> z;
  /// zmin, zmax, count (empty when not requested).
  std::vector<double> table;
};

struct FraccalcArgs {
  std::string op = "caputo";
  double alpha = 0.5;
  std::string input;
};

struct FodeArgs {
  double alpha = 0.5;
  double p = 2.0;
  double c0 = 1.0;
  double y0 = 1.0;
  double horizon = 1.0;
  std::size_t n = 400;
  std::string scheme = "l1";
  double cap = 1e8;
  std::string mesh = "graded";
  std::string report;
};

struct PdeArgs {
  double alpha = 0.5;
  double p = 2.0;
  Engine engine = Engine::spectral;
  std::string domain = "interval:1";
  /// Grid points per axis; 0 picks 2 * modes.
  std::size_t grid = 0;
  /// Cosine modes per axis; 0 picks 32 (interval) or 12 (rectangle), or grid / 2.
  std::size_t modes = 0;
  std::string a = "cosine-bump";
  /// Final time; 0 picks 1.05 t_star for p > 1 and 10 otherwise.
  double horizon = 0.0;
  std::size_t n = 400;
  std::string mesh = "uniform";
  double cap = 1e8;
  bool reaction = true;
  std::size_t snapshot_every = 0;
};

struct BoundsArgs {
  double alpha = 0.5;
  double p = 2.0;
  double a_mean = 1.0;
  /// NaN means "same as a_mean".
  double a_min = std::numeric_limits<double>::quiet_NaN();
  double omega = 1.0;
};

struct SweepArgs {
  std::string param = "alpha:0.1:0.9:17";
  double alpha = 0.5;
  double p = 2.0;
  double a_mean = 1.0;
  double omega = 1.0;
  Engine engine = Engine::ode;
  std::size_t n = 800;
  unsigned jobs = 1;
  /// When set, every run also writes <prefix>_<index>_eta.csv.
  std::string run_prefix;
};

struct VerifyArgs {
  std::vector<int> criteria;
};

/// Parsed and validated command line. Only the member of the active subcommand is meaningful.
struct RunConfig {
  std::string subcommand;
  /// Output file (mlf, fraccalc, fode, bounds, sweep, verify; stdout when empty) or prefix (pde).
  std::string out;
  std::uint64_t seed = 20240601;
  MlfArgs mlf;
  FraccalcArgs fraccalc;
  FodeArgs fode;
  PdeArgs pde;
  BoundsArgs bounds;
  SweepArgs sweep;
  VerifyArgs verify;
};

/// Thrown by parse_config for --help; carries the help text.
struct HelpRequested {
  std::string text;
};

/// Parses arguments (without the program name). `--config file.json` supplies defaults:
/// its keys are flag names (plus an optional "subcommand"), and flags given on the
/// command line win. Throws UsageError naming the offending field.
RunConfig parse_config(const std::vector<std::string>& args);

/// The active subcommand's settings as JSON (echoed into reports).
nlohmann::json config_json(const RunConfig& config);

/// Executes a parsed configuration. Returns the exit code; library errors propagate.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_config + run with errors mapped to exit codes: 0 success (a detected blowup is
/// a result), 1 usage error, 2 numerical or I/O failure.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracblow
