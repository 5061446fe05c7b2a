#include "fracblow/io_cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "fracblow/acceptance.hpp"
#include "fracblow/blowup_analysis.hpp"
#include "fracblow/error.hpp"
#include "fracblow/findiff_oracle.hpp"
#include "fracblow/fode_solver.hpp"
#include "fracblow/fractional_calculus.hpp"
#include "fracblow/serialization.hpp"
#include "fracblow/special_functions.hpp"
#include "fracblow/spectral_pde.hpp"

namespace fracblow {

std::string to_string(Engine e) {
  switch (e) {
    case Engine::ode: return "ode";
    case Engine::spectral: return "spectral";
    case Engine::fd: return "fd";
  }
  return "?";
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

// ---- argument parsing -------------------------------------------------------

CLI::Validator number_check(const std::string& description, bool (*ok)(double)) {
  return CLI::Validator(
      [ok, description](std::string& s) -> std::string {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || *end != '\0') return "'" + s + "' is not a number";
        return ok(v) ? std::string() : "must be " + description + ", got " + s;
      },
      description);
}

const CLI::Validator kUnitAlpha = number_check("in (0, 1]", [](double v) { return v > 0.0 && v <= 1.0; });
const CLI::Validator kOpenAlpha = number_check("in (0, 1)", [](double v) { return v > 0.0 && v < 1.0; });
const CLI::Validator kPositive = number_check("positive", [](double v) { return v > 0.0 && std::isfinite(v); });
const CLI::Validator kNonnegative = number_check("nonnegative", [](double v) { return v >= 0.0 && std::isfinite(v); });

std::map<std::string, Engine> engine_map(bool with_ode) {
  std::map<std::string, Engine> m{{"spectral", Engine::spectral}, {"fd", Engine::fd}};
  if (with_ode) m["ode"] = Engine::ode;
  return m;
}

void build_app(CLI::App& app, RunConfig& c, std::string& config_file) {
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", config_file, "JSON file with default flag values");
  app.add_option("--seed", c.seed, "seed of the randomized property suites");
  app.add_option("--out", c.out, "output file, or output prefix for pde");

  auto* mlf = app.add_subcommand("mlf", "Mittag-Leffler function E_{alpha,beta}(z) as CSV z,value");
  mlf->add_option("--alpha", c.mlf.alpha)->check(kUnitAlpha);
  mlf->add_option("--beta", c.mlf.beta)->check(kPositive);
  mlf->add_option("--z", c.mlf.z, "arguments");
  mlf->add_option("--table", c.mlf.table, "zmin zmax count")->expected(3);

  auto* fc = app.add_subcommand("fraccalc", "Caputo derivative or Riemann-Liouville integral of a CSV series");
  fc->add_option("--op", c.fraccalc.op)->check(CLI::IsMember({"caputo", "integral"}));
  fc->add_option("--alpha", c.fraccalc.alpha)->check(kPositive);
  fc->add_option("--in", c.fraccalc.input, "CSV with columns t,value")->required();

  auto* fode = app.add_subcommand("fode", "scalar problem d^alpha (y - y0) = c0 y^p as CSV t,y");
  fode->add_option("--alpha", c.fode.alpha)->check(kOpenAlpha);
  fode->add_option("--p", c.fode.p)->check(kPositive);
  fode->add_option("--c0", c.fode.c0)->check(kPositive);
  fode->add_option("--y0", c.fode.y0)->check(kNonnegative);
  fode->add_option("--T", c.fode.horizon)->check(kPositive);
  fode->add_option("--n", c.fode.n)->check(CLI::Range(std::size_t(2), std::size_t(1) << 24));
  fode->add_option("--scheme", c.fode.scheme)->check(CLI::IsMember({"l1", "pc"}));
  fode->add_option("--cap", c.fode.cap)->check(kPositive);
  fode->add_option("--mesh", c.fode.mesh)->check(CLI::IsMember({"uniform", "graded"}));
  fode->add_option("--report", c.fode.report, "JSON blowup report");

  auto* pde = app.add_subcommand("pde", "semilinear time-fractional diffusion with Neumann data");
  pde->add_option("--alpha", c.pde.alpha)->check(kUnitAlpha);
  pde->add_option("--p", c.pde.p)->check(kPositive);
  pde->add_option("--engine", c.pde.engine)->transform(CLI::CheckedTransformer(engine_map(false)));
  pde->add_option("--domain", c.pde.domain, "interval:L or rect:Lx:Ly");
  pde->add_option("--grid", c.pde.grid, "grid points per axis");
  pde->add_option("--modes", c.pde.modes, "cosine modes per axis");
  pde->add_option("--a", c.pde.a, "constant:c, cosine-bump[:amp] or file:path");
  pde->add_option("--T", c.pde.horizon)->check(kPositive);
  pde->add_option("--n", c.pde.n)->check(CLI::Range(std::size_t(2), std::size_t(1) << 20));
  pde->add_option("--mesh", c.pde.mesh)->check(CLI::IsMember({"uniform", "graded"}));
  pde->add_option("--cap", c.pde.cap)->check(kPositive);
  pde->add_flag("!--no-reaction", c.pde.reaction, "drop the u^p term");
  pde->add_option("--snapshot-every", c.pde.snapshot_every, "write the field every k accepted steps");

  auto* bounds = app.add_subcommand("bounds", "blowup-time bounds T* and T*inf as JSON");
  bounds->add_option("--alpha", c.bounds.alpha)->check(kUnitAlpha);
  bounds->add_option("--p", c.bounds.p)->check(kPositive);
  bounds->add_option("--a-mean", c.bounds.a_mean)->check(kNonnegative);
  bounds->add_option("--a-min", c.bounds.a_min)->check(kNonnegative);
  bounds->add_option("--omega", c.bounds.omega)->check(kPositive);

  auto* sweep = app.add_subcommand("sweep", "parameter sweep of blowup time against T*");
  sweep->add_option("--param", c.sweep.param, "name:lo:hi:count with name alpha, p or a_mean");
  sweep->add_option("--alpha", c.sweep.alpha)->check(kUnitAlpha);
  sweep->add_option("--p", c.sweep.p)->check(kPositive);
  sweep->add_option("--a-mean", c.sweep.a_mean)->check(kPositive);
  sweep->add_option("--omega", c.sweep.omega)->check(kPositive);
  sweep->add_option("--engine", c.sweep.engine)->transform(CLI::CheckedTransformer(engine_map(true)));
  sweep->add_option("--n", c.sweep.n)->check(CLI::Range(std::size_t(2), std::size_t(1) << 20));
  sweep->add_option("--jobs", c.sweep.jobs, "worker threads (default $CAPUTO_BLOWUP_JOBS)")
      ->check(CLI::Range(1u, 1024u));
  sweep->add_option("--run-prefix", c.sweep.run_prefix, "write <prefix>_<index>_eta.csv per run");

  auto* verify = app.add_subcommand("verify", "run the acceptance criteria; exit 0 iff all pass");
  verify->add_option("--criteria", c.verify.criteria, "subset of 1..10")->check(CLI::Range(1, 10));
}

bool user_gave(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args)
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  return false;
}

std::string json_scalar(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return format_number(v.get<double>());
  throw UsageError("config: value of '" + key + "' must be a number or a string");
}

// Turns a JSON object into flags, skipping the ones the user passed explicitly.
std::vector<std::string> config_tokens(const nlohmann::json& cfg, const std::vector<std::string>& user) {
  std::vector<std::string> out;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "subcommand") continue;
    std::string flag = "--" + key;
    for (char& ch : flag)
      if (ch == '_') ch = '-';
    if (user_gave(user, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_array()) {
      out.push_back(flag);
      for (const auto& item : value) out.push_back(json_scalar(item, key));
    } else {
      out.push_back(flag);
      out.push_back(json_scalar(value, key));
    }
  }
  return out;
}

const char* kSubcommands[] = {"mlf", "fraccalc", "fode", "pde", "bounds", "sweep", "verify"};

bool is_subcommand(const std::string& s) {
  for (const char* name : kSubcommands)
    if (s == name) return true;
  return false;
}

unsigned default_jobs() {
  if (const char* env = std::getenv("CAPUTO_BLOWUP_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*env == '\0' || *end != '\0' || v < 1 || v > 1024)
      throw UsageError("CAPUTO_BLOWUP_JOBS must be an integer in [1, 1024], got '" + std::string(env) + "'");
    return unsigned(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void check_semantics(RunConfig& c) {
  if (c.subcommand == "mlf") {
    if (c.mlf.z.empty() && c.mlf.table.empty()) throw UsageError("mlf: give --z or --table");
    if (!c.mlf.table.empty() && !(c.mlf.table[2] >= 1.0 && c.mlf.table[2] == std::floor(c.mlf.table[2])))
      throw UsageError("mlf: --table count must be a positive integer");
  } else if (c.subcommand == "fraccalc") {
    if (c.fraccalc.op == "caputo" && !(c.fraccalc.alpha < 1.0))
      throw UsageError("fraccalc: --alpha must lie in (0, 1) for the Caputo derivative");
  } else if (c.subcommand == "pde") {
    if (c.pde.engine == Engine::fd && !(c.pde.alpha < 1.0))
      throw UsageError("pde: --alpha must lie in (0, 1) for the fd engine");
  } else if (c.subcommand == "sweep") {
    if (c.sweep.jobs == 0) c.sweep.jobs = default_jobs();
  }
}

// ---- pde helpers ------------------------------------------------------------

double parse_number(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw UsageError(what + ": '" + s + "' is not a number");
  return v;
}

std::vector<std::string> split_colon(const std::string& s, std::size_t max_parts) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (parts.size() + 1 < max_parts) {
    const auto pos = s.find(':', start);
    if (pos == std::string::npos) break;
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  parts.push_back(s.substr(start));
  return parts;
}

struct PdeSetup {
  Domain domain;
  std::size_t modes;
  Field a;
};

PdeSetup pde_setup(const PdeArgs& args) {
  const auto parts = split_colon(args.domain, 3);
  bool two_d = false;
  double lx = 1.0, ly = 1.0;
  if (parts[0] == "interval" && parts.size() == 2) {
    lx = parse_number(parts[1], "--domain");
  } else if ((parts[0] == "rect" || parts[0] == "rectangle") && parts.size() == 3) {
    two_d = true;
    lx = parse_number(parts[1], "--domain");
    ly = parse_number(parts[2], "--domain");
  } else {
    throw UsageError("--domain must be interval:L or rect:Lx:Ly, got '" + args.domain + "'");
  }
  if (!(lx > 0.0) || !(ly > 0.0)) throw UsageError("--domain: lengths must be positive");

  std::size_t modes = args.modes;
  std::size_t grid = args.grid;
  if (modes == 0) modes = grid ? grid / 2 : (two_d ? 12 : 32);
  if (grid == 0) grid = 2 * modes;
  if (modes == 0) throw UsageError("--modes must be positive");
  if (args.engine == Engine::spectral && grid < 2 * modes)
    throw UsageError("--grid must be at least twice --modes for the spectral engine");
  if (args.engine == Engine::fd && grid < 8) throw UsageError("--grid must be at least 8 for the fd engine");
  const Domain dom = two_d ? Domain::rectangle(lx, ly, grid, grid) : Domain::interval(lx, grid);

  const auto spec = split_colon(args.a, 2);
  std::optional<Field> a;
  if (spec[0] == "constant" && spec.size() == 2) {
    a = Field::constant(dom, parse_number(spec[1], "--a"));
  } else if (spec[0] == "cosine-bump") {
    const double amp = spec.size() == 2 ? parse_number(spec[1], "--a") : 0.5;
    a = Field::sample(dom, [&](double x, double y) {
      const double cy = two_d ? std::cos(kPi * y / ly) : 1.0;
      return 1.0 + amp * std::cos(kPi * x / lx) * cy;
    });
  } else if (spec[0] == "file" && spec.size() == 2) {
    a = read_field_csv(spec[1], dom);
  } else {
    throw UsageError("--a must be constant:c, cosine-bump[:amp] or file:path, got '" + args.a + "'");
  }
  if (a->min() < 0.0) throw UsageError("--a: the initial value must be nonnegative");
  if (!(args.cap > a->max_abs())) throw UsageError("--cap must exceed max |a|");
  return {dom, modes, *a};
}

// ---- output helpers ---------------------------------------------------------

void emit(const RunConfig& c, std::ostream& out, const std::string& text) {
  if (c.out.empty())
    out << text;
  else
    write_text_file(c.out, text);
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> v;
  for (std::size_t k = 0; k < count; ++k)
    v.push_back(count == 1 ? lo : lo + (hi - lo) * double(k) / double(count - 1));
  return v;
}

FodeProblem fode_problem(double alpha, double c0, double p, double y0, double horizon) {
  FodeProblem pr;
  pr.alpha = alpha;
  pr.y0 = y0;
  pr.rhs = PowerRhs{c0, p, {}};
  pr.horizon = horizon;
  return pr;
}

// ---- subcommands ------------------------------------------------------------

int run_mlf(const RunConfig& c, std::ostream& out) {
  std::vector<double> zs = c.mlf.z;
  if (!c.mlf.table.empty()) {
    const auto t = linspace(c.mlf.table[0], c.mlf.table[1], std::size_t(c.mlf.table[2]));
    zs.insert(zs.end(), t.begin(), t.end());
  }
  const MittagLeffler e({c.mlf.alpha, c.mlf.beta});
  std::vector<double> values;
  for (double z : zs) values.push_back(e(z));
  emit(c, out, CsvTable{{"z", "value"}, {zs, values}}.str());
  return kExitOk;
}

int run_fraccalc(const RunConfig& c, std::ostream& out) {
  const auto f = read_series_csv(c.fraccalc.input);
  const bool caputo = c.fraccalc.op == "caputo";
  const auto g = caputo ? caputo_l1(f, c.fraccalc.alpha) : rl_integral(f, c.fraccalc.alpha);
  emit(c, out, series_table(g, c.fraccalc.op).str());
  return kExitOk;
}

int run_fode(const RunConfig& c, std::ostream& out) {
  const auto& a = c.fode;
  const auto pr = fode_problem(a.alpha, a.c0, a.p, a.y0, a.horizon);
  const auto mesh = a.mesh == "uniform" ? TimeMesh::uniform(a.horizon, a.n)
                                        : TimeMesh::graded(a.horizon, a.n, TimeMesh::default_grading(a.alpha));
  FodeOptions opt;
  opt.scheme = a.scheme == "pc" ? FodeScheme::predictor_corrector : FodeScheme::implicit_l1;
  opt.cap = a.cap;
  const auto sol = solve_fode(pr, mesh, opt);
  emit(c, out, series_table(sol.y, "y").str());
  if (!a.report.empty()) {
    // w = c0^(1/(p-1)) y solves d^alpha (w - w0) = w^p, the form the bounds are stated for
    const double scale = a.p != 1.0 ? std::pow(a.c0, 1.0 / (a.p - 1.0)) : 1.0;
    std::vector<double> w(sol.y.values);
    for (double& v : w) v *= scale;
    const BoundInputs b{a.alpha, a.p, a.y0 * scale, a.y0 * scale, 1.0};
    const RunRecord rec{TimeSeries(sol.y.mesh, w, sol.y.blowup), sol.blowup, true};
    const nlohmann::json run{{"engine", "ode"},
                             {"scheme", to_string(opt.scheme)},
                             {"rescaling", scale},
                             {"blowup", to_json(sol.blowup)},
                             {"halvings", sol.halvings},
                             {"nodes", sol.y.size()},
                             {"t_end", sol.y.mesh.end()}};
    write_text_file(a.report, report_json(verify_theorem1(rec, b), config_json(c), run).dump(2) + "\n");
  }
  return kExitOk;
}

int run_pde(const RunConfig& c, std::ostream& out) {
  const auto& args = c.pde;
  const auto setup = pde_setup(args);
  const Domain& dom = setup.domain;
  const BoundInputs b{args.alpha, args.p, setup.a.integral() / dom.measure(), setup.a.min(), dom.measure()};
  const bool superlinear = args.reaction && args.p > 1.0 && b.a_mean > 0.0;
  const double horizon = args.horizon > 0.0 ? args.horizon : (superlinear ? 1.05 * t_star(b) : 10.0);
  const auto mesh = args.mesh == "uniform"
                        ? TimeMesh::uniform(horizon, args.n)
                        : TimeMesh::graded(horizon, args.n, TimeMesh::default_grading(args.alpha));

  FracProblem prob;
  prob.alpha = args.alpha;
  prob.p = args.p;
  prob.reaction = args.reaction;
  prob.cap = args.cap;
  const PdeOptions options{args.snapshot_every};
  const std::string prefix = c.out.empty() ? "run" : c.out;

  std::optional<PdeSolution> sol;
  if (args.engine == Engine::spectral)
    sol = solve_semilinear(prob, SpectralBasis(dom, setup.modes, setup.modes), setup.a, mesh, options);
  else
    sol = solve_fd(prob, setup.a, mesh, options);

  write_text_file(prefix + "_eta.csv", eta_table(*sol).str());
  nlohmann::json snapshots = nlohmann::json::array();
  if (args.snapshot_every > 0) {
    for (std::size_t k = 0; k < sol->snapshots.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "_u_%04zu.csv", k);
      write_text_file(prefix + name, field_table(sol->snapshots[k].u).str());
      snapshots.push_back({{"file", prefix + name}, {"t", sol->snapshots[k].t}});
    }
  }

  auto config = config_json(c);
  config["resolved"] = {{"T", horizon}, {"grid", dom.qx()}, {"modes", setup.modes}, {"domain", describe(dom)}};
  const nlohmann::json run{{"engine", to_string(args.engine)},
                           {"blowup", to_json(sol->blowup)},
                           {"halvings", sol->halvings},
                           {"max_picard_iterations", sol->max_picard_iterations},
                           {"nodes", sol->eta.size()},
                           {"t_end", sol->eta.mesh.end()},
                           {"snapshots", snapshots}};
  const auto report = verify_theorem1(RunRecord{sol->eta, sol->blowup, args.reaction}, b);
  write_text_file(prefix + "_report.json", report_json(report, config, run).dump(2) + "\n");
  out << "verdict " << to_string(report.verdict) << ": t_end " << format_number(sol->eta.mesh.end())
      << ", t_blow " << format_number(report.t_blow_numeric) << ", t_star " << format_number(report.t_star)
      << "\n";
  return kExitOk;
}

nlohmann::json null_if_nonfinite(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

int run_bounds(const RunConfig& c, std::ostream& out) {
  BoundInputs b{c.bounds.alpha, c.bounds.p, c.bounds.a_mean,
                std::isnan(c.bounds.a_min) ? c.bounds.a_mean : c.bounds.a_min, c.bounds.omega};
  b.validate();
  nlohmann::json j{{"version", kVersion},
                   {"alpha", b.alpha},
                   {"p", b.p},
                   {"a_mean", b.a_mean},
                   {"a_min", b.a_min},
                   {"omega", b.omega},
                   {"omega0", omega0(b.omega, b.p)},
                   {"t_star", nullptr},
                   {"t_star_inf", nullptr},
                   {"m_inf", nullptr},
                   {"min_m", nullptr}};
  if (b.p > 1.0) {
    j["min_m"] = min_m(b.p);
    if (b.a_mean > 0.0) j["t_star"] = null_if_nonfinite(t_star(b));
    if (b.a_min > 0.0) {
      const auto inf = t_star_inf(b);
      j["t_star_inf"] = null_if_nonfinite(inf.value);
      j["m_inf"] = inf.m;
    }
  }
  emit(c, out, j.dump(2) + "\n");
  return kExitOk;
}

SweepRow sweep_one(const SweepArgs& s, const BoundInputs& b, const std::string& eta_path) {
  const bool superlinear = b.p > 1.0;
  const double ts = superlinear ? t_star(b) : kInf;
  const double horizon = superlinear ? 1.05 * ts : 10.0;
  const auto mesh = TimeMesh::graded(horizon, s.n, TimeMesh::default_grading(b.alpha));
  RunRecord rec{TimeSeries(mesh, std::vector<double>(mesh.size(), 0.0)), {}, true};
  std::optional<CsvTable> table;
  if (s.engine == Engine::ode) {
    const auto sol = solve_fode(fode_problem(b.alpha, 1.0, b.p, b.a_mean, horizon), mesh);
    std::vector<double> eta(sol.y.values), linf(sol.y.values), l2(sol.y.values);
    for (std::size_t j = 0; j < eta.size(); ++j) {
      eta[j] *= b.omega;
      linf[j] = std::abs(linf[j]);
      l2[j] = std::abs(l2[j]) * std::sqrt(b.omega);
    }
    const auto nodes = sol.y.mesh.nodes();
    table = CsvTable{{"t", "eta", "linf", "l2"}, {std::vector<double>(nodes.begin(), nodes.end()), eta, linf, l2}};
    rec = RunRecord{TimeSeries(sol.y.mesh, eta, sol.y.blowup), sol.blowup, true};
  } else {
    const auto dom = Domain::interval(b.omega, 8);
    FracProblem prob;
    prob.alpha = b.alpha;
    prob.p = b.p;
    const auto a = Field::constant(dom, b.a_mean);
    const auto sol = s.engine == Engine::spectral ? solve_semilinear(prob, SpectralBasis(dom, 4), a, mesh)
                                                  : solve_fd(prob, a, mesh);
    table = eta_table(sol);
    rec = RunRecord{sol.eta, sol.blowup, true};
  }
  if (!eta_path.empty()) write_text_file(eta_path, table->str());
  const auto report = verify_theorem1(rec, b);
  SweepRow row{b.alpha, b.p, b.a_mean, ts, kNaN, report.t_blow_numeric, kNaN, to_string(report.verdict)};
  if (superlinear && b.a_min > 0.0) row.t_star_inf = t_star_inf(b).value;
  if (std::isfinite(ts) && std::isfinite(row.t_blow_numeric)) row.margin = (ts - row.t_blow_numeric) / ts;
  return row;
}

int run_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto& s = c.sweep;
  const auto parts = split_colon(s.param, 4);
  if (parts.size() != 4) throw UsageError("--param must be name:lo:hi:count, got '" + s.param + "'");
  std::string name = parts[0];
  if (name == "a-mean") name = "a_mean";
  if (name != "alpha" && name != "p" && name != "a_mean")
    throw UsageError("--param: unknown parameter '" + parts[0] + "' (alpha, p or a_mean)");
  const double lo = parse_number(parts[1], "--param");
  const double hi = parse_number(parts[2], "--param");
  const double count = parse_number(parts[3], "--param");
  if (!(count >= 1.0 && count == std::floor(count) && count <= 100000))
    throw UsageError("--param: count must be a positive integer");

  std::vector<BoundInputs> points;
  for (double v : linspace(lo, hi, std::size_t(count))) {
    BoundInputs b{s.alpha, s.p, s.a_mean, s.a_mean, s.omega};
    if (name == "alpha") b.alpha = v;
    if (name == "p") b.p = v;
    if (name == "a_mean") b.a_mean = b.a_min = v;
    if (!(b.alpha > 0.0 && b.alpha <= 1.0) || (s.engine != Engine::spectral && !(b.alpha < 1.0)))
      throw UsageError("--param: alpha value " + format_number(b.alpha) + " outside the range of the " +
                       to_string(s.engine) + " engine");
    if (!(b.p > 0.0)) throw UsageError("--param: p must be positive");
    if (!(b.a_mean > 0.0)) throw UsageError("--param: a_mean must be positive");
    points.push_back(b);
  }

  std::vector<SweepRow> rows(points.size());
  std::vector<std::string> errors(points.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k; (k = next++) < points.size();) {
      std::string eta_path;
      if (!s.run_prefix.empty()) {
        char suffix[32];
        std::snprintf(suffix, sizeof suffix, "_%04zu_eta.csv", k);
        eta_path = s.run_prefix + suffix;
      }
      try {
        rows[k] = sweep_one(s, points[k], eta_path);
      } catch (const Error& e) {
        const auto& b = points[k];
        rows[k] = SweepRow{b.alpha, b.p, b.a_mean, kNaN, kNaN, kNaN, kNaN, "error"};
        errors[k] = e.what();
      }
    }
  };
  const auto jobs = unsigned(std::min<std::size_t>(s.jobs ? s.jobs : 1, points.size()));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < jobs; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  emit(c, out, sweep_csv(rows));
  int status = kExitOk;
  for (std::size_t k = 0; k < errors.size(); ++k)
    if (!errors[k].empty()) {
      err << "sweep run " << k << ": " << errors[k] << "\n";
      status = kExitFailure;
    }
  return status;
}

int run_verify(const RunConfig& c, std::ostream& out) {
  AcceptanceOptions options;
  options.seed = c.seed;
  options.only = c.verify.criteria;
  const auto results = run_acceptance(options, [&](const CriterionResult& r) { out << format_result(r) << std::endl; });
  bool all = true;
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    j.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail}, {"seconds", r.seconds}});
  }
  if (!c.out.empty()) write_text_file(c.out, nlohmann::json{{"version", kVersion}, {"criteria", j}}.dump(2) + "\n");
  return all ? kExitOk : kExitFailure;
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig c;
  c.sweep.jobs = 0;
  std::string config_file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_file = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_file = args[i].substr(9);
  }

  std::vector<std::string> tokens = args;
  if (!config_file.empty()) {
    std::ifstream f(config_file);
    if (!f) throw UsageError("--config: cannot open " + config_file);
    nlohmann::json cfg;
    try {
      cfg = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("--config: " + config_file + " is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw UsageError("--config: top level must be an object");
    bool has_sub = false;
    for (const auto& a : args) has_sub = has_sub || is_subcommand(a);
    if (!has_sub && cfg.contains("subcommand")) tokens.insert(tokens.begin(), json_scalar(cfg["subcommand"], "subcommand"));
    const auto extra = config_tokens(cfg, args);
    tokens.insert(tokens.end(), extra.begin(), extra.end());
  }

  CLI::App app("fracblow: semilinear time-fractional diffusion, blowup bounds and verification", "fracblow");
  std::string ignored;
  build_app(app, c, ignored);
  try {
    std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::string text = app.help();
    for (const auto* sub : app.get_subcommands()) text = sub->help();
    throw HelpRequested{text};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  c.subcommand = app.get_subcommands().front()->get_name();
  check_semantics(c);
  return c;
}

nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json j{{"subcommand", c.subcommand}, {"seed", c.seed}, {"out", c.out}};
  const auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  if (c.subcommand == "mlf") {
    j["alpha"] = c.mlf.alpha;
    j["beta"] = c.mlf.beta;
    j["z"] = c.mlf.z;
    j["table"] = c.mlf.table;
  } else if (c.subcommand == "fraccalc") {
    j["op"] = c.fraccalc.op;
    j["alpha"] = c.fraccalc.alpha;
    j["in"] = c.fraccalc.input;
  } else if (c.subcommand == "fode") {
    const auto& a = c.fode;
    j.update({{"alpha", a.alpha}, {"p", a.p}, {"c0", a.c0}, {"y0", a.y0}, {"T", a.horizon}, {"n", a.n},
              {"scheme", a.scheme}, {"cap", a.cap}, {"mesh", a.mesh}, {"report", a.report}});
  } else if (c.subcommand == "pde") {
    const auto& a = c.pde;
    j.update({{"alpha", a.alpha}, {"p", a.p}, {"engine", to_string(a.engine)}, {"domain", a.domain},
              {"grid", a.grid}, {"modes", a.modes}, {"a", a.a}, {"T", a.horizon}, {"n", a.n}, {"mesh", a.mesh},
              {"cap", a.cap}, {"reaction", a.reaction}, {"snapshot_every", a.snapshot_every}});
  } else if (c.subcommand == "bounds") {
    const auto& a = c.bounds;
    j.update({{"alpha", a.alpha}, {"p", a.p}, {"a_mean", a.a_mean}, {"a_min", num(a.a_min)}, {"omega", a.omega}});
  } else if (c.subcommand == "sweep") {
    const auto& a = c.sweep;
    j.update({{"param", a.param}, {"alpha", a.alpha}, {"p", a.p}, {"a_mean", a.a_mean}, {"omega", a.omega},
              {"engine", to_string(a.engine)}, {"n", a.n}, {"jobs", a.jobs}, {"run_prefix", a.run_prefix}});
  } else if (c.subcommand == "verify") {
    j["criteria"] = c.verify.criteria;
  }
  return j;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.subcommand == "mlf") return run_mlf(c, out);
  if (c.subcommand == "fraccalc") return run_fraccalc(c, out);
  if (c.subcommand == "fode") return run_fode(c, out);
  if (c.subcommand == "pde") return run_pde(c, out);
  if (c.subcommand == "bounds") return run_bounds(c, out);
  if (c.subcommand == "sweep") return run_sweep(c, out, err);
  if (c.subcommand == "verify") return run_verify(c, out);
  throw UsageError("unknown subcommand '" + c.subcommand + "'");
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_config(args);
  } catch (const HelpRequested& h) {
    out << h.text;
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    return run(config, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace fracblow
