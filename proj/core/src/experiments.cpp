#include "hwave/experiments.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cerrno>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hwave/blowup_certificate.hpp"
#include "hwave/diagnostics.hpp"
#include "hwave/expr.hpp"
#include "hwave/geometry.hpp"
#include "hwave/grid_field.hpp"
#include "hwave/solver.hpp"
#include "hwave/threading.hpp"

namespace hwave {

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Formatting.  All CSV floats go through %.17g so byte-identical output is
// equivalent to bit-identical doubles.

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string numg(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::string join17(const std::vector<double>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ", ";
    out += num17(vs[i]);
  }
  return out;
}

void warn(const std::string& msg) { std::fprintf(stderr, "warning: %s\n", msg.c_str()); }

// ---------------------------------------------------------------------------
// File I/O helpers.

void write_file(const fs::path& path, const std::string& text) {
  FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw InvalidParameter("cannot open for writing: " + path.string());
  const std::size_t n = std::fwrite(text.data(), 1, text.size(), f);
  const int rc = std::fclose(f);
  if (n != text.size() || rc != 0) throw InvalidParameter("short write: " + path.string());
}

std::string read_file_text(const fs::path& path) {
  FILE* f = std::fopen(path.string().c_str(), "rb");
  if (!f) throw ConfigError("cannot open file: " + path.string());
  std::string out;
  char buf[65536];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
  const bool bad = std::ferror(f) != 0;
  std::fclose(f);
  if (bad) throw ConfigError("read error: " + path.string());
  return out;
}

fs::path resolve_input(const std::string& given, const fs::path& config_dir) {
  fs::path p(given);
  return p.is_absolute() ? p : config_dir / p;
}

// ---------------------------------------------------------------------------
// ConfigReader: typed access that records everything it reads (or defaults)
// into the resolved-config map and tracks which keys were consumed, so
// finish() can reject anything the experiment does not understand.

class ConfigReader {
 public:
  explicit ConfigReader(const IniConfig& cfg) : cfg_(cfg) {}

  const IniConfig& ini() const { return cfg_; }

  bool present(const std::string& sec, const std::string& key) const { return cfg_.has(sec, key); }

  int line(const std::string& sec, const std::string& key) const {
    const IniConfig::Entry* e = cfg_.find(sec, key);
    return e ? e->line : 0;
  }

  void mark(const std::string& sec, const std::string& key) { known_.insert({sec, key}); }

  void record(const std::string& sec, const std::string& key, const std::string& value) {
    resolved_[sec][key] = value;
  }

  std::string str(const std::string& sec, const std::string& key) {
    mark(sec, key);
    std::string v = cfg_.get_string(sec, key);
    record(sec, key, v);
    return v;
  }

  std::string str_or(const std::string& sec, const std::string& key, const std::string& def) {
    mark(sec, key);
    std::string v = present(sec, key) ? cfg_.get_string(sec, key) : def;
    record(sec, key, v);
    return v;
  }

  double num(const std::string& sec, const std::string& key) {
    mark(sec, key);
    const double v = cfg_.get_double(sec, key);
    record(sec, key, num17(v));
    return v;
  }

  double num_or(const std::string& sec, const std::string& key, double def) {
    mark(sec, key);
    const double v = present(sec, key) ? cfg_.get_double(sec, key) : def;
    record(sec, key, num17(v));
    return v;
  }

  long integer(const std::string& sec, const std::string& key) {
    mark(sec, key);
    const long v = cfg_.get_long(sec, key);
    record(sec, key, std::to_string(v));
    return v;
  }

  long integer_or(const std::string& sec, const std::string& key, long def) {
    mark(sec, key);
    const long v = present(sec, key) ? cfg_.get_long(sec, key) : def;
    record(sec, key, std::to_string(v));
    return v;
  }

  std::vector<double> list(const std::string& sec, const std::string& key) {
    mark(sec, key);
    std::vector<double> v = cfg_.get_double_list(sec, key);
    record(sec, key, join17(v));
    return v;
  }

  std::vector<double> list_or(const std::string& sec, const std::string& key,
                              const std::vector<double>& def) {
    mark(sec, key);
    if (!present(sec, key)) {
      // An empty value cannot be round-tripped through the strict parser, so
      // an absent list with an empty default stays absent.
      if (!def.empty()) record(sec, key, join17(def));
      return def;
    }
    std::vector<double> v = cfg_.get_double_list(sec, key);
    record(sec, key, join17(v));
    return v;
  }

  void finish() const {
    for (const auto& e : cfg_.entries()) {
      if (!known_.count({e.section, e.key})) {
        throw ConfigError("unrecognized or unused key '" + e.key + "' in [" + e.section +
                              "] (line " + std::to_string(e.line) + ")",
                          e.line, e.key);
      }
    }
  }

  const std::map<std::string, std::map<std::string, std::string>>& resolved() const {
    return resolved_;
  }

 private:
  const IniConfig& cfg_;
  std::set<std::pair<std::string, std::string>> known_;
  std::map<std::string, std::map<std::string, std::string>> resolved_;
};

std::string canonical_text(
    const std::map<std::string, std::map<std::string, std::string>>& resolved) {
  std::string out;
  for (const auto& [sec, kvs] : resolved) {
    out += "[" + sec + "]\n";
    for (const auto& [k, v] : kvs) out += k + " = " + v + "\n";
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Section parsers.

GridSpec read_grid(ConfigReader& r, int n) {
  if (n != 1) throw UnsupportedGrid("grid-based experiments require n = 1");
  GridSpec g;
  g.n = n;
  const std::vector<double> hw = r.list("grid", "half_widths");
  const std::vector<double> pts = r.list("grid", "points");
  const std::string b = r.str_or("grid", "boundary", "dirichlet_zero");
  if (hw.size() != 3)
    throw ConfigError("half_widths needs exactly 3 entries", r.line("grid", "half_widths"),
                      "half_widths");
  if (pts.size() != 3)
    throw ConfigError("points needs exactly 3 entries", r.line("grid", "points"), "points");
  for (int a = 0; a < 3; ++a) {
    g.half_widths[a] = hw[a];
    const double rounded = std::nearbyint(pts[a]);
    if (!(pts[a] == rounded) || rounded < 1.0 || rounded > 1e9)
      throw ConfigError("points entries must be positive integers", r.line("grid", "points"),
                        "points");
    g.points[a] = static_cast<int>(rounded);
  }
  if (b == "dirichlet_zero")
    g.boundary = Boundary::dirichlet_zero;
  else if (b == "periodic")
    g.boundary = Boundary::periodic;
  else
    throw ConfigError("boundary must be dirichlet_zero or periodic", r.line("grid", "boundary"),
                      "boundary");
  g.validate();
  return g;
}

enum class PKey { forbidden, optional_key, required };

SolverConfig read_solver(ConfigReader& r, const GridSpec& grid, PKey pkey,
                         const char* forbidden_reason = "") {
  SolverConfig c;
  if (pkey == PKey::forbidden) {
    if (r.present("solver", "p"))
      throw ConfigError(std::string("remove p from [solver]: ") + forbidden_reason,
                        r.line("solver", "p"), "p");
    r.mark("solver", "p");
  } else if (r.present("solver", "p")) {
    c.p = r.num("solver", "p");
  } else if (pkey == PKey::required) {
    throw ConfigError("this experiment needs p in [solver]", 0, "p");
  } else {
    r.mark("solver", "p");
  }
  c.t_end = r.num("solver", "t_end");
  c.cfl_fraction = r.num_or("solver", "cfl_fraction", 0.9);
  c.blowup_threshold = r.num_or("solver", "blowup_threshold", 1e6);
  c.record_every = r.integer_or("solver", "record_every", 1);
  r.mark("solver", "dt");
  const std::string dt_text =
      r.present("solver", "dt") ? r.ini().get_string("solver", "dt") : "auto";
  if (dt_text != "auto") c.dt = r.ini().get_double("solver", "dt");
  c.validate();
  c.dt = resolve_dt(grid, c);  // materialized so the resolved config reruns identically
  r.record("solver", "dt", num17(*c.dt));
  return c;
}

struct DataSpec {
  std::string kind;
  double amplitude = 1.0;
  std::array<double, 3> center{0.0, 0.0, 0.0};
  double width = 1.0;
  std::string u1_mode = "same";  // empty when expression_u1 drives u1
  std::string expr_u0, expr_u1;
};

DataSpec read_data(ConfigReader& r, bool allow_amplitude) {
  DataSpec d;
  d.kind = r.str("data", "kind");
  if (d.kind != "gaussian_weight" && d.kind != "plateau_bump" && d.kind != "custom_expression")
    throw ConfigError("kind must be gaussian_weight, plateau_bump or custom_expression",
                      r.line("data", "kind"), "kind");
  if (allow_amplitude) {
    d.amplitude = r.num_or("data", "amplitude", 1.0);
    if (!std::isfinite(d.amplitude))
      throw ConfigError("amplitude must be finite", r.line("data", "amplitude"), "amplitude");
  } else if (r.present("data", "amplitude")) {
    throw ConfigError("amplitude is set per sweep cell; remove it from [data]",
                      r.line("data", "amplitude"), "amplitude");
  } else {
    r.mark("data", "amplitude");
  }
  const std::vector<double> c = r.list_or("data", "center", {0.0, 0.0, 0.0});
  if (c.size() != 3)
    throw ConfigError("center needs exactly 3 entries", r.line("data", "center"), "center");
  d.center = {c[0], c[1], c[2]};
  d.width = r.num_or("data", "width", 1.0);
  if (!(d.width > 0.0) || !std::isfinite(d.width))
    throw ConfigError("width must be positive", r.line("data", "width"), "width");
  if (d.kind == "custom_expression") {
    d.expr_u0 = r.str("data", "expression_u0");
    if (r.present("data", "expression_u1")) {
      if (r.present("data", "u1_mode"))
        throw ConfigError("expression_u1 and u1_mode are mutually exclusive",
                          r.line("data", "u1_mode"), "u1_mode");
      d.expr_u1 = r.str("data", "expression_u1");
      d.u1_mode.clear();
      return d;
    }
  }
  d.u1_mode = r.str_or("data", "u1_mode", "same");
  if (d.u1_mode != "same" && d.u1_mode != "zero")
    throw ConfigError("u1_mode must be same or zero", r.line("data", "u1_mode"), "u1_mode");
  return d;
}

std::pair<Field, Field> make_initial_data(const GridSpec& grid, const DataSpec& d) {
  const double A = d.amplitude, w = d.width;
  const double cx = d.center[0], cy = d.center[1], ct = d.center[2];
  std::function<double(double, double, double)> f0;
  if (d.kind == "gaussian_weight") {
    f0 = [=](double x, double y, double tau) {
      const double a = (x - cx) / w, b = (y - cy) / w, s = (tau - ct) / (w * w);
      return A * std::exp(-2.0 * (a * a + b * b + 4.0 * std::abs(s)) / 8.0);
    };
  } else if (d.kind == "plateau_bump") {
    // The audit exponent does not change the transition shape; 1.5 is arbitrary.
    auto prof = std::make_shared<BumpProfile>(1.5);
    f0 = [=](double x, double y, double tau) {
      return A * prof->alpha((x - cx) / w) * prof->alpha((y - cy) / w) *
             prof->beta((tau - ct) / (w * w));
    };
  } else {
    auto e0 = std::make_shared<Expression>(
        Expression::parse(d.expr_u0, {"x", "y", "tau"}));
    f0 = [=](double x, double y, double tau) {
      const double args[3] = {x, y, tau};
      return A * e0->evaluate(args);
    };
  }
  Field u0 = sample(grid, f0);
  if (!d.expr_u1.empty()) {
    Expression e1 = Expression::parse(d.expr_u1, {"x", "y", "tau"});
    Field u1 = sample(grid, [&](double x, double y, double tau) {
      const double args[3] = {x, y, tau};
      return A * e1.evaluate(args);
    });
    return {std::move(u0), std::move(u1)};
  }
  if (d.u1_mode == "zero") return {std::move(u0), Field(grid)};
  Field u1 = u0;
  return {std::move(u0), std::move(u1)};
}

/// Domain-size guidance: waves travel at unit speed in x and y, and at up to
/// r_max/2 in tau (the tau coefficients grow with the horizontal radius), so
/// a run whose horizon lets the data support reach the boundary will see
/// reflections in its late-time rows.
void box_guidance_warnings(const GridSpec& grid, const DataSpec& d, double t_end) {
  double sx, sy, st;
  if (d.kind == "gaussian_weight") {
    sx = std::abs(d.center[0]) + 6.0 * d.width;
    sy = std::abs(d.center[1]) + 6.0 * d.width;
    st = std::abs(d.center[2]) + 9.0 * d.width * d.width;
  } else if (d.kind == "plateau_bump") {
    sx = std::abs(d.center[0]) + d.width;
    sy = std::abs(d.center[1]) + d.width;
    st = std::abs(d.center[2]) + d.width * d.width;
  } else {
    return;  // unknown support
  }
  if (sx + t_end > grid.half_widths[0])
    warn("x half-width " + numg(grid.half_widths[0]) +
         " is inside the unit-speed reach of the data by t_end; boundary effects will "
         "contaminate late rows");
  if (sy + t_end > grid.half_widths[1])
    warn("y half-width " + numg(grid.half_widths[1]) +
         " is inside the unit-speed reach of the data by t_end; boundary effects will "
         "contaminate late rows");
  const double r_max = std::hypot(grid.half_widths[0], grid.half_widths[1]);
  if (st + 0.5 * r_max * t_end > grid.half_widths[2])
    warn("tau half-width " + numg(grid.half_widths[2]) +
         " is inside the tau-direction reach (r_max/2 * t_end) of the data; boundary "
         "effects will contaminate late rows");
}

void require_solver_grade(const GridSpec& grid) {
  if (!grid.solver_grade())
    throw UnsupportedGrid("grid is not solver-grade (n = 1 and at least 5 points per axis)");
}

// ---------------------------------------------------------------------------
// Time-series CSV.

constexpr const char* kSeriesHeader =
    "t,l2_u,l2_grad_u,l2_ut,linf_u,energy,weighted_energy,boundary_mass";

std::string series_csv_text(const TimeSeries& series) {
  std::string out = kSeriesHeader;
  out += '\n';
  for (const TimeSeriesRow& r : series.rows) {
    out += num17(r.t);
    out += ',';
    out += num17(r.l2_u);
    out += ',';
    out += num17(r.l2_grad_u);
    out += ',';
    out += num17(r.l2_ut);
    out += ',';
    out += num17(r.linf_u);
    out += ',';
    out += num17(r.energy);
    out += ',';
    out += num17(r.weighted_energy);
    out += ',';
    out += num17(r.boundary_mass);
    out += '\n';
  }
  return out;
}

double parse_csv_cell(const std::string& s, int line, const fs::path& path) {
  const char* c = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(c, &end);
  while (end && *end != '\0' && std::isspace(static_cast<unsigned char>(*end))) ++end;
  if (end == c || *end != '\0')
    throw ConfigError("series file " + path.string() + " line " + std::to_string(line) +
                          ": bad number '" + s + "'",
                      line);
  return v;
}

TimeSeries read_series_csv(const fs::path& path) {
  const std::string text = read_file_text(path);
  TimeSeries series;
  std::size_t pos = 0;
  int line_no = 0;
  bool saw_header = false;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != kSeriesHeader)
        throw ConfigError("series file " + path.string() + ": unexpected header", 1);
      saw_header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        cells.push_back(line.substr(start));
        break;
      }
      cells.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (cells.size() != 8)
      throw ConfigError("series file " + path.string() + " line " + std::to_string(line_no) +
                            ": expected 8 columns",
                        line_no);
    TimeSeriesRow row;
    row.t = parse_csv_cell(cells[0], line_no, path);
    row.l2_u = parse_csv_cell(cells[1], line_no, path);
    row.l2_grad_u = parse_csv_cell(cells[2], line_no, path);
    row.l2_ut = parse_csv_cell(cells[3], line_no, path);
    row.linf_u = parse_csv_cell(cells[4], line_no, path);
    row.energy = parse_csv_cell(cells[5], line_no, path);
    row.weighted_energy = parse_csv_cell(cells[6], line_no, path);
    row.boundary_mass = parse_csv_cell(cells[7], line_no, path);
    series.rows.push_back(row);
  }
  if (!saw_header || series.rows.empty())
    throw ConfigError("series file " + path.string() + ": no data rows");
  return series;
}

// ---------------------------------------------------------------------------
// Report plumbing.

struct CmdCtx {
  fs::path out_dir;
  fs::path config_dir;
  std::uint64_t seed = 0;
  HeisenbergParams params;
};

const char* status_text(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::blew_up: return "blew_up";
    default: return "numeric_failure";
  }
}

void put_metric(ExperimentReport& rep, const std::string& name, double v) {
  if (std::isfinite(v)) rep.metrics[name] = v;
}

void add_check(ExperimentReport& rep, const std::string& name, bool pass,
               const std::string& detail) {
  rep.checks.push_back({name, pass, detail});
}

void finish_report(ExperimentReport& rep, const fs::path& out_dir) {
  json j;
  j["experiment"] = rep.experiment;
  j["config_hash"] = rep.config_hash;
  json rc = json::object();
  for (const auto& [sec, kvs] : rep.resolved_config) {
    json s = json::object();
    for (const auto& [k, v] : kvs) s[k] = v;
    rc[sec] = s;
  }
  j["resolved_config"] = rc;
  json m = json::object();
  for (const auto& [k, v] : rep.metrics) m[k] = v;
  j["metrics"] = m;
  json cs = json::array();
  for (const ExperimentReport::Check& c : rep.checks)
    cs.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["checks"] = cs;
  j["status"] = rep.status;
  rep.report_hash = hex64(fnv1a64(j.dump(2)));
  j["report_hash"] = rep.report_hash;
  write_file(out_dir / "report.json", j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// simulate

ExperimentReport cmd_simulate(ConfigReader& r, const CmdCtx& ctx) {
  ExperimentReport rep;
  const GridSpec grid = read_grid(r, ctx.params.n);
  const SolverConfig scfg = read_solver(r, grid, PKey::optional_key);
  std::vector<double> snap_times = r.list_or("solver", "snapshot_times", {});
  std::sort(snap_times.begin(), snap_times.end());
  if (!snap_times.empty() && snap_times.front() < 0.0)
    throw ConfigError("snapshot_times must be nonnegative", r.line("solver", "snapshot_times"),
                      "snapshot_times");
  const DataSpec data = read_data(r, true);
  r.finish();
  require_solver_grade(grid);
  box_guidance_warnings(grid, data, scfg.t_end);

  auto [u0, u1] = make_initial_data(grid, data);
  DataNorm dn;
  bool have_dn = true;
  try {
    dn = data_norm_A(u0, u1);
  } catch (const NumericError&) {
    have_dn = false;  // weight overflow on extreme data; the metric is optional
  }

  std::size_t next_snap = 0;
  long written = 0;
  StepObserver observer;
  if (!snap_times.empty()) {
    const double dt = *scfg.dt;
    observer = [&, dt](long, double t, const Field& u) {
      while (next_snap < snap_times.size() && t >= snap_times[next_snap] - 0.5 * dt) {
        char name[32];
        std::snprintf(name, sizeof name, "snap_%04ld.hwav", written);
        write_snapshot((ctx.out_dir / name).string(), u, t);
        ++written;
        ++next_snap;
      }
    };
  }

  const RunOutcome outcome = run(u0, u1, scfg, observer);
  write_file(ctx.out_dir / "series.csv", series_csv_text(outcome.series));
  if (next_snap < snap_times.size())
    warn(std::to_string(snap_times.size() - next_snap) +
         " snapshot time(s) beyond the reached horizon were skipped");

  rep.status = status_text(outcome.status);
  put_metric(rep, "dt", *scfg.dt);
  put_metric(rep, "cfl_limit", cfl_limit(grid));
  put_metric(rep, "rows", static_cast<double>(outcome.series.rows.size()));
  put_metric(rep, "snapshots_written", static_cast<double>(written));
  if (have_dn) {
    put_metric(rep, "a_norm", dn.a_norm);
    put_metric(rep, "i0", dn.i0);
  }
  if (!outcome.series.rows.empty()) {
    put_metric(rep, "initial_l2_u", outcome.series.rows.front().l2_u);
    put_metric(rep, "final_t", outcome.series.rows.back().t);
    put_metric(rep, "final_l2_u", outcome.series.rows.back().l2_u);
    put_metric(rep, "final_linf_u", outcome.series.rows.back().linf_u);
  }
  if (outcome.t_blowup) put_metric(rep, "t_blowup", *outcome.t_blowup);
  return rep;
}

// ---------------------------------------------------------------------------
// decay

ExperimentReport cmd_decay(ConfigReader& r, const CmdCtx& ctx) {
  ExperimentReport rep;
  const double fit_lo = r.num("experiment", "fit_lo");
  const double fit_hi = r.num("experiment", "fit_hi");
  const double slope_tol = r.num_or("experiment", "slope_tol", 0.25);
  const double r2_min = r.num_or("experiment", "r2_min", 0.98);

  TimeSeries series;
  if (r.present("experiment", "series_csv")) {
    const std::string given = r.str("experiment", "series_csv");
    const fs::path path = resolve_input(given, ctx.config_dir);
    r.record("experiment", "series_csv", fs::absolute(path).lexically_normal().string());
    r.finish();
    series = read_series_csv(path);
  } else {
    const GridSpec grid = read_grid(r, ctx.params.n);
    const SolverConfig scfg =
        read_solver(r, grid, PKey::forbidden, "decay fits the linear equation");
    const DataSpec data = read_data(r, true);
    r.finish();
    require_solver_grade(grid);
    box_guidance_warnings(grid, data, scfg.t_end);
    auto [u0, u1] = make_initial_data(grid, data);
    const RunOutcome outcome = run(u0, u1, scfg);
    write_file(ctx.out_dir / "series.csv", series_csv_text(outcome.series));
    if (outcome.status != RunStatus::completed) {
      rep.status = status_text(outcome.status);
      add_check(rep, "run_completed", false,
                std::string("linear run ended with status ") + rep.status);
      return rep;
    }
    series = outcome.series;
  }

  if (fit_lo < 1.0)
    warn("fit window starts before t = 1: transient-dominated fit, slopes reflect the data "
         "shape rather than the asymptotic regime");

  const double Q = static_cast<double>(ctx.params.Q);
  const struct {
    const char* column;
    double target;
  } lines[3] = {
      {"l2_u", -Q / 4.0},
      {"l2_grad_u", -(Q / 4.0 + 0.5)},
      {"l2_ut", -(Q / 4.0 + 1.0)},
  };

  std::string csv = "column,window_lo,window_hi,slope,r2,target_slope\n";
  bool all_pass = true;
  for (const auto& ln : lines) {
    const DecayFit fit = fit_decay(series, ln.column, {fit_lo, fit_hi});
    csv += std::string(ln.column) + "," + num17(fit_lo) + "," + num17(fit_hi) + "," +
           num17(fit.slope) + "," + num17(fit.r_squared) + "," + num17(ln.target) + "\n";
    const bool ok = std::abs(fit.slope - ln.target) <= slope_tol && fit.r_squared >= r2_min;
    all_pass = all_pass && ok;
    add_check(rep, std::string("slope_") + ln.column, ok,
              "slope " + num17(fit.slope) + " vs target " + numg(ln.target) + " (tol " +
                  numg(slope_tol) + "), r2 " + num17(fit.r_squared));
    put_metric(rep, std::string("slope_") + ln.column, fit.slope);
    put_metric(rep, std::string("r2_") + ln.column, fit.r_squared);
  }
  write_file(ctx.out_dir / "fits.csv", csv);

  // Domain-truncation gate: boundary mass above 1e-3 of the initial L2 norm
  // anywhere in the series invalidates the fit (the box was too small).
  const double l2_0 = series.rows.front().l2_u;
  double bm_max = 0.0;
  for (const TimeSeriesRow& row : series.rows) bm_max = std::max(bm_max, row.boundary_mass);
  const double gate = 1e-3 * l2_0;
  const bool quiet = bm_max <= gate;
  add_check(rep, "boundary_quiet", quiet,
            "max boundary_mass " + num17(bm_max) + " vs gate " + num17(gate));
  put_metric(rep, "boundary_mass_max", bm_max);
  put_metric(rep, "initial_l2_u", l2_0);
  put_metric(rep, "rows", static_cast<double>(series.rows.size()));

  rep.status = !quiet ? "invalid" : (all_pass ? "pass" : "fail");
  return rep;
}

// ---------------------------------------------------------------------------
// sweep

ExperimentReport cmd_sweep(ConfigReader& r, const CmdCtx& ctx) {
  ExperimentReport rep;
  std::vector<double> p_blowup, p_global;
  double amp_blowup = 0.0, amp_global = 0.0;
  if (r.present("experiment", "p_blowup")) {
    p_blowup = r.list("experiment", "p_blowup");
    amp_blowup = r.num("experiment", "amplitude_blowup");
  }
  if (r.present("experiment", "p_global")) {
    p_global = r.list("experiment", "p_global");
    amp_global = r.num("experiment", "amplitude_global");
  }
  if (p_blowup.empty() && p_global.empty())
    throw ConfigError("sweep needs p_blowup and/or p_global in [experiment]",
                      r.line("experiment", "name"), "name");

  const GridSpec grid = read_grid(r, ctx.params.n);
  const SolverConfig base = read_solver(r, grid, PKey::forbidden, "sweep sets p per cell");
  const DataSpec data = read_data(r, /*allow_amplitude=*/false);
  r.finish();
  require_solver_grade(grid);
  box_guidance_warnings(grid, data, base.t_end);

  const double p_gn = ctx.params.p_gn.value();
  const double p_f = ctx.params.p_fujita.value();

  struct Cell {
    double p, amplitude;
    bool global_side;
  };
  std::vector<Cell> cells;
  for (double p : p_blowup) cells.push_back({p, amp_blowup, false});
  for (double p : p_global) cells.push_back({p, amp_global, true});

  std::string csv = "p,amplitude,status,t_blowup,final_l2_u\n";
  bool any_numeric_failure = false;
  bool blowup_ok = true, global_ok = true;
  std::string blowup_detail, global_detail;
  std::optional<double> bracket_lo, bracket_hi;

  // Cells run one after another; each one is internally data-parallel, and a
  // serial outer loop keeps the CSV order and the reductions identical across
  // thread counts.
  for (const Cell& cell : cells) {
    if (cell.p > p_gn)
      warn("p = " + numg(cell.p) + " exceeds p_gn = " + numg(p_gn) +
           ", outside the small-data global theory; running anyway");
    DataSpec d = data;
    d.amplitude = cell.amplitude;
    auto [u0, u1] = make_initial_data(grid, d);
    SolverConfig scfg = base;
    scfg.p = cell.p;
    const RunOutcome outcome = run(u0, u1, scfg);

    const double initial_l2 =
        outcome.series.rows.empty() ? 0.0 : outcome.series.rows.front().l2_u;
    const double final_l2 =
        outcome.series.rows.empty() ? 0.0 : outcome.series.rows.back().l2_u;
    csv += num17(cell.p) + "," + num17(cell.amplitude) + "," + status_text(outcome.status) +
           "," + (outcome.t_blowup ? num17(*outcome.t_blowup) : std::string()) + "," +
           num17(final_l2) + "\n";

    any_numeric_failure = any_numeric_failure || outcome.status == RunStatus::numeric_failure;
    const std::string tag = "p=" + numg(cell.p) + ": " + status_text(outcome.status);
    if (!cell.global_side) {
      const bool ok = outcome.status == RunStatus::blew_up;
      blowup_ok = blowup_ok && ok;
      if (ok) bracket_lo = std::max(bracket_lo.value_or(cell.p), cell.p);
      blowup_detail += (blowup_detail.empty() ? "" : "; ") + tag +
                       (outcome.t_blowup ? " at t=" + numg(*outcome.t_blowup) : "");
      put_metric(rep, "initial_l2_u_blowup", initial_l2);
    } else {
      const bool ok = outcome.status == RunStatus::completed && final_l2 < initial_l2;
      global_ok = global_ok && ok;
      if (outcome.status == RunStatus::completed)
        bracket_hi = std::min(bracket_hi.value_or(cell.p), cell.p);
      global_detail += (global_detail.empty() ? "" : "; ") + tag + ", final l2 " +
                       numg(final_l2) + " vs initial " + numg(initial_l2);
      put_metric(rep, "initial_l2_u_global", initial_l2);
    }
  }
  write_file(ctx.out_dir / "sweep.csv", csv);

  bool all_pass = true;
  if (!p_blowup.empty()) {
    add_check(rep, "blowup_cells", blowup_ok, blowup_detail);
    all_pass = all_pass && blowup_ok;
  }
  if (!p_global.empty()) {
    add_check(rep, "global_cells", global_ok, global_detail);
    all_pass = all_pass && global_ok;
  }
  if (bracket_lo) put_metric(rep, "bracket_lo", *bracket_lo);
  if (bracket_hi) put_metric(rep, "bracket_hi", *bracket_hi);
  if (!p_blowup.empty() && !p_global.empty()) {
    const bool contains =
        bracket_lo && bracket_hi && *bracket_lo <= p_f && p_f <= *bracket_hi;
    add_check(rep, "bracket_contains_p_fujita", contains,
              std::string("bracket [") + (bracket_lo ? numg(*bracket_lo) : "-") + ", " +
                  (bracket_hi ? numg(*bracket_hi) : "-") + "] vs p_fujita " + numg(p_f));
    all_pass = all_pass && contains;
  }
  put_metric(rep, "cells", static_cast<double>(cells.size()));
  rep.status = any_numeric_failure ? "numeric_failure" : (all_pass ? "pass" : "fail");
  return rep;
}

// ---------------------------------------------------------------------------
// inequality

ExperimentReport ineq_gaussian(ConfigReader& r, const CmdCtx& ctx, const GridSpec& grid) {
  ExperimentReport rep;
  const std::vector<double> sigmas = r.list_or("experiment", "sigmas", {1.0, 2.0});
  const std::vector<double> times = r.list_or("experiment", "times", {0.0, 1.0});
  const double tol = r.num_or("experiment", "tol", 0.01);
  r.finish();

  std::string csv = "sigma,t,exact,simpson,rectangle,rel_error,pass\n";
  double max_rel = 0.0;
  bool all = true;
  for (double sigma : sigmas) {
    for (double t : times) {
      const double exact = gaussian_weight_integral_exact(sigma, t, ctx.params);
      const GaussianQuadrature q = gaussian_weight_quadrature(grid, sigma, t);
      const double rel = std::abs(q.value - exact) / exact;
      const bool ok = rel <= tol;
      all = all && ok;
      max_rel = std::max(max_rel, rel);
      csv += num17(sigma) + "," + num17(t) + "," + num17(exact) + "," + num17(q.value) + "," +
             num17(q.rectangle_value) + "," + num17(rel) + "," + (ok ? "1" : "0") + "\n";
      add_check(rep, "gaussian sigma=" + numg(sigma) + " t=" + numg(t), ok,
                "quadrature " + num17(q.value) + " vs exact " + num17(exact) +
                    ", rel_error " + numg(rel));
    }
  }
  write_file(ctx.out_dir / "inequality.csv", csv);
  put_metric(rep, "max_rel_error", max_rel);
  rep.status = all ? "pass" : "fail";
  return rep;
}

ExperimentReport ineq_gn(ConfigReader& r, const CmdCtx& ctx, const GridSpec& grid) {
  ExperimentReport rep;
  const double q = r.num_or("experiment", "q", 3.0);
  const std::vector<double> a_values = r.list_or("experiment", "a_values", {1.5, 2.0, 3.0});
  const double scale = r.num_or("experiment", "scale", 7.3);
  const double tol = r.num_or("experiment", "tol", 1e-10);
  r.finish();
  require_solver_grade(grid);

  std::string csv = "a,q,ratio,ratio_scaled,invariance_error,pass\n";
  bool all = true;
  double max_err = 0.0;
  for (double a : a_values) {
    const Field v = sample(grid, [a](double x, double y, double tau) {
      return std::exp(-a * (x * x + y * y + 4.0 * std::abs(tau)) / 8.0);
    });
    Field w = v;
    for (double& val : w.values) val *= scale;
    const double ratio = gn_ratio(v, q, ctx.params);
    const double ratio_scaled = gn_ratio(w, q, ctx.params);
    const double err = std::abs(ratio_scaled - ratio) / ratio;
    const bool ok = err <= tol;
    all = all && ok;
    max_err = std::max(max_err, err);
    csv += num17(a) + "," + num17(q) + "," + num17(ratio) + "," + num17(ratio_scaled) + "," +
           num17(err) + "," + (ok ? "1" : "0") + "\n";
    add_check(rep, "gn_scale_invariance a=" + numg(a), ok,
              "ratio " + num17(ratio) + ", scaled " + num17(ratio_scaled) + ", rel err " +
                  numg(err));
  }
  write_file(ctx.out_dir / "inequality.csv", csv);
  put_metric(rep, "max_invariance_error", max_err);
  rep.status = all ? "pass" : "fail";
  return rep;
}

ExperimentReport ineq_weighted_gn(ConfigReader& r, const CmdCtx& ctx, const GridSpec& grid) {
  ExperimentReport rep;
  const double q = r.num_or("experiment", "q", 3.0);
  const double sigma = r.num_or("experiment", "sigma", 1.0);
  const double t = r.num_or("experiment", "t", 0.0);
  const double tol = r.num_or("experiment", "tol", 5e-2);
  const std::vector<double> a_values = r.list_or(
      "experiment", "a_values", {1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0, 3.25});
  r.finish();
  require_solver_grade(grid);

  // Cutoff keeps every family member compactly supported away from the
  // boundary, as the weighted estimates assume.
  const BumpProfile prof(2.0);
  const double Lx = 0.8 * grid.half_widths[0];
  const double Ly = 0.8 * grid.half_widths[1];
  const double Lt = 0.8 * grid.half_widths[2];

  std::string csv = "a,sigma,t,q,lhs_42,rhs_42,holds_42,lhs_43,rhs_43,constant_43\n";
  bool all_42 = true;
  double c_min = std::numeric_limits<double>::infinity();
  double c_max = 0.0;
  bool c_ok = true;
  for (double a : a_values) {
    const Field v = sample(grid, [&](double x, double y, double tau) {
      const double core = std::exp(-a * (x * x + y * y + 4.0 * std::abs(tau)) / 8.0);
      return core * prof.alpha(x / Lx) * prof.alpha(y / Ly) * prof.beta(tau / Lt);
    });
    const WeightedGnReport wg = weighted_gn_check(v, sigma, t, q, ctx.params, tol);
    all_42 = all_42 && wg.holds_42;
    c_ok = c_ok && wg.holds_43;
    if (std::isfinite(wg.constant_43) && wg.constant_43 > 0.0) {
      c_min = std::min(c_min, wg.constant_43);
      c_max = std::max(c_max, wg.constant_43);
    }
    csv += num17(a) + "," + num17(sigma) + "," + num17(t) + "," + num17(q) + "," +
           num17(wg.lhs_lemma42) + "," + num17(wg.rhs_lemma42) + "," +
           (wg.holds_42 ? "1" : "0") + "," + num17(wg.lhs_lemma43) + "," +
           num17(wg.rhs_lemma43) + "," + num17(wg.constant_43) + "\n";
    add_check(rep, "weighted_gn_42 a=" + numg(a), wg.holds_42,
              "lhs " + num17(wg.lhs_lemma42) + " vs rhs " + num17(wg.rhs_lemma42) + " (tol " +
                  numg(tol) + ")");
  }
  write_file(ctx.out_dir / "inequality.csv", csv);
  const double spread = (c_ok && c_min > 0.0) ? c_max / c_min
                                              : std::numeric_limits<double>::infinity();
  const bool spread_ok = std::isfinite(spread) && spread < 10.0;
  add_check(rep, "constant_43_stable", spread_ok,
            "constant range [" + num17(c_min) + ", " + num17(c_max) + "], max/min " +
                numg(spread));
  put_metric(rep, "constant_43_min", c_min);
  put_metric(rep, "constant_43_max", c_max);
  put_metric(rep, "constant_43_spread", spread);
  rep.status = (all_42 && spread_ok) ? "pass" : "fail";
  return rep;
}

ExperimentReport ineq_l1l2(ConfigReader& r, const CmdCtx& ctx, const GridSpec& grid) {
  ExperimentReport rep;
  const double sigma = r.num_or("experiment", "sigma", 1.0);
  const double t = r.num_or("experiment", "t", 0.0);
  const long count = r.integer_or("experiment", "count", 20);
  if (count < 1)
    throw ConfigError("count must be >= 1", r.line("experiment", "count"), "count");
  r.finish();

  std::string csv = "index,lhs,rhs,holds\n";
  long failures = 0;
  for (long i = 0; i < count; ++i) {
    const Field u = random_field(grid, ctx.seed + static_cast<std::uint64_t>(i));
    const EmbeddingCheck ec = l1_l2_embedding_check(u, sigma, t);
    if (!ec.holds) ++failures;
    csv += std::to_string(i) + "," + num17(ec.lhs) + "," + num17(ec.rhs) + "," +
           (ec.holds ? "1" : "0") + "\n";
  }
  write_file(ctx.out_dir / "inequality.csv", csv);
  add_check(rep, "embedding_holds", failures == 0,
            std::to_string(count - failures) + "/" + std::to_string(count) + " hold");
  put_metric(rep, "count", static_cast<double>(count));
  put_metric(rep, "failures", static_cast<double>(failures));
  rep.status = failures == 0 ? "pass" : "fail";
  return rep;
}

ExperimentReport cmd_inequality(ConfigReader& r, const CmdCtx& ctx) {
  const std::string selector = r.str("experiment", "selector");
  const GridSpec grid = read_grid(r, ctx.params.n);
  if (selector == "gaussian") return ineq_gaussian(r, ctx, grid);
  if (selector == "gn") return ineq_gn(r, ctx, grid);
  if (selector == "weighted_gn") return ineq_weighted_gn(r, ctx, grid);
  if (selector == "l1l2") return ineq_l1l2(r, ctx, grid);
  throw ConfigError("selector must be gaussian, gn, weighted_gn or l1l2",
                    r.line("experiment", "selector"), "selector");
}

// ---------------------------------------------------------------------------
// certificate

void certificate_products(ExperimentReport& rep, const CertificateReport& cert,
                          const fs::path& out_dir) {
  std::string csv = "R,I_R,J_R,I_hat,I_tilde,ratio,exponent\n";
  double ratio_max = 0.0;
  bool all_finite = true;
  for (const CertificateRow& row : cert.rows) {
    csv += num17(row.R) + "," + num17(row.I_R) + "," + num17(row.J_R) + "," +
           num17(row.I_hat) + "," + num17(row.I_tilde) + "," + num17(row.ratio) + "," +
           num17(cert.exponent) + "\n";
    if (std::isfinite(row.ratio))
      ratio_max = std::max(ratio_max, std::abs(row.ratio));
    else
      all_finite = false;
  }
  write_file(out_dir / "certificate.csv", csv);
  put_metric(rep, "p", cert.p);
  put_metric(rep, "exponent", cert.exponent);
  put_metric(rep, "ratio_abs_max", ratio_max);
  const char* sign = cert.exponent < 0.0 ? "negative (subcritical: the ratio mechanism forces "
                                           "unbounded growth along R)"
                     : cert.exponent > 0.0 ? "positive (supercritical)"
                                           : "zero (critical)";
  add_check(rep, "exponent_sign", true,
            "Q - (Q+2)/p = " + num17(cert.exponent) + ", " + sign);
  add_check(rep, "ratio_finite", all_finite,
            all_finite ? "all ratios finite, max |ratio| " + num17(ratio_max)
                       : "nonfinite ratio present (I_R = 0 with J_R != 0)");
}

ExperimentReport cmd_certificate(ConfigReader& r, const CmdCtx& ctx) {
  ExperimentReport rep;
  const std::string mode = r.str("experiment", "mode");
  const std::vector<double> R_values = r.list("experiment", "R_values");
  if (R_values.empty())
    throw ConfigError("R_values must be nonempty", r.line("experiment", "R_values"),
                      "R_values");
  const GridSpec grid = read_grid(r, ctx.params.n);

  if (mode == "solve") {
    const SolverConfig scfg = read_solver(r, grid, PKey::required);
    const DataSpec data = read_data(r, true);
    r.finish();
    require_solver_grade(grid);
    box_guidance_warnings(grid, data, scfg.t_end);
    auto [u0, u1] = make_initial_data(grid, data);
    const BumpProfile profile(*scfg.p);
    CertificateAccumulator acc(grid, R_values, *scfg.p, profile);
    const RunOutcome outcome =
        run(u0, u1, scfg, [&acc](long, double t, const Field& u) { acc.add_state(t, u); });
    const CertificateReport cert = acc.finalize(u0, u1, ctx.params);
    certificate_products(rep, cert, ctx.out_dir);
    add_check(rep, "run", outcome.status != RunStatus::numeric_failure,
              std::string("underlying run ") + status_text(outcome.status) +
                  (outcome.t_blowup ? " at t=" + numg(*outcome.t_blowup) : ""));
    if (outcome.t_blowup) put_metric(rep, "t_blowup", *outcome.t_blowup);
    rep.status = outcome.status == RunStatus::numeric_failure ? "numeric_failure" : "completed";
    return rep;
  }

  if (mode == "snapshots") {
    const double p = r.num("experiment", "p");
    const std::string given = r.str("experiment", "snapshot_dir");
    const fs::path dir = resolve_input(given, ctx.config_dir);
    r.record("experiment", "snapshot_dir", fs::absolute(dir).lexically_normal().string());
    const DataSpec data = read_data(r, true);
    r.finish();
    if (!fs::is_directory(dir))
      throw ConfigError("snapshot_dir is not a directory: " + dir.string(),
                        r.line("experiment", "snapshot_dir"), "snapshot_dir");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".hwav")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<SnapshotData> snaps;
    snaps.reserve(files.size());
    for (const fs::path& f : files) snaps.push_back(read_snapshot(f.string()));
    auto [u0, u1] = make_initial_data(grid, data);
    const BumpProfile profile(p);
    const CertificateReport cert =
        certificate_sweep_snapshots(snaps, u0, u1, p, R_values, profile, ctx.params);
    certificate_products(rep, cert, ctx.out_dir);
    put_metric(rep, "snapshots", static_cast<double>(snaps.size()));
    rep.status = "completed";
    return rep;
  }

  if (mode == "analytic") {
    const double p = r.num("experiment", "p");
    const std::string expr_text = r.str("experiment", "analytic_u");
    double min_r2 = R_values.front() * R_values.front();
    double max_r2 = min_r2;
    for (double R : R_values) {
      min_r2 = std::min(min_r2, R * R);
      max_r2 = std::max(max_r2, R * R);
    }
    const double sample_dt = r.num_or("experiment", "sample_dt", min_r2 / 128.0);
    if (!(sample_dt > 0.0))
      throw ConfigError("sample_dt must be positive", r.line("experiment", "sample_dt"),
                        "sample_dt");
    const DataSpec data = read_data(r, true);
    r.finish();
    const Expression expr = Expression::parse(expr_text, {"t", "x", "y", "tau"});
    auto [u0, u1] = make_initial_data(grid, data);
    const BumpProfile profile(p);
    CertificateAccumulator acc(grid, R_values, p, profile);
    const long steps = std::max(1L, static_cast<long>(std::ceil(max_r2 / sample_dt - 1e-9)));
    for (long k = 0; k <= steps; ++k) {
      const double t = static_cast<double>(k) * sample_dt;
      const Field u = sample(grid, [&](double x, double y, double tau) {
        const double args[4] = {t, x, y, tau};
        return expr.evaluate(args);
      });
      acc.add_state(t, u);
    }
    const CertificateReport cert = acc.finalize(u0, u1, ctx.params);
    certificate_products(rep, cert, ctx.out_dir);
    rep.status = "completed";
    return rep;
  }

  throw ConfigError("mode must be solve, snapshots or analytic", r.line("experiment", "mode"),
                    "mode");
}

// ---------------------------------------------------------------------------
// Dispatch.

unsigned resolve_threads(unsigned cli) {
  if (cli > 0) return cli;
  if (const char* env = std::getenv("HWAVE_THREADS")) {
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(env, &end, 10);
    if (errno != 0 || end == env || *end != '\0' || v < 1 || v > 4096)
      throw ConfigError(std::string("HWAVE_THREADS must be a positive integer, got '") + env +
                        "'");
    return static_cast<unsigned>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? hc : 1;
}

ExperimentReport run_config_impl(const IniConfig& cfg, const RunOptions& opts,
                                 const fs::path& config_dir) {
  set_thread_count(resolve_threads(opts.threads));

  ConfigReader r(cfg);
  const long n = r.integer("group", "n");
  if (n < 1 || n > 64)
    throw ConfigError("n must be a positive integer", r.line("group", "n"), "n");

  CmdCtx ctx;
  ctx.params = derived_exponents(static_cast<int>(n));
  ctx.out_dir = opts.out_dir.empty() ? fs::path(".") : fs::path(opts.out_dir);
  ctx.config_dir = config_dir;

  std::uint64_t seed = 0;
  if (r.present("experiment", "seed")) {
    const long s = r.integer("experiment", "seed");
    if (s < 0)
      throw ConfigError("seed must be nonnegative", r.line("experiment", "seed"), "seed");
    seed = static_cast<std::uint64_t>(s);
  } else {
    r.mark("experiment", "seed");
  }
  if (opts.seed) seed = *opts.seed;
  r.record("experiment", "seed", std::to_string(seed));
  ctx.seed = seed;

  const std::string name = r.str("experiment", "name");
  fs::create_directories(ctx.out_dir);

  ExperimentReport rep;
  if (name == "simulate")
    rep = cmd_simulate(r, ctx);
  else if (name == "decay")
    rep = cmd_decay(r, ctx);
  else if (name == "sweep")
    rep = cmd_sweep(r, ctx);
  else if (name == "inequality")
    rep = cmd_inequality(r, ctx);
  else if (name == "certificate")
    rep = cmd_certificate(r, ctx);
  else
    throw ConfigError("unknown experiment name '" + name + "'", r.line("experiment", "name"),
                      "name");

  rep.experiment = name;
  rep.resolved_config = r.resolved();
  rep.config_hash = hex64(fnv1a64(canonical_text(rep.resolved_config)));
  finish_report(rep, ctx.out_dir);
  return rep;
}

}  // namespace

ExperimentReport run_config(const IniConfig& cfg, const RunOptions& opts) {
  return run_config_impl(cfg, opts, fs::current_path());
}

int run_experiment(const std::string& config_path, const RunOptions& opts) {
  try {
    const IniConfig cfg = IniConfig::parse_file(config_path);
    const fs::path dir = fs::absolute(fs::path(config_path)).parent_path();
    const ExperimentReport rep = run_config_impl(cfg, opts, dir);
    if (rep.status == "numeric_failure") {
      std::fprintf(stderr, "error: numeric failure (details in report.json)\n");
      return 3;
    }
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const UnsupportedGrid& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const InvalidWindow& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const ProfileViolation& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const InvalidParameter& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const SamplingError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

}  // namespace hwave
