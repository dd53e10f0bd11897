#include "helmopt/harness/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

namespace helmopt::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const ConfigEntry& e) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(e.line, "expected a number, got '" + e.value + "'");
  }
}

int to_int(const ConfigEntry& e) {
  const double v = to_double(e);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ConfigError(e.line, "expected an integer, got '" + e.value + "'");
  }
  return static_cast<int>(v);
}

bool to_bool(const ConfigEntry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw ConfigError(e.line, "expected a boolean, got '" + e.value + "'");
}

std::vector<double> to_list(const ConfigEntry& e) {
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double({trim(item), e.line}));
  if (out.empty()) throw ConfigError(e.line, "empty list");
  return out;
}

double nan_if_null(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

std::string slug(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void write_manifest(const RunManifest& m, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream out(dir / "manifest.json");
  out << to_json(m).dump(2) << '\n';
}

int refined_odd(int m) {
  const int r = (3 * m) / 2;
  return r % 2 == 1 ? r : r + 1;
}

}  // namespace

std::map<std::string, ConfigEntry> parse_config_text(const std::string& text) {
  std::map<std::string, ConfigEntry> out;
  std::stringstream ss(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    const auto cut = raw.find_first_of("#;");
    std::string s = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) throw ConfigError(line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "missing key");
    if (value.empty()) throw ConfigError(line, "missing value for '" + key + "'");
    const std::string full = section.empty() ? key : section + "." + key;
    if (out.count(full)) throw ConfigError(line, "duplicate key '" + full + "'");
    out[full] = {value, line};
  }
  return out;
}

void apply_config(const std::map<std::string, ConfigEntry>& kv, RunConfig& cfg) {
  for (const auto& [key, e] : kv) {
    if (key == "problem.name") {
      cfg.problem = e.value;
    } else if (key == "problem.k") {
      cfg.k = to_double(e);
    } else if (key == "problem.r_domain") {
      cfg.r_domain = to_double(e);
    } else if (key == "problem.m_theta") {
      cfg.m_theta = to_int(e);
    } else if (key == "problem.m_rho") {
      cfg.m_rho = to_int(e);
    } else if (key == "solver.tol") {
      cfg.tolerance = to_double(e);
    } else if (key == "solver.max_iter") {
      cfg.max_iterations = to_int(e);
    } else if (key == "output.dir") {
      cfg.out_dir = e.value;
    } else if (key == "compare.mode") {
      try {
        cfg.compare = parse_compare(e.value);
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(e.line, ex.what());
      }
    } else if (key == "compare.radius") {
      cfg.comparison_radius = to_double(e);
    } else if (key == "compare.m_theta") {
      cfg.comparison_m_theta = to_int(e);
    } else if (key == "compare.m_rho") {
      cfg.comparison_m_rho = to_int(e);
    } else if (key == "sweep.r_list") {
      cfg.r_list = to_list(e);
    } else if (key == "sweep.k_list") {
      cfg.k_list = to_list(e);
    } else if (key == "sweep.parallel") {
      cfg.parallel = to_bool(e);
    } else if (key == "trace.rho") {
      cfg.trace_rho = to_double(e);
    } else if (key == "trace.points") {
      cfg.trace_points = to_int(e);
    } else {
      throw ConfigError(e.line, "unknown key '" + key + "'");
    }
  }
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg;
  apply_config(parse_config_text(ss.str()), cfg);
  return cfg;
}

Compare parse_compare(const std::string& s) {
  if (s == "analytic") return Compare::kAnalytic;
  if (s == "none") return Compare::kNone;
  if (s == "self") return Compare::kSelf;
  throw std::invalid_argument("compare must be analytic, none or self, got '" + s + "'");
}

std::string to_string(Compare c) {
  switch (c) {
    case Compare::kAnalytic: return "analytic";
    case Compare::kNone: return "none";
    case Compare::kSelf: return "self";
  }
  return "none";
}

json to_json(const RunManifest& m) {
  json j;
  j["status"] = m.status;
  j["message"] = m.message;
  j["command"] = m.command;
  j["problem"] = m.problem;
  j["k"] = m.k;
  j["radius"] = m.radius;
  j["m_theta"] = m.m_theta;
  j["m_rho"] = m.m_rho;
  j["solver"] = {{"tolerance", m.tolerance}, {"max_iterations", m.max_iterations}};
  j["wall_seconds"] = m.wall_seconds;
  j["iterations"] = m.iterations;
  j["residuals"] = {{"preconditioned", m.preconditioned_residual},
                    {"block", m.block_residual},
                    {"constraint", m.residual_constraint},
                    {"stationarity", m.residual_stationarity}};
  j["functional_value"] = m.functional_value;
  if (m.errors) {
    const ErrorReport& e = *m.errors;
    // NaN relative norms serialize as null.
    j["errors"] = {{"l2", e.l2_abs},
                   {"l2_rel", e.relative_defined ? json(e.l2_rel) : json()},
                   {"h1", e.h1_abs},
                   {"h1_rel", e.relative_defined ? json(e.h1_rel) : json()},
                   {"linf", e.linf_abs},
                   {"relative_defined", e.relative_defined},
                   {"comparison_radius", e.comparison_radius},
                   {"comparison_m_theta", e.comparison_m_theta},
                   {"comparison_m_rho", e.comparison_m_rho}};
  } else {
    j["errors"] = nullptr;
  }
  j["artifacts"] = m.artifacts;
  return j;
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  m.status = j.at("status").get<std::string>();
  m.message = j.at("message").get<std::string>();
  m.command = j.at("command").get<std::string>();
  m.problem = j.at("problem").get<std::string>();
  m.k = j.at("k").get<double>();
  m.radius = j.at("radius").get<double>();
  m.m_theta = j.at("m_theta").get<int>();
  m.m_rho = j.at("m_rho").get<int>();
  m.tolerance = j.at("solver").at("tolerance").get<double>();
  m.max_iterations = j.at("solver").at("max_iterations").get<int>();
  m.wall_seconds = j.at("wall_seconds").get<double>();
  m.iterations = j.at("iterations").get<int>();
  const json& r = j.at("residuals");
  m.preconditioned_residual = r.at("preconditioned").get<double>();
  m.block_residual = r.at("block").get<double>();
  m.residual_constraint = r.at("constraint").get<double>();
  m.residual_stationarity = r.at("stationarity").get<double>();
  m.functional_value = j.at("functional_value").get<double>();
  if (!j.at("errors").is_null()) {
    const json& e = j.at("errors");
    ErrorReport rep;
    rep.l2_abs = e.at("l2").get<double>();
    rep.l2_rel = nan_if_null(e.at("l2_rel"));
    rep.h1_abs = e.at("h1").get<double>();
    rep.h1_rel = nan_if_null(e.at("h1_rel"));
    rep.linf_abs = e.at("linf").get<double>();
    rep.relative_defined = e.at("relative_defined").get<bool>();
    rep.comparison_radius = e.at("comparison_radius").get<double>();
    rep.comparison_m_theta = e.at("comparison_m_theta").get<int>();
    rep.comparison_m_rho = e.at("comparison_m_rho").get<int>();
    m.errors = rep;
  }
  m.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
  return m;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const fs::path& path, const std::string& kind,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# helmopt-csv v1 " << kind << '\n';
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
}

ProblemSpec resolve_problem(const RunConfig& cfg) {
  ProblemSpec p = make_problem(cfg.problem);
  if (cfg.k) p.k = *cfg.k;
  if (cfg.r_domain) p.radius = *cfg.r_domain;
  if (cfg.m_theta) p.m_theta = *cfg.m_theta;
  if (cfg.m_rho) p.m_rho = *cfg.m_rho;
  if (p.k <= 0.0) throw std::invalid_argument("k must be positive");
  return p;
}

std::optional<ErrorReport> compare_solution(const RunConfig& cfg, const ProblemSpec& p,
                                            const DiskGrid& grid, const SolutionField& s) {
  const SpectralCoefficients c = to_spectral(s.v, grid);
  switch (cfg.compare) {
    case Compare::kNone:
      return std::nullopt;
    case Compare::kAnalytic: {
      if (!constant_index(p.refraction) || !std::holds_alternative<GaussianSum>(p.source)) {
        return std::nullopt;
      }
      const ExactSolution exact(std::get<GaussianSum>(p.source), p.k, p.refraction);
      return error_norms(c, [&](const std::vector<Point>& q) { return exact.evaluate(q); },
                         cfg.comparison_radius, cfg.comparison_m_theta, cfg.comparison_m_rho);
    }
    case Compare::kSelf: {
      ProblemSpec fine = p;
      fine.m_theta = refined_odd(p.m_theta);
      fine.m_rho = (3 * p.m_rho) / 2;
      SolveOptions opts;
      opts.tolerance = cfg.tolerance;
      opts.max_iterations = cfg.max_iterations;
      const DiscreteSystem sys = make_system(fine);
      const SolutionField sf = solve_kkt(KktSystem(sys), opts);
      const SpectralCoefficients cf = to_spectral(sf.v, sys.grid);
      return error_norms(c, as_reference(cf), cfg.comparison_radius, cfg.comparison_m_theta,
                         cfg.comparison_m_rho);
    }
  }
  return std::nullopt;
}

SolveOutcome run_solve(const RunConfig& cfg, const fs::path& dir,
                       const std::function<void(int, double)>& progress) {
  SolveOutcome out;
  RunManifest& m = out.manifest;
  m.command = "solve";
  m.problem = cfg.problem;
  m.tolerance = cfg.tolerance;
  m.max_iterations = cfg.max_iterations;
  const auto t0 = std::chrono::steady_clock::now();
  auto finish = [&] {
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(m, dir);
  };
  auto record = [&](const SolutionField& s) {
    m.iterations = s.iterations;
    m.preconditioned_residual = s.preconditioned_residual;
    m.block_residual = s.block_residual;
    m.residual_constraint = s.residual_constraint;
    m.residual_stationarity = s.residual_stationarity;
    m.functional_value = s.functional_value;
  };
  try {
    const ProblemSpec p = resolve_problem(cfg);
    m.k = p.k;
    m.radius = p.radius;
    m.m_theta = p.m_theta;
    m.m_rho = p.m_rho;
    SolveOptions opts;
    opts.tolerance = cfg.tolerance;
    opts.max_iterations = cfg.max_iterations;
    if (progress) {
      opts.report_every = 10;
      opts.progress = progress;
    }
    validate(opts);
    const DiscreteSystem sys = make_system(p);
    const SolutionField s = solve_kkt(KktSystem(sys), opts);
    record(s);

    fs::create_directories(dir);
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(sys.grid.num_nodes()));
    for (int i = 0; i < sys.grid.m_theta; ++i) {
      for (int j = 0; j < sys.grid.m_rho; ++j) {
        const auto z = s.v(j, i);
        rows.push_back({sys.grid.rho_pos(j), sys.grid.theta(i), z.real(), z.imag()});
      }
    }
    write_csv(dir / "field.csv", "field", {"rho", "theta", "re", "im"}, rows);
    m.artifacts["field"] = (dir / "field.csv").string();

    m.errors = compare_solution(cfg, p, sys.grid, s);
    if (!m.errors && cfg.compare == Compare::kAnalytic) {
      m.message = "no analytic reference for this problem";
    }
    m.artifacts["manifest"] = (dir / "manifest.json").string();
    out.solution = s;
    out.grid = sys.grid;
  } catch (const NonConvergence& e) {
    record(e.best());
    m.status = "failed";
    m.message = e.what();
  } catch (const BreakdownDetected& e) {
    record(e.best());
    m.status = "failed";
    m.message = e.what();
  } catch (const std::exception& e) {
    m.status = "failed";
    m.message = e.what();
  }
  finish();
  return out;
}

namespace {

std::vector<SweepPoint> run_points(const RunConfig& base, const std::vector<double>& params,
                                   const std::function<RunConfig(double)>& configure,
                                   const std::string& prefix) {
  std::vector<SweepPoint> points(params.size());
  auto one = [&](std::size_t i) {
    const RunConfig cfg = configure(params[i]);
    SweepPoint sp;
    sp.param = params[i];
    sp.manifest = run_solve(cfg, base.out_dir / (prefix + slug(params[i]))).manifest;
    return sp;
  };
  if (base.parallel) {
    std::vector<std::future<SweepPoint>> futures;
    for (std::size_t i = 0; i < params.size(); ++i) {
      futures.push_back(std::async(std::launch::async, one, i));
    }
    for (std::size_t i = 0; i < params.size(); ++i) points[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < params.size(); ++i) points[i] = one(i);
  }
  return points;
}

const std::vector<std::string> kNormNames{"l2", "l2_rel", "h1", "h1_rel", "linf"};

double norm_value(const ErrorReport& e, const std::string& name) {
  if (name == "l2") return e.l2_abs;
  if (name == "l2_rel") return e.l2_rel;
  if (name == "h1") return e.h1_abs;
  if (name == "h1_rel") return e.h1_rel;
  return e.linf_abs;
}

void add_fits(const std::vector<SweepPoint>& pts, const std::string& suffix,
              const std::function<bool(double)>& keep, std::map<std::string, RateFit>& fits) {
  for (const auto& name : kNormNames) {
    std::vector<std::pair<double, double>> samples;
    for (const auto& p : pts) {
      if (!keep(p.param) || !p.manifest.errors) continue;
      const double v = norm_value(*p.manifest.errors, name);
      if (std::isfinite(v) && v > 0.0) samples.emplace_back(p.param, v);
    }
    if (samples.size() >= 3) fits[name + suffix] = fit_rate(samples);
  }
}

void write_sweep(const RunConfig& cfg, const std::string& command, const SweepResult& r) {
  std::vector<std::vector<double>> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : r.points) {
    if (p.manifest.errors) {
      const ErrorReport& e = *p.manifest.errors;
      rows.push_back({p.param, e.l2_abs, e.l2_rel, e.h1_abs, e.h1_rel, e.linf_abs});
    } else {
      rows.push_back({p.param, nan, nan, nan, nan, nan});
    }
  }
  write_csv(cfg.out_dir / "norms.csv", "norms", {"param", "l2", "l2_rel", "h1", "h1_rel", "linf"},
            rows);
  json j;
  j["command"] = command;
  j["problem"] = cfg.problem;
  bool ok = true;
  for (const auto& p : r.points) {
    j["runs"].push_back(to_json(p.manifest));
    ok = ok && p.manifest.status == "ok";
  }
  j["status"] = ok ? "ok" : "failed";
  for (const auto& [name, f] : r.fits) {
    j["fits"][name] = {{"slope", f.slope},
                       {"intercept", f.intercept},
                       {"rms_residual", f.rms_residual},
                       {"r_squared", f.r_squared}};
  }
  j["artifacts"] = {{"norms", (cfg.out_dir / "norms.csv").string()}};
  std::ofstream(cfg.out_dir / "sweep.json") << j.dump(2) << '\n';
}

}  // namespace

SweepResult run_sweep_r(const RunConfig& cfg) {
  if (cfg.r_list.empty() || !std::is_sorted(cfg.r_list.begin(), cfg.r_list.end()) ||
      std::adjacent_find(cfg.r_list.begin(), cfg.r_list.end()) != cfg.r_list.end()) {
    throw std::invalid_argument("R list must be strictly ascending");
  }
  if (cfg.r_list.front() <= cfg.comparison_radius) {
    throw std::invalid_argument("every R must exceed the comparison radius");
  }
  fs::create_directories(cfg.out_dir);
  SweepResult r;
  r.points = run_points(cfg, cfg.r_list,
                        [&](double radius) {
                          RunConfig c = cfg;
                          c.r_domain = radius;
                          if (!cfg.m_rho) c.m_rho = static_cast<int>(std::lround(25.0 * radius));
                          return c;
                        },
                        "R_");
  add_fits(r.points, "", [](double) { return true; }, r.fits);
  write_sweep(cfg, "sweep-r", r);
  return r;
}

SweepResult run_sweep_k(const RunConfig& cfg) {
  for (const double k : cfg.k_list) {
    if (!(k > 0.0)) throw std::invalid_argument("k values must be positive");
  }
  fs::create_directories(cfg.out_dir);
  SweepResult r;
  r.points = run_points(cfg, cfg.k_list,
                        [&](double k) {
                          RunConfig c = cfg;
                          c.k = k;
                          return c;
                        },
                        "k_");
  add_fits(r.points, ".small_k", [](double k) { return k <= 1.0; }, r.fits);
  add_fits(r.points, ".large_k", [](double k) { return k >= 1.0; }, r.fits);
  write_sweep(cfg, "sweep-k", r);
  return r;
}

FieldDump read_field_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("# helmopt-csv v1 field", 0) != 0) {
    throw std::runtime_error(path.string() + ": not a helmopt field dump");
  }
  std::getline(in, line);
  std::vector<std::array<double, 4>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 4> r{};
    std::stringstream ss(line);
    std::string cell;
    for (double& x : r) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("short row in " + path.string());
      x = std::stod(cell);
    }
    rows.push_back(r);
  }
  if (rows.empty()) throw std::runtime_error(path.string() + ": no data");
  int m_rho = 0;
  while (m_rho < static_cast<int>(rows.size()) && rows[m_rho][1] == rows[0][1]) ++m_rho;
  if (rows.size() % static_cast<std::size_t>(m_rho) != 0) {
    throw std::runtime_error(path.string() + ": ragged grid");
  }
  const int m_theta = static_cast<int>(rows.size()) / m_rho;
  FieldDump d{build_disk_grid(rows[0][0], m_theta, m_rho), Eigen::MatrixXcd(m_rho, m_theta)};
  for (int i = 0; i < m_theta; ++i) {
    for (int j = 0; j < m_rho; ++j) {
      const auto& r = rows[static_cast<std::size_t>(j + m_rho * i)];
      if (std::abs(r[0] - d.grid.rho_pos(j)) > 1e-12 * d.grid.radius ||
          std::abs(r[1] - d.grid.theta(i)) > 1e-12) {
        throw std::runtime_error(path.string() + ": nodes do not form a disk grid");
      }
      d.v(j, i) = {r[2], r[3]};
    }
  }
  return d;
}

fs::path run_trace(const fs::path& field_csv, double rho, int points, const fs::path& out_csv) {
  const FieldDump d = read_field_csv(field_csv);
  if (rho == 0.0) rho = d.grid.radius;
  if (!(rho > 0.0) || rho > d.grid.radius) {
    throw std::domain_error("trace radius " + format_double(rho) + " outside the disk of radius " +
                            format_double(d.grid.radius));
  }
  if (points <= 0) points = d.grid.m_theta;
  const Eigen::VectorXcd t = boundary_trace(to_spectral(d.v, d.grid), rho, points);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < points; ++i) {
    rows.push_back({2.0 * std::numbers::pi * (i + 1) / points, t(i).real(), t(i).imag()});
  }
  write_csv(out_csv, "trace", {"theta", "re", "im"}, rows);
  return out_csv;
}

std::vector<std::string> self_test() {
  std::vector<std::string> failures;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  const fs::path dir = fs::temp_directory_path() / "helmopt-self-test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  {
    std::vector<std::pair<double, double>> s;
    for (double r : {4.0, 8.0, 16.0, 32.0}) s.emplace_back(r, 0.37 / r);
    const RateFit f = fit_rate(s);
    check(std::abs(f.slope + 1.0) < 1e-12, "synthetic C/R sweep slope");
  }
  {
    const std::vector<std::vector<double>> rows{{0.1, 1.0 / 3.0, -2e-300}, {1e300, 0.0, 7.0}};
    write_csv(dir / "a.csv", "norms", {"a", "b", "c"}, rows);
    write_csv(dir / "b.csv", "norms", {"a", "b", "c"}, rows);
    std::ifstream a(dir / "a.csv"), b(dir / "b.csv");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    check(sa.str() == sb.str(), "CSV determinism");
  }
  {
    RunManifest m;
    m.problem = "f1";
    m.k = 0.1;
    m.radius = 4.0;
    m.functional_value = 1.0 / 3.0;
    ErrorReport e;
    e.l2_abs = 2.0 / 3.0;
    e.relative_defined = false;
    e.l2_rel = e.h1_rel = std::numeric_limits<double>::quiet_NaN();
    m.errors = e;
    m.artifacts["field"] = "x.csv";
    const RunManifest back = manifest_from_json(json::parse(to_json(m).dump()));
    check(to_json(back).dump() == to_json(m).dump() && back.functional_value == 1.0 / 3.0,
          "manifest round trip");
  }
  {
    bool thrown = false;
    try {
      parse_config_text("[problem]\nk = 1\nbroken line\n");
    } catch (const ConfigError& e) {
      thrown = e.line() == 3;
    }
    check(thrown, "config line diagnostics");
  }
  {
    const double k = 1.5;
    const DiskGrid g = build_disk_grid(2.0, 31, 40);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < g.m_theta; ++i) {
      for (int j = 0; j < g.m_rho; ++j) {
        const auto z = std::exp(std::complex<double>(0.0, k * g.rho_pos(j) * std::cos(g.theta(i))));
        rows.push_back({g.rho_pos(j), g.theta(i), z.real(), z.imag()});
      }
    }
    write_csv(dir / "field.csv", "field", {"rho", "theta", "re", "im"}, rows);
    run_trace(dir / "field.csv", 1.7, 64, dir / "trace.csv");
    const FieldDump d = read_field_csv(dir / "field.csv");
    const Eigen::VectorXcd t = boundary_trace(to_spectral(d.v, d.grid), 1.7, 64);
    double err = 0.0;
    for (int i = 0; i < 64; ++i) {
      const double th = 2.0 * std::numbers::pi * (i + 1) / 64;
      err = std::max(err, std::abs(t(i) - std::exp(std::complex<double>(0.0, k * 1.7 * std::cos(th)))));
    }
    check(err < 1e-8, "plane-wave trace");
  }
  fs::remove_all(dir);
  return failures;
}

}  // namespace helmopt::harness
