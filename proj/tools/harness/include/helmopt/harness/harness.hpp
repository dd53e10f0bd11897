#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "helmopt/analysis.hpp"
#include "helmopt/solve.hpp"

namespace helmopt::harness {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class Compare { kAnalytic, kNone, kSelf };

/// Settings for one harness command. Unset optionals fall back to the
/// catalog defaults of the chosen problem.
struct RunConfig {
  std::string problem = "f1";
  std::optional<double> k;
  std::optional<double> r_domain;
  std::optional<int> m_theta;
  std::optional<int> m_rho;
  double tolerance = 1e-10;
  int max_iterations = 400;
  std::filesystem::path out_dir = "helmopt-out";
  Compare compare = Compare::kAnalytic;
  bool parallel = false;
  double comparison_radius = 1.0;
  int comparison_m_theta = 21;
  int comparison_m_rho = 100;
  std::vector<double> r_list{4.0, 8.0, 16.0};
  std::vector<double> k_list{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  double trace_rho = 0.0;  // 0 means the disk radius
  int trace_points = 0;    // 0 means M_theta of the solve
};

struct ConfigEntry {
  std::string value;
  int line = 0;
};

/// Parses "key = value" lines. A section header "[solver]" prefixes the keys
/// that follow ("solver.tol"); '#' and ';' start comments.
std::map<std::string, ConfigEntry> parse_config_text(const std::string& text);

/// Keys:
///   problem.name problem.k problem.r_domain problem.m_theta problem.m_rho
///   solver.tol solver.max_iter
///   output.dir
///   compare.mode compare.radius compare.m_theta compare.m_rho
///   sweep.r_list sweep.k_list sweep.parallel
///   trace.rho trace.points
/// Lists are comma separated. Unknown keys and bad values throw ConfigError.
void apply_config(const std::map<std::string, ConfigEntry>& kv, RunConfig& cfg);

RunConfig load_config(const std::filesystem::path& path);

Compare parse_compare(const std::string& s);
std::string to_string(Compare c);

struct RunManifest {
  std::string status = "ok";
  std::string message;
  std::string command;
  std::string problem;
  double k = 0.0;
  double radius = 0.0;
  int m_theta = 0;
  int m_rho = 0;
  double tolerance = 0.0;
  int max_iterations = 0;
  double wall_seconds = 0.0;
  int iterations = 0;
  double preconditioned_residual = 0.0;
  double block_residual = 0.0;
  double residual_constraint = 0.0;
  double residual_stationarity = 0.0;
  double functional_value = 0.0;
  std::optional<ErrorReport> errors;
  std::map<std::string, std::string> artifacts;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// "%.17g" formatting shared by every CSV writer.
std::string format_double(double v);

/// Writes a CSV file whose first line is "# helmopt-csv v1 <kind>".
void write_csv(const std::filesystem::path& path, const std::string& kind,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

ProblemSpec resolve_problem(const RunConfig& cfg);

struct SolveOutcome {
  RunManifest manifest;
  std::optional<SolutionField> solution;
  std::optional<DiskGrid> grid;
};

/// Solves one problem, writes field.csv and manifest.json into `dir`. Solver
/// failures are recorded in the manifest (status "failed") rather than thrown.
SolveOutcome run_solve(const RunConfig& cfg, const std::filesystem::path& dir,
                       const std::function<void(int, double)>& progress = {});

/// Errors of the solution against the reference selected by cfg.compare.
std::optional<ErrorReport> compare_solution(const RunConfig& cfg, const ProblemSpec& p,
                                            const DiskGrid& grid, const SolutionField& s);

struct SweepPoint {
  double param = 0.0;
  RunManifest manifest;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::map<std::string, RateFit> fits;
};

/// R sweep with M_rho = 25 R unless m_rho is given. Writes norms.csv and fit.csv.
SweepResult run_sweep_r(const RunConfig& cfg);

/// k sweep; fits the branches k < 1 and k >= 1 separately.
SweepResult run_sweep_k(const RunConfig& cfg);

/// Reads field.csv and writes trace.csv at radius rho. Throws std::domain_error
/// if rho lies outside the dumped disk.
std::filesystem::path run_trace(const std::filesystem::path& field_csv, double rho, int points,
                                const std::filesystem::path& out_csv);

/// Loads a field dump back into grid-shaped data.
struct FieldDump {
  DiskGrid grid;
  Eigen::MatrixXcd v;
};
FieldDump read_field_csv(const std::filesystem::path& path);

/// Harness self-test on synthetic data; returns the failures (empty on success).
std::vector<std::string> self_test();

}  // namespace helmopt::harness
