#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "helmopt/harness/harness.hpp"
#include "helmopt/problems.hpp"

namespace hh = helmopt::harness;

namespace {

void print_fits(const hh::SweepResult& r) {
  for (const auto& p : r.points) {
    std::printf("%-10g %-6s", p.param, p.manifest.status.c_str());
    if (p.manifest.errors) {
      const auto& e = *p.manifest.errors;
      std::printf(" l2=%.4e l2_rel=%.4e h1=%.4e h1_rel=%.4e linf=%.4e", e.l2_abs, e.l2_rel,
                  e.h1_abs, e.h1_rel, e.linf_abs);
    }
    std::printf("\n");
  }
  for (const auto& [name, f] : r.fits) {
    std::printf("slope %-16s %+.4f (r^2 %.4f)\n", name.c_str(), f.slope, f.r_squared);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Helmholtz solver on a disk with a radiation-functional closure"};
  app.require_subcommand(1);

  hh::RunConfig cfg;
  std::string config_path;
  std::string compare = "analytic";
  bool quiet = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value config file (flags override it)");
    sub->add_option("--problem", cfg.problem, "catalog problem name");
    sub->add_option("--k", cfg.k, "wavenumber");
    sub->add_option("--r-domain", cfg.r_domain, "disk radius R");
    sub->add_option("--m-theta", cfg.m_theta, "angular nodes (odd)");
    sub->add_option("--m-rho", cfg.m_rho, "radial nodes on (0, R]");
    sub->add_option("--tol", cfg.tolerance, "GMRES tolerance");
    sub->add_option("--max-iter", cfg.max_iterations, "GMRES iteration cap");
    sub->add_option("--out-dir", cfg.out_dir, "output directory");
    sub->add_option("--compare", compare, "reference for error norms")
        ->check(CLI::IsMember({"analytic", "none", "self"}));
    sub->add_flag("--quiet", quiet, "no progress output");
  };

  auto* solve = app.add_subcommand("solve", "solve one problem and dump the field");
  add_common(solve);

  std::vector<double> r_list;
  auto* sweep_r = app.add_subcommand("sweep-r", "errors on B_1 over an ascending list of R");
  add_common(sweep_r);
  sweep_r->add_option("--r-list", r_list, "radii (default 4 8 16)");
  sweep_r->add_flag("--parallel", cfg.parallel, "run sweep points concurrently");

  std::vector<double> k_list;
  auto* sweep_k = app.add_subcommand("sweep-k", "errors on B_1 over a list of k");
  add_common(sweep_k);
  sweep_k->add_option("--k-list", k_list, "wavenumbers");
  sweep_k->add_flag("--parallel", cfg.parallel, "run sweep points concurrently");

  std::string field_path;
  std::string trace_out;
  double trace_rho = 0.0;
  int trace_points = 0;
  auto* trace = app.add_subcommand("trace", "extract v(rho, theta) on a circle from a field dump");
  trace->add_option("field", field_path, "field.csv from solve")->required();
  trace->add_option("--rho", trace_rho, "circle radius (default R)");
  trace->add_option("--points", trace_points, "angles (default M_theta of the dump)");
  trace->add_option("-o,--output", trace_out, "output CSV (default trace.csv next to the dump)");

  app.add_subcommand("list-problems", "print the problem catalog");
  auto* self = app.add_subcommand("self-test", "check harness plumbing on synthetic data");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      // Re-parse so command-line flags override the file.
      hh::RunConfig from_file = hh::load_config(config_path);
      std::swap(cfg, from_file);
      CLI11_PARSE(app, argc, argv);
      if (!app.get_subcommands().front()->count("--compare")) compare = hh::to_string(cfg.compare);
    }
    cfg.compare = hh::parse_compare(compare);
    if (!r_list.empty()) cfg.r_list = r_list;
    if (!k_list.empty()) cfg.k_list = k_list;
    auto progress = [&](int it, double res) {
      if (!quiet) std::fprintf(stderr, "  gmres %4d  %.3e\n", it, res);
    };

    if (app.got_subcommand("list-problems")) {
      for (const auto& name : helmopt::list_problems()) {
        const auto p = helmopt::make_problem(name);
        std::printf("%-6s k=%-4g R=%-3g M_theta=%-3d M_rho=%-4d %s\n", name.c_str(), p.k, p.radius,
                    p.m_theta, p.m_rho, p.description.c_str());
      }
      return 0;
    }
    if (app.got_subcommand(self)) {
      const auto failures = hh::self_test();
      for (const auto& f : failures) std::printf("FAIL %s\n", f.c_str());
      std::printf("%s\n", failures.empty() ? "self-test ok" : "self-test failed");
      return failures.empty() ? 0 : 1;
    }
    if (app.got_subcommand(trace)) {
      std::filesystem::path out = trace_out;
      if (out.empty()) out = std::filesystem::path(field_path).parent_path() / "trace.csv";
      std::printf("%s\n", hh::run_trace(field_path, trace_rho, trace_points, out).c_str());
      return 0;
    }
    if (app.got_subcommand(solve)) {
      const auto res = hh::run_solve(cfg, cfg.out_dir, progress);
      const auto& m = res.manifest;
      std::printf("%s: %s  iterations=%d  residual=%.3e  J=%.6e\n", m.problem.c_str(),
                  m.status.c_str(), m.iterations, m.block_residual, m.functional_value);
      if (m.errors) {
        const auto& e = *m.errors;
        std::printf("B_%g: l2=%.4e l2_rel=%.4e h1=%.4e h1_rel=%.4e linf=%.4e\n",
                    e.comparison_radius, e.l2_abs, e.l2_rel, e.h1_abs, e.h1_rel, e.linf_abs);
      }
      if (!m.message.empty()) std::printf("%s\n", m.message.c_str());
      return m.status == "ok" ? 0 : 2;
    }
    const auto r = app.got_subcommand(sweep_r) ? hh::run_sweep_r(cfg) : hh::run_sweep_k(cfg);
    print_fits(r);
    for (const auto& p : r.points) {
      if (p.manifest.status != "ok") return 2;
    }
    return 0;
  } catch (const hh::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
