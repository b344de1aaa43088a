// conewave <experiment> --config <path.toml> [--out <dir>] [--plot]
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "conewave/config.hpp"
#include "conewave/error.hpp"
#include "conewave/report.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitTolerance = 3;

void print_summary(const conewave::TrialReport& r) {
  std::printf("%s: %zu rows, max %.6g, median %.6g, min %.6g\n", r.experiment.c_str(), r.rows.size(), r.max_ratio,
              r.median_ratio, r.min_ratio);
  for (const auto& [k, v] : r.summary) std::printf("  %s = %.10g\n", k.c_str(), v);
  for (const auto& c : r.checks)
    std::printf("  check %-28s %s (value %.6g, bound %.6g)\n", c.name.c_str(), c.passed ? "ok" : "FAILED", c.value,
                c.bound);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conewave experiment runner"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  bool plot = false;
  int threads = -1;
  for (const std::string& name : conewave::experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "TOML configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    sub->add_flag("--plot", plot, "also write trajectory.svg");
    sub->add_option("--threads", threads, "worker threads (0: all cores)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    conewave::ExperimentConfig cfg = conewave::load_config(config_path);
    cfg.experiment = command;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (threads >= 0) cfg.threads = threads;
    const conewave::TrialReport report = conewave::run_experiment(cfg);
    conewave::emit_report(report, conewave::ReportFormat::json, cfg.output_dir, &cfg);
    conewave::emit_report(report, conewave::ReportFormat::csv, cfg.output_dir);
    if (plot || cfg.plot) conewave::emit_report(report, conewave::ReportFormat::svg, cfg.output_dir);
    print_summary(report);
    return report.passed() ? 0 : kExitTolerance;
  } catch (const conewave::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const conewave::DomainError& e) {
    std::cerr << "invalid setting: " << e.what() << "\n";
    return kExitConfig;
  } catch (const conewave::NumericalError& e) {
    std::cerr << "tolerance failure: " << e.what() << "\n";
    return kExitTolerance;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
