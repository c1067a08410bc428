#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "optbench/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"optbench: stochastic-optimizer benchmarking harness"};
  app.require_subcommand(1);

  std::string config_path;
  auto* bench = app.add_subcommand("bench", "run a benchmarking protocol");
  bench->add_option("config", config_path, "JSON run configuration")
      ->required();

  std::string results_path, kind = "cpe_table", report_out = ".";
  auto* report = app.add_subcommand("report", "derive tables from a results log");
  report->add_option("results", results_path, "results.jsonl path")->required();
  report
      ->add_option("--kind", kind,
                   "one of: cpe_table, peak_table, profile, curves")
      ->capture_default_str();
  report->add_option("--out", report_out, "output directory")
      ->capture_default_str();

  auto* verify = app.add_subcommand("verify", "run the self-check suites");
  (void)verify;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (app.got_subcommand("bench")) {
    const char* override_dir = std::getenv("OPTBENCH_OUTPUT_DIR");
    return optbench::cmd_bench(config_path,
                               override_dir != nullptr ? override_dir : "");
  }
  if (app.got_subcommand("report"))
    return optbench::cmd_report(results_path, kind, report_out);
  return optbench::cmd_verify();
}
