#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "optbench/protocols.hpp"

namespace optbench {

inline constexpr int kConfigFormatVersion = 1;

struct TaskConfig {
  std::string type;  // quadratic | logreg | mlp | landscape
  std::uint64_t seed = 1;
  int dim = 5;
  double condition_number = 10.0;
  int n_samples = 200;
  int n_classes = 2;
  int hidden = 8;
  bool tune_gamma = false;
};

struct RunConfig {
  int format_version = kConfigFormatVersion;
  std::string protocol;  // end2end | data_addition | verify
  std::vector<std::string> optimizers;
  std::vector<TaskConfig> tasks;
  std::string mode = "lr_only";
  int repetitions = 3;
  int R = 27;
  int eta = 3;
  int n_c = 1;
  double delta = 0.3;
  std::uint64_t master_seed = 0;
  std::string output_dir = "out";
};

// Strict parsing: unknown keys and version mismatches are errors, reported
// with the offending key.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::string& path);

TaskEntry build_task(const TaskConfig& tc);

nlohmann::json hyperparams_to_json(const Hyperparams& w);
Hyperparams hyperparams_from_json(const nlohmann::json& j);

// Append-only newline-delimited JSON record stream.
class ResultsLog {
 public:
  explicit ResultsLog(const std::string& path);
  void append(const nlohmann::json& record);

 private:
  std::ofstream out_;
};

std::vector<nlohmann::json> read_results(const std::string& path);

// CLI entry points. Exit codes: 0 ok, 1 usage/config error, 2 runtime failure.
int cmd_bench(const std::string& config_path,
              const std::string& output_override = "");
int cmd_report(const std::string& results_path, const std::string& kind,
               const std::string& out_dir);
int cmd_verify();

}  // namespace optbench
