#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "optbench/hyperband.hpp"
#include "optbench/metrics.hpp"
#include "optbench/tasks.hpp"

namespace optbench {

struct TaskEntry {
  TaskPtr task;
  bool tune_gamma = false;
};

// Per-repetition seed, a stable pure function of (master seed, optimizer, i).
std::uint64_t derived_seed(std::uint64_t master, const std::string& optimizer,
                           int rep);

// Optional per-(optimizer, task, repetition) event sink for streaming trial
// events into a results log.
using SinkFactory = std::function<std::unique_ptr<EventSink>(
    const std::string& optimizer, const std::string& task, int rep)>;

struct EndToEndCell {
  std::string optimizer;
  std::string task;
  std::vector<Trajectory> trajectories;  // one per repetition
  std::vector<double> cpes;
  std::vector<double> peaks;
  double mean_cpe = 0.0;
  double std_cpe = 0.0;
  double mean_peak = 0.0;
  double std_peak = 0.0;
};

struct EndToEndResult {
  std::vector<EndToEndCell> cells;
};

// End-to-end efficiency protocol: per optimizer x task, M independent
// Hyperband searches; best-so-far trajectories, CPE and peak, averaged.
EndToEndResult run_end_to_end(const std::vector<TaskEntry>& tasks,
                              const std::vector<Rule>& rules, TuningMode mode,
                              int M, int R, int eta, int n_c,
                              std::uint64_t master_seed,
                              const SinkFactory& sinks = nullptr);

// Stratified delta-fraction split; the partial task shares the full task's
// validation set. Returns (partial, full).
std::pair<TaskPtr, TaskPtr> split_dataset(const TaskPtr& task, double delta);

struct DataAdditionCell {
  std::string optimizer;
  std::string task;
  std::vector<Hyperparams> omega_partial;  // best config per repetition
  std::vector<double> partial_curve;       // per-epoch metric, averaged over M
  std::vector<double> full_curve;
  double partial_cpe = 0.0;
  double full_cpe = 0.0;
};

struct DataAdditionTaskResult {
  std::string task;
  std::vector<DataAdditionCell> cells;
  std::vector<int> rank_partial;  // 0 = best
  std::vector<int> rank_full;
  double kendall = 1.0;
};

struct DataAdditionResult {
  std::vector<DataAdditionTaskResult> per_task;
};

// Data-addition protocol: tune all hyperparameters on the delta subset, then
// retrain with the found configuration on both the subset and the full data
// for R epochs; rank optimizers by curve CPE before and after addition.
DataAdditionResult run_data_addition(const std::vector<TaskEntry>& tasks,
                                     const std::vector<Rule>& rules, int M,
                                     int R, int eta, int n_c, double delta,
                                     std::uint64_t master_seed,
                                     const SinkFactory& sinks = nullptr);

}  // namespace optbench
