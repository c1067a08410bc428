#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "optbench/optimizers.hpp"
#include "optbench/search.hpp"
#include "optbench/tasks.hpp"

namespace optbench {

// One successive-halving rung: n trials, each run through r epochs total.
struct Rung {
  int n = 0;
  int r = 0;
  bool operator==(const Rung&) const = default;
};

struct BracketPlan {
  int s = 0;  // bracket index
  int n = 0;  // initial configurations
  int r = 0;  // initial resource in epochs
  std::vector<Rung> rungs;
  bool operator==(const BracketPlan&) const = default;
};

// Brackets for s = s_max down to 0. Fractional rung resources are rounded up
// so every rung trains at least one whole epoch.
std::vector<BracketPlan> plan_brackets(int R, int eta);

enum class TrialStatus { running, stopped, diverged, completed };

// Resumable trial snapshot: parameters plus optimizer state. Batch order is
// a pure function of (task seed, epoch), so nothing else needs saving.
struct Checkpoint {
  ParamVector theta;
  OptState state;
};

struct TrialRecord {
  int id = 0;
  Rule rule = Rule::sgdm;
  Hyperparams config;
  int epochs_run = 0;
  std::vector<double> val_metrics;  // one per epoch
  std::optional<Checkpoint> checkpoint;
  TrialStatus status = TrialStatus::running;
};

// Streaming observer for tuner execution; epochs arrive in the deterministic
// sequential execution order.
class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void on_config_sampled(const TrialRecord&) {}
  virtual void on_epoch(int trial_id, long cumulative_epoch, int trial_epoch,
                        double metric) {}
  virtual void on_rung(int bracket_s, int rung_i, int n_i, int r_i) {}
  virtual void on_divergence(int trial_id, int trial_epoch) {}
};

// Trains the trial through epoch target_epochs, resuming from its checkpoint.
// Diverged trials freeze at the task's worst metric. Returns the number of
// epochs actually trained (resource consumed).
int run_trial_to(TrialRecord& trial, const Task& task, int target_epochs,
                 EventSink* sink = nullptr, long* cumulative_epoch = nullptr);

// Indices of the k best trials by ranking loss (lower is better); ties go to
// the lower index.
std::vector<int> top_k(const std::vector<double>& losses, int k);

// Lower-is-better ranking value for a trial's latest validation metric.
double ranking_loss(const TrialRecord& trial, MetricDirection dir);

struct TunerSettings {
  TuningMode mode = TuningMode::lr_only;
  bool tune_gamma = false;
  SearchSpace space;
};

struct TunerResult {
  Hyperparams best_config;
  double best_loss = 0.0;       // ranking-loss scale
  double best_metric = 0.0;     // task metric scale
  long total_epochs = 0;        // resource ledger
  long configs_sampled = 0;
  std::vector<TrialRecord> trials;
};

// Repeats whole Hyperband executions until the cumulative count of sampled
// configurations reaches n_c, finishing the final pass.
TunerResult run_hyperband(const Task& task, Rule rule,
                          const TunerSettings& settings, int R, int eta,
                          int n_c, std::uint64_t seed,
                          EventSink* sink = nullptr);

// Baseline: n_configs random configurations, each trained the full R epochs.
TunerResult run_random_search(const Task& task, Rule rule,
                              const TunerSettings& settings, int n_configs,
                              int R, std::uint64_t seed,
                              EventSink* sink = nullptr);

}  // namespace optbench
