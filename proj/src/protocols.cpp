#include "optbench/protocols.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "optbench/rng.hpp"

namespace optbench {

std::uint64_t derived_seed(std::uint64_t master, const std::string& optimizer,
                           int rep) {
  return hash_mix(hash_mix(master, hash_str(optimizer)),
                  static_cast<std::uint64_t>(rep));
}

namespace {

// Forwards tuner events while folding epochs into a best-so-far trajectory.
class TrajectorySink final : public EventSink {
 public:
  TrajectorySink(MetricDirection dir, EventSink* inner)
      : recorder_(dir), inner_(inner) {}

  void on_config_sampled(const TrialRecord& t) override {
    if (inner_ != nullptr) inner_->on_config_sampled(t);
  }
  void on_epoch(int trial_id, long cum, int trial_epoch,
                double metric) override {
    recorder_.record(cum, metric);
    if (inner_ != nullptr) inner_->on_epoch(trial_id, cum, trial_epoch, metric);
  }
  void on_rung(int s, int i, int n, int r) override {
    if (inner_ != nullptr) inner_->on_rung(s, i, n, r);
  }
  void on_divergence(int trial_id, int epoch) override {
    if (inner_ != nullptr) inner_->on_divergence(trial_id, epoch);
  }

  const Trajectory& trajectory() const { return recorder_.trajectory(); }

 private:
  TrajectoryRecorder recorder_;
  EventSink* inner_;
};

std::vector<int> rank_by_score(const std::vector<double>& scores) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  std::vector<int> rank(scores.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos)
    rank[order[pos]] = static_cast<int>(pos);
  return rank;
}

}  // namespace

EndToEndResult run_end_to_end(const std::vector<TaskEntry>& tasks,
                              const std::vector<Rule>& rules, TuningMode mode,
                              int M, int R, int eta, int n_c,
                              std::uint64_t master_seed,
                              const SinkFactory& sinks) {
  if (M < 1) throw std::invalid_argument("run_end_to_end: M must be >= 1");
  EndToEndResult result;
  for (const TaskEntry& entry : tasks) {
    const Task& task = *entry.task;
    for (Rule rule : rules) {
      EndToEndCell cell;
      cell.optimizer = rule_name(rule);
      cell.task = task.name();
      TunerSettings settings;
      settings.mode = mode;
      settings.tune_gamma = entry.tune_gamma;
      for (int rep = 0; rep < M; ++rep) {
        std::unique_ptr<EventSink> user;
        if (sinks) user = sinks(cell.optimizer, cell.task, rep);
        TrajectorySink sink(task.metric_direction(), user.get());
        std::uint64_t seed = derived_seed(master_seed, cell.optimizer, rep);
        run_hyperband(task, rule, settings, R, eta, n_c, seed, &sink);
        cell.trajectories.push_back(sink.trajectory());
        cell.cpes.push_back(cpe(sink.trajectory()));
        cell.peaks.push_back(peak(sink.trajectory()));
      }
      cell.mean_cpe = mean(cell.cpes);
      cell.std_cpe = stddev(cell.cpes);
      cell.mean_peak = mean(cell.peaks);
      cell.std_peak = stddev(cell.peaks);
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

std::pair<TaskPtr, TaskPtr> split_dataset(const TaskPtr& task, double delta) {
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("split_dataset: delta must be in (0,1]");
  return {task->stratified_subset(delta), task};
}

DataAdditionResult run_data_addition(const std::vector<TaskEntry>& tasks,
                                     const std::vector<Rule>& rules, int M,
                                     int R, int eta, int n_c, double delta,
                                     std::uint64_t master_seed,
                                     const SinkFactory& sinks) {
  if (M < 1) throw std::invalid_argument("run_data_addition: M must be >= 1");
  DataAdditionResult result;
  for (const TaskEntry& entry : tasks) {
    auto [partial, full] = split_dataset(entry.task, delta);
    DataAdditionTaskResult tr;
    tr.task = full->name();
    for (Rule rule : rules) {
      DataAdditionCell cell;
      cell.optimizer = rule_name(rule);
      cell.task = tr.task;
      cell.partial_curve.assign(R, 0.0);
      cell.full_curve.assign(R, 0.0);
      TunerSettings settings;
      settings.mode = TuningMode::full;  // all hyperparameters are tuned here
      settings.tune_gamma = entry.tune_gamma;
      for (int rep = 0; rep < M; ++rep) {
        std::unique_ptr<EventSink> user;
        if (sinks) user = sinks(cell.optimizer, cell.task, rep);
        std::uint64_t seed = derived_seed(master_seed, cell.optimizer, rep);
        TunerResult tuned = run_hyperband(*partial, rule, settings, R, eta, n_c,
                                          seed, user.get());
        cell.omega_partial.push_back(tuned.best_config);
        auto retrain = [&](const Task& t) {
          TrialRecord trial;
          trial.rule = rule;
          trial.config = tuned.best_config;
          run_trial_to(trial, t, R);
          return trial.val_metrics;  // raw per-epoch values
        };
        auto pc = retrain(*partial);
        auto fc = retrain(*full);
        for (int e = 0; e < R; ++e) {
          cell.partial_curve[e] += pc[e] / M;
          cell.full_curve[e] += fc[e] / M;
        }
      }
      Trajectory pt{cell.partial_curve, full->metric_direction()};
      Trajectory ft{cell.full_curve, full->metric_direction()};
      cell.partial_cpe = cpe(pt);
      cell.full_cpe = cpe(ft);
      tr.cells.push_back(std::move(cell));
    }
    std::vector<double> partial_scores, full_scores;
    for (const auto& c : tr.cells) {
      double sgn =
          full->metric_direction() == MetricDirection::higher_better ? 1.0
                                                                     : -1.0;
      partial_scores.push_back(sgn * c.partial_cpe);
      full_scores.push_back(sgn * c.full_cpe);
    }
    tr.rank_partial = rank_by_score(partial_scores);
    tr.rank_full = rank_by_score(full_scores);
    tr.kendall = tr.cells.size() >= 2
                     ? kendall_tau(partial_scores, full_scores)
                     : 1.0;
    result.per_task.push_back(std::move(tr));
  }
  return result;
}

}  // namespace optbench
