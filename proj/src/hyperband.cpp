#include "optbench/hyperband.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace optbench {

namespace {

long ipow(int base, int exp) {
  long v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

long ceil_div(long a, long b) { return (a + b - 1) / b; }

}  // namespace

std::vector<BracketPlan> plan_brackets(int R, int eta) {
  if (R < 1) throw std::invalid_argument("plan_brackets: R must be >= 1");
  if (eta < 2) throw std::invalid_argument("plan_brackets: eta must be >= 2");
  int s_max = 0;
  while (ipow(eta, s_max + 1) <= R) ++s_max;
  std::vector<BracketPlan> plans;
  for (int s = s_max; s >= 0; --s) {
    BracketPlan p;
    p.s = s;
    p.n = static_cast<int>(ceil_div((s_max + 1) * ipow(eta, s), s + 1));
    p.r = static_cast<int>(ceil_div(R, ipow(eta, s)));
    for (int i = 0; i <= s; ++i) {
      Rung rung;
      rung.n = static_cast<int>(p.n / ipow(eta, i));
      rung.r = static_cast<int>(ceil_div(R, ipow(eta, s - i)));
      p.rungs.push_back(rung);
    }
    plans.push_back(std::move(p));
  }
  return plans;
}

int run_trial_to(TrialRecord& trial, const Task& task, int target_epochs,
                 EventSink* sink, long* cumulative_epoch) {
  if (target_epochs < trial.epochs_run)
    throw std::invalid_argument("run_trial_to: target below epochs already run");
  if (target_epochs == trial.epochs_run) return 0;

  auto emit = [&](int trial_epoch, double metric) {
    trial.val_metrics.push_back(metric);
    if (sink != nullptr && cumulative_epoch != nullptr)
      sink->on_epoch(trial.id, ++*cumulative_epoch, trial_epoch, metric);
    else if (cumulative_epoch != nullptr)
      ++*cumulative_epoch;
  };

  int start = trial.epochs_run;
  if (trial.status == TrialStatus::diverged) {
    // Frozen at the worst metric; epochs still count as consumed resource.
    for (int e = start + 1; e <= target_epochs; ++e)
      emit(e, task.worst_metric());
    trial.epochs_run = target_epochs;
    return target_epochs - start;
  }

  if (trial.epochs_run == 0 && !trial.checkpoint) {
    Checkpoint ck;
    ck.theta = task.initial_params();
    OptimizerSpec spec{trial.rule, trial.config};
    ck.state = OptState::init(spec, ck.theta);
    trial.checkpoint = std::move(ck);
  }
  if (!trial.checkpoint)
    throw std::logic_error("run_trial_to: missing checkpoint for resumed trial");

  OptimizerSpec spec{trial.rule, trial.config};
  Checkpoint& ck = *trial.checkpoint;
  const long horizon =
      static_cast<long>(target_epochs) * task.epoch_length();

  for (int e = start + 1; e <= target_epochs; ++e) {
    bool diverged = false;
    for (const Batch& batch : task.epoch_batches(e)) {
      auto loss = eval_loss(task, ck.theta, batch);
      std::optional<ParamVector> g;
      if (loss) g = eval_grad(task, ck.theta, batch);
      if (!loss || !g ||
          !step(spec, ck.state, ck.theta, *g, ck.state.t + 1, horizon)) {
        diverged = true;
        break;
      }
    }
    std::optional<double> metric;
    if (!diverged) metric = eval_metric(task, ck.theta, Split::validation);
    if (!metric) {
      trial.status = TrialStatus::diverged;
      trial.checkpoint.reset();
      if (sink != nullptr) sink->on_divergence(trial.id, e);
      for (int f = e; f <= target_epochs; ++f) emit(f, task.worst_metric());
      trial.epochs_run = target_epochs;
      return target_epochs - start;
    }
    emit(e, *metric);
  }
  trial.epochs_run = target_epochs;
  trial.status = TrialStatus::stopped;
  return target_epochs - start;
}

std::vector<int> top_k(const std::vector<double>& losses, int k) {
  if (k > static_cast<int>(losses.size()))
    throw std::invalid_argument("top_k: k exceeds trial count");
  std::vector<int> order(losses.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return losses[a] < losses[b]; });
  order.resize(k);
  return order;
}

double ranking_loss(const TrialRecord& trial, MetricDirection dir) {
  if (trial.status == TrialStatus::diverged || trial.val_metrics.empty())
    return std::numeric_limits<double>::infinity();
  double m = trial.val_metrics.back();
  return dir == MetricDirection::lower_better ? m : -m;
}

namespace {

struct BestTracker {
  double loss = std::numeric_limits<double>::infinity();
  double metric = 0.0;
  Hyperparams config;

  void consider(const TrialRecord& t, MetricDirection dir) {
    if (t.status == TrialStatus::diverged) return;
    for (double m : t.val_metrics) {
      double l = dir == MetricDirection::lower_better ? m : -m;
      if (l < loss) {
        loss = l;
        metric = m;
        config = t.config;
      }
    }
  }
};

}  // namespace

TunerResult run_hyperband(const Task& task, Rule rule,
                          const TunerSettings& settings, int R, int eta,
                          int n_c, std::uint64_t seed, EventSink* sink) {
  if (n_c < 1) throw std::invalid_argument("run_hyperband: n_c must be >= 1");
  const auto plans = plan_brackets(R, eta);
  Rng rng(seed);
  TunerResult result;
  BestTracker best;
  long cum_epoch = 0;
  int next_id = 0;

  while (result.configs_sampled < n_c) {
    for (const BracketPlan& plan : plans) {
      std::vector<TrialRecord> trials(plan.n);
      for (int j = 0; j < plan.n; ++j) {
        trials[j].id = next_id++;
        trials[j].rule = rule;
        trials[j].config = sample_config(settings.space, settings.mode, rule,
                                         settings.tune_gamma, rng);
        if (sink != nullptr) sink->on_config_sampled(trials[j]);
      }
      result.configs_sampled += plan.n;

      std::vector<int> alive(plan.n);
      std::iota(alive.begin(), alive.end(), 0);
      for (std::size_t i = 0; i < plan.rungs.size(); ++i) {
        const Rung& rung = plan.rungs[i];
        for (int idx : alive)
          result.total_epochs +=
              run_trial_to(trials[idx], task, rung.r, sink, &cum_epoch);
        std::vector<double> losses;
        losses.reserve(alive.size());
        for (int idx : alive)
          losses.push_back(ranking_loss(trials[idx], task.metric_direction()));
        int k = rung.n / eta;
        auto keep = top_k(losses, std::min<int>(k, static_cast<int>(alive.size())));
        std::vector<int> next;
        next.reserve(keep.size());
        for (int pos : keep) next.push_back(alive[pos]);
        if (sink != nullptr) sink->on_rung(plan.s, static_cast<int>(i), rung.n, rung.r);
        alive = std::move(next);
      }
      for (auto& t : trials) {
        if (t.status != TrialStatus::diverged && t.epochs_run >= R)
          t.status = TrialStatus::completed;
        best.consider(t, task.metric_direction());
        result.trials.push_back(std::move(t));
      }
    }
  }
  result.best_config = best.config;
  result.best_loss = best.loss;
  result.best_metric = best.metric;
  return result;
}

TunerResult run_random_search(const Task& task, Rule rule,
                              const TunerSettings& settings, int n_configs,
                              int R, std::uint64_t seed, EventSink* sink) {
  if (n_configs < 1)
    throw std::invalid_argument("run_random_search: n_configs must be >= 1");
  Rng rng(seed);
  TunerResult result;
  BestTracker best;
  long cum_epoch = 0;
  for (int j = 0; j < n_configs; ++j) {
    TrialRecord trial;
    trial.id = j;
    trial.rule = rule;
    trial.config = sample_config(settings.space, settings.mode, rule,
                                 settings.tune_gamma, rng);
    if (sink != nullptr) sink->on_config_sampled(trial);
    result.total_epochs += run_trial_to(trial, task, R, sink, &cum_epoch);
    if (trial.status != TrialStatus::diverged) trial.status = TrialStatus::completed;
    best.consider(trial, task.metric_direction());
    result.trials.push_back(std::move(trial));
  }
  result.configs_sampled = n_configs;
  result.best_config = best.config;
  result.best_loss = best.loss;
  result.best_metric = best.metric;
  return result;
}

}  // namespace optbench
