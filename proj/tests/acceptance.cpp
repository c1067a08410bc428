// Acceptance suite: eight independent checks, one PASS/FAIL line each.
// Exit code 0 only when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <unistd.h>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "optbench/hyperband.hpp"
#include "optbench/io.hpp"
#include "optbench/metrics.hpp"
#include "optbench/optimizers.hpp"
#include "optbench/protocols.hpp"
#include "optbench/rng.hpp"
#include "optbench/table_oracle.hpp"
#include "optbench/tasks.hpp"

using namespace optbench;
namespace fs = std::filesystem;

namespace {

struct Failure {
  std::string detail;
};

std::vector<std::string> g_notes;

void note(const std::string& s) { g_notes.push_back(s); }

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

// --- 1: update rules match independent straight-line transcriptions --------

void criterion_conformance() {
  ParamVector theta;
  theta.layers = {{0.5, -1.2, 2.0}, {0.7, 0.1}};
  Rng rng(1234);
  std::vector<ParamVector> grads;
  for (int t = 0; t < 10; ++t) {
    ParamVector g = ParamVector::zeros_like(theta);
    for (auto& l : g.layers)
      for (auto& x : l) x = rng.normal();
    grads.push_back(std::move(g));
  }
  for (Rule rule : all_rules()) {
    Hyperparams w;
    w.alpha0 = 0.05;
    w.mu = 0.8;
    auto expected = oracle::run_reference(rule, w, theta, grads, 10);
    OptimizerSpec spec{rule, w};
    ParamVector th = theta;
    OptState state = OptState::init(spec, th);
    for (long t = 1; t <= 10; ++t) {
      expect(step(spec, state, th, grads[t - 1], t, 10),
             std::string(rule_name(rule)) + ": step rejected a finite gradient");
      for (std::size_t l = 0; l < th.layers.size(); ++l)
        for (std::size_t i = 0; i < th.layers[l].size(); ++i)
          expect(std::abs(th.layers[l][i] -
                          expected[t - 1].layers[l][i]) <= 1e-12,
                 std::string(rule_name(rule)) + ": deviation at step " +
                     std::to_string(t));
    }
  }
  note("7 rules x 10 steps within 1e-12 of the reference transcriptions");
}

// --- 2: analytic gradients agree with central finite differences -----------

void criterion_gradients() {
  struct Entry {
    TaskPtr task;
    double tol;
  };
  std::vector<Entry> entries = {
      {make_quadratic(6, 40.0, 11), 1e-6},
      {make_logreg(180, 5, 3, 12), 1e-5},
      {make_mlp(150, 4, 6, 3, 13), 1e-4},
      {make_synthetic_landscape(14), 1e-6},
  };
  for (const auto& [task, tol] : entries) {
    Rng rng(hash_mix(task->seed(), 0xacce9791));
    auto batches = task->epoch_batches(1);
    for (int p = 0; p < 20; ++p) {
      ParamVector theta = task->initial_params();
      for (auto& l : theta.layers)
        for (auto& x : l) x += 0.3 * rng.normal();
      const Batch& batch = batches[p % batches.size()];
      ParamVector g = task->grad(theta, batch);
      ParamVector fd = finite_diff_grad(*task, theta, batch, 1e-6);
      for (std::size_t l = 0; l < g.layers.size(); ++l)
        for (std::size_t i = 0; i < g.layers[l].size(); ++i)
          expect(std::abs(g.layers[l][i] - fd.layers[l][i]) <= tol,
                 task->name() + ": gradient mismatch at point " +
                     std::to_string(p));
    }
  }
  note("4 tasks x 20 points, analytic vs finite differences");
}

// --- 3: bracket arithmetic vs a brute-force rederivation -------------------

void criterion_brackets() {
  for (int R = 1; R <= 243; ++R) {
    for (int eta : {2, 3, 4}) {
      auto plans = plan_brackets(R, eta);
      int s_max = static_cast<int>(
          std::floor(std::log(double(R)) / std::log(double(eta)) + 1e-9));
      expect(static_cast<int>(plans.size()) == s_max + 1,
             "bracket count mismatch at R=" + std::to_string(R));
      for (int s = s_max; s >= 0; --s) {
        const BracketPlan& p = plans[s_max - s];
        double n = std::ceil((s_max + 1) * std::pow(double(eta), s) /
                                 (s + 1) - 1e-9);
        expect(p.s == s && p.n == static_cast<int>(n),
               "initial n mismatch at R=" + std::to_string(R) +
                   " s=" + std::to_string(s));
        for (int i = 0; i <= s; ++i) {
          int ni = static_cast<int>(
              std::floor(n / std::pow(double(eta), i) + 1e-9));
          int ri = static_cast<int>(
              std::ceil(double(R) / std::pow(double(eta), s - i) - 1e-9));
          expect(p.rungs[i].n == ni && p.rungs[i].r == ri,
                 "rung mismatch at R=" + std::to_string(R) +
                     " s=" + std::to_string(s) + " i=" + std::to_string(i));
        }
      }
    }
  }
  auto p = plan_brackets(81, 3);
  std::vector<Rung> expected = {{81, 1}, {27, 3}, {9, 9}, {3, 27}, {1, 81}};
  expect(p[0].rungs == expected, "R=81 eta=3 rung table mismatch");
  note("R in 1..243, eta in {2,3,4}, plus the R=81 rung table");
}

// --- 4: checkpoint resume is bit-identical -------------------------------

void criterion_resume() {
  auto task = make_logreg(160, 5, 3, 2024);
  for (Rule rule : all_rules()) {
    Hyperparams w;
    w.alpha0 = 0.05;
    w.mu = 0.5;
    TrialRecord straight;
    straight.rule = rule;
    straight.config = w;
    run_trial_to(straight, *task, 9);

    TrialRecord resumed;
    resumed.rule = rule;
    resumed.config = w;
    run_trial_to(resumed, *task, 3);
    run_trial_to(resumed, *task, 9);

    expect(straight.checkpoint && resumed.checkpoint,
           std::string(rule_name(rule)) + ": diverged during resume check");
    expect(straight.checkpoint->theta == resumed.checkpoint->theta &&
               straight.checkpoint->state == resumed.checkpoint->state &&
               straight.val_metrics == resumed.val_metrics,
           std::string(rule_name(rule)) + ": resume 3->9 differs from 9");
  }
  note("all 7 rules, pause at 3 epochs and extend to 9, bitwise equal");
}

// --- 5: scoring pipeline ---------------------------------------------------

void criterion_scoring() {
  Trajectory t;
  t.values = {1.0, 2.0, 3.0};
  expect(std::abs(cpe(t) - 10.0 / 6.0) < 1e-12, "CPE of [1,2,3]");
  Trajectory c;
  c.values = {0.7, 0.7, 0.7, 0.7};
  expect(std::abs(cpe(c) - 0.7) < 1e-12, "constant-trajectory CPE");
  auto w = cpe_weights(5);
  double sum = 0.0;
  for (double x : w) sum += x;
  expect(std::abs(sum - 1.0) < 1e-12, "CPE weights do not sum to 1");
  for (std::size_t i = 1; i < w.size(); ++i)
    expect(w[i] < w[i - 1], "CPE weights are not decreasing");

  ProfileTable table;
  table.optimizers = {"lars", "adam"};
  table.tasks = {"fixture"};
  table.task_direction = {MetricDirection::higher_better};
  table.cpe = {{67.48, 65.88}};
  auto ratios = perf_ratios(table);
  expect(std::abs(ratios[0][0] - 1.0) < 1e-12, "best ratio is not 1");
  expect(std::abs(ratios[0][1] - 1.0243) < 1e-4,
         "fixture ratio 67.48/65.88 off");

  auto grid = default_tau_grid();
  auto rho = perf_profile({{1.0}, {1.1}}, grid);
  expect(std::abs(rho[0][5] - 0.5) < 1e-12 && rho[0].back() == 1.0,
         "profile values off");
  for (std::size_t i = 1; i < rho[0].size(); ++i)
    expect(rho[0][i] >= rho[0][i - 1], "profile not nondecreasing");
  note("CPE examples, reference ratio fixture, profile monotonicity");
}

// --- 6: tuned search beats equal-budget random search on the landscape -----

void criterion_landscape() {
  const int R = 27, eta = 3, n_c = 49;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto task = make_synthetic_landscape(seed);
    TunerSettings settings;
    auto hb = run_hyperband(*task, Rule::sgdm, settings, R, eta, n_c,
                            hash_mix(seed, 0x6a6a));
    auto rs = run_random_search(*task, Rule::sgdm, settings, n_c, R,
                                hash_mix(seed, 0x7b7b));
    expect(hb.best_metric >= 0.98,
           "seed " + std::to_string(seed) + ": tuned metric " +
               std::to_string(hb.best_metric) + " below 0.98");
    expect(hb.total_epochs < rs.total_epochs,
           "seed " + std::to_string(seed) + ": no budget advantage");
  }
  note("5 seeds, tuned metric >= 0.98 at a strictly smaller epoch budget");
}

// --- 7: end-to-end protocol is monotone, consistent, and reproducible ------

nlohmann::json e2e_config(const fs::path& out) {
  return {
      {"format_version", 1},
      {"protocol", "end2end"},
      {"optimizers",
       {"sgdm", "adam", "radam", "yogi", "lars", "lamb", "lookahead"}},
      {"tasks",
       {{{"type", "logreg"}, {"seed", 7}, {"dim", 5}, {"n_samples", 200},
         {"n_classes", 3}}}},
      {"mode", "lr_only"},
      {"repetitions", 3},
      {"hyperband", {{"R", 27}, {"eta", 3}, {"n_c", 49}}},
      {"master_seed", 2718},
      {"output_dir", out.string()},
  };
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_end_to_end(const fs::path& scratch) {
  fs::path out1 = scratch / "e2e_a";
  fs::path out2 = scratch / "e2e_b";
  for (const fs::path& out : {out1, out2}) {
    fs::path cfg = scratch / (out.filename().string() + ".json");
    std::ofstream(cfg) << e2e_config(out).dump(2) << "\n";
    expect(cmd_bench(cfg.string()) == 0, "bench run failed");
  }
  for (const char* f : {"trajectory.csv", "cpe_summary.csv", "results.jsonl"})
    expect(slurp(out1 / f) == slurp(out2 / f),
           std::string(f) + " differs between identical runs");

  // Trajectories are best-so-far on an accuracy task: nondecreasing.
  std::ifstream traj(out1 / "trajectory.csv");
  std::string line;
  std::getline(traj, line);  // header
  std::map<std::string, double> last;
  int rows = 0;
  while (std::getline(traj, line)) {
    std::stringstream ss(line);
    std::string opt, task, rep, epoch, value;
    std::getline(ss, opt, ',');
    std::getline(ss, task, ',');
    std::getline(ss, rep, ',');
    std::getline(ss, epoch, ',');
    std::getline(ss, value, ',');
    std::string key = opt + "/" + rep;
    double v = std::stod(value);
    if (last.count(key))
      expect(v >= last[key], "trajectory decreases for " + key);
    last[key] = v;
    ++rows;
  }
  expect(last.size() == 7 * 3, "expected 21 optimizer/rep trajectories");
  expect(rows > 0, "empty trajectory file");

  int cells = 0;
  for (const auto& r : read_results((out1 / "results.jsonl").string())) {
    if (r.value("kind", "") != "cell_summary") continue;
    ++cells;
    auto cpes = r.at("cpes").get<std::vector<double>>();
    auto peaks = r.at("peaks").get<std::vector<double>>();
    expect(cpes.size() == 3 && peaks.size() == 3, "expected 3 repetitions");
    for (std::size_t i = 0; i < cpes.size(); ++i)
      expect(cpes[i] <= peaks[i] + 1e-12, "CPE exceeds peak in " +
                                              r.at("optimizer").get<std::string>());
  }
  expect(cells == 7, "expected 7 cell summaries");
  note("7 optimizers x 3 reps, monotone curves, CPE <= peak, "
       "byte-identical rerun");
}

// --- 8: data-addition protocol --------------------------------------------

void criterion_data_addition() {
  auto logreg = make_logreg(1000, 5, 2, 55);
  auto [partial, full] = split_dataset(logreg, 0.3);
  expect(partial->full_train_batch().indices.size() == 300,
         "stratified subset of 1000 at delta 0.3 is not 300 samples");
  auto mlp = make_mlp(300, 4, 6, 3, 56);
  auto [mp, mf] = split_dataset(mlp, 0.3);
  expect(mp->full_train_batch().indices.size() == 90,
         "stratified subset of 300 at delta 0.3 is not 90 samples");

  std::vector<TaskEntry> tasks = {{logreg, false}, {mlp, false}};
  std::vector<Rule> rules = {Rule::sgdm, Rule::adam, Rule::yogi};
  auto res = run_data_addition(tasks, rules, 2, 9, 3, 14, 0.3, 909);
  expect(res.per_task.size() == 2, "expected results for 2 tasks");
  for (const auto& tr : res.per_task) {
    expect(tr.cells.size() == 3, tr.task + ": expected 3 optimizers");
    expect(tr.kendall >= -1.0 && tr.kendall <= 1.0,
           tr.task + ": Kendall tau out of range");
    std::vector<int> sorted = tr.rank_partial;
    std::sort(sorted.begin(), sorted.end());
    expect(sorted == std::vector<int>{0, 1, 2},
           tr.task + ": ranks are not a permutation");
    for (const auto& cell : tr.cells)
      expect(cell.partial_curve.size() == 9 && cell.full_curve.size() == 9,
             tr.task + "/" + cell.optimizer + ": wrong curve length");
  }

  std::vector<TaskEntry> small = {{make_logreg(120, 4, 2, 57), false}};
  auto same = run_data_addition(small, {Rule::adam}, 1, 5, 3, 4, 1.0, 311);
  expect(same.per_task[0].cells[0].partial_curve ==
             same.per_task[0].cells[0].full_curve,
         "delta=1 curves are not identical");
  note("delta=0.3 stratified counts exact, tau reported, delta=1 curves equal");
}

}  // namespace

int main() {
  fs::path scratch =
      fs::temp_directory_path() /
      ("optbench_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(scratch);

  struct Criterion {
    const char* name;
    std::function<void()> run;
  };
  std::vector<Criterion> criteria = {
      {"update-rule conformance", criterion_conformance},
      {"gradient oracles", criterion_gradients},
      {"bracket arithmetic", criterion_brackets},
      {"checkpoint resume", criterion_resume},
      {"scoring pipeline", criterion_scoring},
      {"tuning efficiency on the landscape", criterion_landscape},
      {"end-to-end protocol",
       [&scratch] { criterion_end_to_end(scratch); }},
      {"data-addition protocol", criterion_data_addition},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    g_notes.clear();
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      criteria[i].run();
    } catch (const Failure& f) {
      ok = false;
      detail = f.detail;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("unexpected exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    if (!ok) ++failures;
    std::printf("[%zu/8] %s: %s (%.2fs)%s%s\n", i + 1, criteria[i].name,
                ok ? "PASS" : "FAIL", secs,
                ok ? (g_notes.empty() ? "" : " - ") : " - ",
                ok ? (g_notes.empty() ? "" : g_notes.back().c_str())
                   : detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(scratch);
  if (failures > 0) {
    std::printf("acceptance: %d of 8 criteria failed\n", failures);
    return 1;
  }
  std::printf("acceptance: all 8 criteria passed\n");
  return 0;
}
