#include "optbench/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "optbench/rng.hpp"
#include "optbench/table_oracle.hpp"

namespace optbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& ctx) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.contains(it.key()))
      throw std::invalid_argument("config: unknown key '" + it.key() +
                                  "' in " + ctx);
}

}  // namespace

RunConfig config_from_json(const json& j) {
  check_keys(j,
             {"format_version", "protocol", "optimizers", "tasks", "mode",
              "repetitions", "hyperband", "delta", "master_seed",
              "output_dir"},
             "top level");
  RunConfig cfg;
  cfg.format_version = j.at("format_version").get<int>();
  if (cfg.format_version != kConfigFormatVersion)
    throw std::invalid_argument(
        "config: unsupported format_version " +
        std::to_string(cfg.format_version) + " (expected " +
        std::to_string(kConfigFormatVersion) + ")");
  cfg.protocol = j.at("protocol").get<std::string>();
  if (cfg.protocol != "end2end" && cfg.protocol != "data_addition" &&
      cfg.protocol != "verify")
    throw std::invalid_argument("config: unknown protocol '" + cfg.protocol +
                                "'");
  if (cfg.protocol == "verify") {
    // verify ignores the run sections but tolerates their presence.
    return cfg;
  }
  for (const auto& name : j.at("optimizers")) {
    rule_from_name(name.get<std::string>());  // validates
    cfg.optimizers.push_back(name.get<std::string>());
  }
  if (cfg.optimizers.empty())
    throw std::invalid_argument("config: 'optimizers' must be non-empty");
  for (const auto& tj : j.at("tasks")) {
    check_keys(tj,
               {"type", "seed", "dim", "condition_number", "n_samples",
                "n_classes", "hidden", "tune_gamma"},
               "task entry");
    TaskConfig tc;
    tc.type = tj.at("type").get<std::string>();
    if (tj.contains("seed")) tc.seed = tj.at("seed").get<std::uint64_t>();
    if (tj.contains("dim")) tc.dim = tj.at("dim").get<int>();
    if (tj.contains("condition_number"))
      tc.condition_number = tj.at("condition_number").get<double>();
    if (tj.contains("n_samples")) tc.n_samples = tj.at("n_samples").get<int>();
    if (tj.contains("n_classes")) tc.n_classes = tj.at("n_classes").get<int>();
    if (tj.contains("hidden")) tc.hidden = tj.at("hidden").get<int>();
    if (tj.contains("tune_gamma"))
      tc.tune_gamma = tj.at("tune_gamma").get<bool>();
    cfg.tasks.push_back(std::move(tc));
  }
  if (cfg.tasks.empty())
    throw std::invalid_argument("config: 'tasks' must be non-empty");
  if (j.contains("mode")) {
    cfg.mode = j.at("mode").get<std::string>();
    tuning_mode_from_name(cfg.mode);  // validates
  }
  if (j.contains("repetitions")) cfg.repetitions = j.at("repetitions").get<int>();
  if (cfg.repetitions < 1)
    throw std::invalid_argument("config: 'repetitions' must be >= 1");
  const auto& hb = j.at("hyperband");
  check_keys(hb, {"R", "eta", "n_c"}, "hyperband");
  cfg.R = hb.at("R").get<int>();
  cfg.eta = hb.at("eta").get<int>();
  cfg.n_c = hb.at("n_c").get<int>();
  if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
  if (!(cfg.delta > 0.0 && cfg.delta <= 1.0))
    throw std::invalid_argument("config: 'delta' must be in (0,1]");
  cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("output_dir"))
    cfg.output_dir = j.at("output_dir").get<std::string>();
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  json tasks = json::array();
  for (const auto& tc : cfg.tasks) {
    tasks.push_back({{"type", tc.type},
                     {"seed", tc.seed},
                     {"dim", tc.dim},
                     {"condition_number", tc.condition_number},
                     {"n_samples", tc.n_samples},
                     {"n_classes", tc.n_classes},
                     {"hidden", tc.hidden},
                     {"tune_gamma", tc.tune_gamma}});
  }
  return {{"format_version", cfg.format_version},
          {"protocol", cfg.protocol},
          {"optimizers", cfg.optimizers},
          {"tasks", tasks},
          {"mode", cfg.mode},
          {"repetitions", cfg.repetitions},
          {"hyperband", {{"R", cfg.R}, {"eta", cfg.eta}, {"n_c", cfg.n_c}}},
          {"delta", cfg.delta},
          {"master_seed", cfg.master_seed},
          {"output_dir", cfg.output_dir}};
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config parse error in " + path + ": " +
                                e.what());
  }
  return config_from_json(j);
}

TaskEntry build_task(const TaskConfig& tc) {
  TaskEntry e;
  e.tune_gamma = tc.tune_gamma;
  if (tc.type == "quadratic")
    e.task = make_quadratic(tc.dim, tc.condition_number, tc.seed);
  else if (tc.type == "logreg")
    e.task = make_logreg(tc.n_samples, tc.dim, tc.n_classes, tc.seed);
  else if (tc.type == "mlp")
    e.task = make_mlp(tc.n_samples, tc.dim, tc.hidden, tc.n_classes, tc.seed);
  else if (tc.type == "landscape")
    e.task = make_synthetic_landscape(tc.seed);
  else
    throw std::invalid_argument("config: unknown task type '" + tc.type + "'");
  return e;
}

json hyperparams_to_json(const Hyperparams& w) {
  return {{"alpha0", w.alpha0},
          {"mu", w.mu},
          {"beta1", w.beta1},
          {"beta2", w.beta2},
          {"eps", w.eps},
          {"gamma", w.gamma},
          {"schedule", w.schedule == Schedule::constant ? "constant"
                                                        : "linear_decay"},
          {"lookahead_k", w.lookahead_k},
          {"lookahead_alpha_s", w.lookahead_alpha_s}};
}

Hyperparams hyperparams_from_json(const json& j) {
  Hyperparams w;
  w.alpha0 = j.at("alpha0").get<double>();
  w.mu = j.at("mu").get<double>();
  w.beta1 = j.at("beta1").get<double>();
  w.beta2 = j.at("beta2").get<double>();
  w.eps = j.at("eps").get<double>();
  w.gamma = j.at("gamma").get<double>();
  w.schedule = j.at("schedule").get<std::string>() == "constant"
                   ? Schedule::constant
                   : Schedule::linear_decay;
  w.lookahead_k = j.at("lookahead_k").get<int>();
  w.lookahead_alpha_s = j.at("lookahead_alpha_s").get<double>();
  return w;
}

ResultsLog::ResultsLog(const std::string& path) : out_(path) {
  if (!out_) throw std::runtime_error("cannot open results log: " + path);
}

void ResultsLog::append(const json& record) {
  out_ << record.dump() << "\n";
  if (!out_) throw std::runtime_error("results log write failed");
  out_.flush();
}

std::vector<json> read_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results file: " + path);
  std::vector<json> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      records.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw std::runtime_error("truncated or corrupt results log at line " +
                               std::to_string(lineno) + ": " + e.what());
    }
  }
  if (records.empty() || records.front().value("kind", "") != "header")
    throw std::runtime_error("results log missing header record");
  return records;
}

namespace {

// Streams tuner events into the results log with cell context attached.
class LogSink final : public EventSink {
 public:
  LogSink(ResultsLog& log, std::string optimizer, std::string task, int rep)
      : log_(log),
        optimizer_(std::move(optimizer)),
        task_(std::move(task)),
        rep_(rep) {}

  void on_config_sampled(const TrialRecord& t) override {
    log_.append({{"kind", "config_sampled"},
                 {"optimizer", optimizer_},
                 {"task", task_},
                 {"rep", rep_},
                 {"trial", t.id},
                 {"omega", hyperparams_to_json(t.config)}});
  }
  void on_epoch(int trial_id, long cum, int trial_epoch,
                double metric) override {
    log_.append({{"kind", "epoch"},
                 {"optimizer", optimizer_},
                 {"task", task_},
                 {"rep", rep_},
                 {"trial", trial_id},
                 {"cum_epoch", cum},
                 {"trial_epoch", trial_epoch},
                 {"metric", metric}});
  }
  void on_rung(int s, int i, int n, int r) override {
    log_.append({{"kind", "rung"},
                 {"optimizer", optimizer_},
                 {"task", task_},
                 {"rep", rep_},
                 {"s", s},
                 {"i", i},
                 {"n", n},
                 {"r", r}});
  }
  void on_divergence(int trial_id, int epoch) override {
    log_.append({{"kind", "divergence"},
                 {"optimizer", optimizer_},
                 {"task", task_},
                 {"rep", rep_},
                 {"trial", trial_id},
                 {"epoch", epoch}});
  }

 private:
  ResultsLog& log_;
  std::string optimizer_;
  std::string task_;
  int rep_;
};

const char* direction_name(MetricDirection d) {
  return d == MetricDirection::higher_better ? "higher_better" : "lower_better";
}

}  // namespace

int cmd_bench(const std::string& config_path,
              const std::string& output_override) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (cfg.protocol == "verify") return cmd_verify();
  try {
    if (!output_override.empty()) cfg.output_dir = output_override;
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    ResultsLog log((dir / "results.jsonl").string());
    json header_cfg = config_to_json(cfg);
    header_cfg.erase("output_dir");  // environment detail, not a run parameter
    log.append({{"kind", "header"},
                {"version", kConfigFormatVersion},
                {"config", header_cfg}});

    std::vector<TaskEntry> tasks;
    std::map<std::string, MetricDirection> dirs;
    for (const auto& tc : cfg.tasks) {
      tasks.push_back(build_task(tc));
      dirs[tasks.back().task->name()] = tasks.back().task->metric_direction();
    }
    std::vector<Rule> rules;
    for (const auto& name : cfg.optimizers) rules.push_back(rule_from_name(name));

    SinkFactory factory = [&log](const std::string& opt, const std::string& task,
                                 int rep) -> std::unique_ptr<EventSink> {
      return std::make_unique<LogSink>(log, opt, task, rep);
    };

    if (cfg.protocol == "end2end") {
      auto result =
          run_end_to_end(tasks, rules, tuning_mode_from_name(cfg.mode),
                         cfg.repetitions, cfg.R, cfg.eta, cfg.n_c,
                         cfg.master_seed, factory);
      std::ofstream traj(dir / "trajectory.csv");
      traj << "optimizer,task,rep,epoch,best_so_far\n";
      std::ofstream summary(dir / "cpe_summary.csv");
      summary << "optimizer,task,mode,mean_cpe,std_cpe,mean_peak,std_peak\n";
      for (const auto& cell : result.cells) {
        for (std::size_t rep = 0; rep < cell.trajectories.size(); ++rep) {
          const auto& tr = cell.trajectories[rep];
          for (int e = 0; e < tr.length(); ++e)
            traj << cell.optimizer << "," << cell.task << "," << rep << ","
                 << (e + 1) << "," << fmt_double(tr.values[e]) << "\n";
        }
        summary << cell.optimizer << "," << cell.task << "," << cfg.mode << ","
                << fmt_double(cell.mean_cpe) << "," << fmt_double(cell.std_cpe)
                << "," << fmt_double(cell.mean_peak) << ","
                << fmt_double(cell.std_peak) << "\n";
        log.append({{"kind", "cell_summary"},
                    {"protocol", "end2end"},
                    {"optimizer", cell.optimizer},
                    {"task", cell.task},
                    {"mode", cfg.mode},
                    {"direction", direction_name(dirs.at(cell.task))},
                    {"cpes", cell.cpes},
                    {"peaks", cell.peaks},
                    {"mean_cpe", cell.mean_cpe},
                    {"std_cpe", cell.std_cpe},
                    {"mean_peak", cell.mean_peak},
                    {"std_peak", cell.std_peak}});
      }
    } else {
      auto result = run_data_addition(tasks, rules, cfg.repetitions, cfg.R,
                                      cfg.eta, cfg.n_c, cfg.delta,
                                      cfg.master_seed, factory);
      std::ofstream curves(dir / "curves.csv");
      curves << "optimizer,task,split,epoch,metric\n";
      std::ofstream summary(dir / "data_addition_summary.csv");
      summary << "task,optimizer,partial_cpe,full_cpe,rank_partial,rank_full,"
                 "kendall\n";
      for (const auto& tr : result.per_task) {
        for (std::size_t o = 0; o < tr.cells.size(); ++o) {
          const auto& cell = tr.cells[o];
          for (int e = 0; e < static_cast<int>(cell.partial_curve.size()); ++e)
            curves << cell.optimizer << "," << cell.task << ",partial,"
                   << (e + 1) << "," << fmt_double(cell.partial_curve[e])
                   << "\n";
          for (int e = 0; e < static_cast<int>(cell.full_curve.size()); ++e)
            curves << cell.optimizer << "," << cell.task << ",full," << (e + 1)
                   << "," << fmt_double(cell.full_curve[e]) << "\n";
          summary << cell.task << "," << cell.optimizer << ","
                  << fmt_double(cell.partial_cpe) << ","
                  << fmt_double(cell.full_cpe) << "," << tr.rank_partial[o]
                  << "," << tr.rank_full[o] << "," << fmt_double(tr.kendall)
                  << "\n";
          log.append({{"kind", "data_addition_cell"},
                      {"optimizer", cell.optimizer},
                      {"task", cell.task},
                      {"partial_cpe", cell.partial_cpe},
                      {"full_cpe", cell.full_cpe},
                      {"partial_curve", cell.partial_curve},
                      {"full_curve", cell.full_curve}});
        }
        log.append({{"kind", "data_addition_summary"},
                    {"task", tr.task},
                    {"kendall", tr.kendall},
                    {"rank_partial", tr.rank_partial},
                    {"rank_full", tr.rank_full}});
      }
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_report(const std::string& results_path, const std::string& kind,
               const std::string& out_dir) {
  try {
    auto records = read_results(results_path);
    fs::path dir(out_dir);
    fs::create_directories(dir);
    if (kind == "cpe_table" || kind == "peak_table") {
      std::ofstream out(dir / (kind + ".csv"));
      if (kind == "cpe_table")
        out << "optimizer,task,mode,mean_cpe,std_cpe,mean_peak\n";
      else
        out << "optimizer,task,mode,mean_peak,std_peak\n";
      bool any = false;
      for (const auto& r : records) {
        if (r.value("kind", "") != "cell_summary") continue;
        any = true;
        if (kind == "cpe_table")
          out << r.at("optimizer").get<std::string>() << ","
              << r.at("task").get<std::string>() << ","
              << r.at("mode").get<std::string>() << ","
              << fmt_double(r.at("mean_cpe").get<double>()) << ","
              << fmt_double(r.at("std_cpe").get<double>()) << ","
              << fmt_double(r.at("mean_peak").get<double>()) << "\n";
        else
          out << r.at("optimizer").get<std::string>() << ","
              << r.at("task").get<std::string>() << ","
              << r.at("mode").get<std::string>() << ","
              << fmt_double(r.at("mean_peak").get<double>()) << ","
              << fmt_double(r.at("std_peak").get<double>()) << "\n";
      }
      if (!any)
        throw std::runtime_error(
            "results log has no cell_summary records (incomplete run?)");
    } else if (kind == "profile") {
      // CPE table: tasks x optimizers.
      std::vector<std::string> opts, tasks;
      std::map<std::string, MetricDirection> dirn;
      std::map<std::pair<std::string, std::string>, double> cpes;
      for (const auto& r : records) {
        if (r.value("kind", "") != "cell_summary") continue;
        std::string o = r.at("optimizer"), a = r.at("task");
        if (std::find(opts.begin(), opts.end(), o) == opts.end())
          opts.push_back(o);
        if (std::find(tasks.begin(), tasks.end(), a) == tasks.end())
          tasks.push_back(a);
        dirn[a] = r.at("direction").get<std::string>() == "lower_better"
                      ? MetricDirection::lower_better
                      : MetricDirection::higher_better;
        cpes[{a, o}] = r.at("mean_cpe").get<double>();
      }
      if (opts.empty())
        throw std::runtime_error("results log has no cell_summary records");
      ProfileTable table;
      table.optimizers = opts;
      table.tasks = tasks;
      for (const auto& a : tasks) {
        table.task_direction.push_back(dirn[a]);
        std::vector<double> row;
        for (const auto& o : opts) {
          auto it = cpes.find({a, o});
          if (it == cpes.end())
            throw std::runtime_error("missing cell_summary for task '" + a +
                                     "', optimizer '" + o + "'");
          row.push_back(it->second);
        }
        table.cpe.push_back(std::move(row));
      }
      auto ratios = perf_ratios(table);
      auto grid = default_tau_grid();
      auto rho = perf_profile(ratios, grid);
      std::ofstream out(dir / "profile.csv");
      out << "optimizer,tau,rho\n";
      for (std::size_t o = 0; o < opts.size(); ++o)
        for (std::size_t t = 0; t < grid.size(); ++t)
          out << opts[o] << "," << fmt_double(grid[t]) << ","
              << fmt_double(rho[o][t]) << "\n";
    } else if (kind == "curves") {
      std::ofstream out(dir / "curves.csv");
      out << "optimizer,task,rep,trial,cum_epoch,trial_epoch,metric\n";
      for (const auto& r : records) {
        if (r.value("kind", "") != "epoch") continue;
        out << r.at("optimizer").get<std::string>() << ","
            << r.at("task").get<std::string>() << "," << r.at("rep").get<int>()
            << "," << r.at("trial").get<int>() << ","
            << r.at("cum_epoch").get<long>() << ","
            << r.at("trial_epoch").get<int>() << ","
            << fmt_double(r.at("metric").get<double>()) << "\n";
      }
    } else {
      std::cerr << "error: unknown report kind '" << kind << "'\n";
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace optbench
