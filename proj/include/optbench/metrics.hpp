#pragma once

#include <string>
#include <vector>

#include "optbench/tasks.hpp"

namespace optbench {

// Best-so-far (or raw per-epoch) metric values, one per unit of consumed
// resource.
struct Trajectory {
  std::vector<double> values;
  MetricDirection direction = MetricDirection::higher_better;

  int length() const { return static_cast<int>(values.size()); }
};

// Single-writer best-so-far recorder; events must arrive in cumulative-epoch
// order (epoch = previous epoch + 1).
class TrajectoryRecorder {
 public:
  explicit TrajectoryRecorder(MetricDirection dir) { traj_.direction = dir; }

  // cumulative_epoch must equal the current length + 1.
  void record(long cumulative_epoch, double metric);

  const Trajectory& trajectory() const { return traj_; }

 private:
  Trajectory traj_;
};

// Early-emphasis weights: lambda_t proportional to (T - t + 1), normalized.
std::vector<double> cpe_weights(int T);

double cpe(const Trajectory& traj);
double peak(const Trajectory& traj);

// CPE values for |tasks| x |optimizers| cells plus each task's direction.
struct ProfileTable {
  std::vector<std::string> optimizers;
  std::vector<std::string> tasks;
  std::vector<MetricDirection> task_direction;       // per task
  std::vector<std::vector<double>> cpe;              // [task][optimizer]
};

// r_{o,a}: best CPE over CPE on higher-better tasks, CPE over best on
// lower-better ones; always >= 1.
std::vector<std::vector<double>> perf_ratios(const ProfileTable& table);

// rho_o(tau) = fraction of tasks with ratio <= tau; [optimizer][tau index].
std::vector<std::vector<double>> perf_profile(
    const std::vector<std::vector<double>>& ratios,
    const std::vector<double>& tau_grid);

std::vector<double> default_tau_grid();  // [1.0, 1.3] in steps of 0.01

double mean(const std::vector<double>& v);
double stddev(const std::vector<double>& v);

// Kendall rank correlation between two score vectors (pairwise concordance).
double kendall_tau(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace optbench
