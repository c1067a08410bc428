#include "optbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace optbench {

void TrajectoryRecorder::record(long cumulative_epoch, double metric) {
  long expected = static_cast<long>(traj_.values.size()) + 1;
  if (cumulative_epoch != expected)
    throw std::invalid_argument(
        "TrajectoryRecorder: out-of-order event (epoch " +
        std::to_string(cumulative_epoch) + ", expected " +
        std::to_string(expected) + ")");
  if (traj_.values.empty()) {
    traj_.values.push_back(metric);
    return;
  }
  double prev = traj_.values.back();
  double best = traj_.direction == MetricDirection::higher_better
                    ? std::max(prev, metric)
                    : std::min(prev, metric);
  traj_.values.push_back(best);
}

std::vector<double> cpe_weights(int T) {
  if (T < 1) throw std::invalid_argument("cpe_weights: T must be >= 1");
  std::vector<double> w(T);
  double total = 0.5 * T * (T + 1.0);
  for (int t = 1; t <= T; ++t) w[t - 1] = (T - t + 1) / total;
  return w;
}

double cpe(const Trajectory& traj) {
  if (traj.values.empty()) throw std::invalid_argument("cpe: empty trajectory");
  auto w = cpe_weights(traj.length());
  double s = 0.0;
  for (int t = 0; t < traj.length(); ++t) s += w[t] * traj.values[t];
  return s;
}

double peak(const Trajectory& traj) {
  if (traj.values.empty())
    throw std::invalid_argument("peak: empty trajectory");
  return traj.values.back();
}

std::vector<std::vector<double>> perf_ratios(const ProfileTable& table) {
  const std::size_t na = table.tasks.size();
  const std::size_t no = table.optimizers.size();
  if (table.cpe.size() != na || table.task_direction.size() != na)
    throw std::invalid_argument("perf_ratios: malformed table");
  std::vector<std::vector<double>> r(na, std::vector<double>(no));
  for (std::size_t a = 0; a < na; ++a) {
    if (table.cpe[a].size() != no)
      throw std::invalid_argument("perf_ratios: malformed table row");
    if (table.task_direction[a] == MetricDirection::higher_better) {
      double best = *std::max_element(table.cpe[a].begin(), table.cpe[a].end());
      for (std::size_t o = 0; o < no; ++o) {
        if (table.cpe[a][o] <= 0.0)
          throw std::invalid_argument(
              "perf_ratios: non-positive CPE on a higher-better task");
        r[a][o] = best / table.cpe[a][o];
      }
    } else {
      double best = *std::min_element(table.cpe[a].begin(), table.cpe[a].end());
      for (std::size_t o = 0; o < no; ++o) r[a][o] = table.cpe[a][o] / best;
    }
  }
  return r;
}

std::vector<std::vector<double>> perf_profile(
    const std::vector<std::vector<double>>& ratios,
    const std::vector<double>& tau_grid) {
  if (ratios.empty()) return {};
  const std::size_t na = ratios.size();
  const std::size_t no = ratios[0].size();
  std::vector<std::vector<double>> rho(no,
                                       std::vector<double>(tau_grid.size()));
  for (std::size_t o = 0; o < no; ++o) {
    for (std::size_t ti = 0; ti < tau_grid.size(); ++ti) {
      int count = 0;
      for (std::size_t a = 0; a < na; ++a)
        if (ratios[a][o] <= tau_grid[ti]) ++count;
      rho[o][ti] = static_cast<double>(count) / static_cast<double>(na);
    }
  }
  return rho;
}

std::vector<double> default_tau_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 30; ++i) g.push_back(1.0 + 0.01 * i);
  return g;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double kendall_tau(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("kendall_tau: need two vectors of equal size >= 2");
  const int n = static_cast<int>(a.size());
  int concordant = 0, discordant = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double da = a[i] - a[j];
      double db = b[i] - b[j];
      double p = da * db;
      if (p > 0) ++concordant;
      else if (p < 0) ++discordant;
    }
  return static_cast<double>(concordant - discordant) /
         (0.5 * n * (n - 1));
}

}  // namespace optbench
