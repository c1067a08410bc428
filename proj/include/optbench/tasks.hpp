#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "optbench/param.hpp"

namespace optbench {

enum class MetricDirection { higher_better, lower_better };
enum class Split { train, validation };

// Loss magnitudes past this point count as divergence.
inline constexpr double kDivergenceThreshold = 1e10;

// A minibatch: row indices into the task's training set. noise_key seeds the
// per-batch gradient noise where a task uses it; noisy=false gives the exact
// deterministic objective (used by gradient checks and metric evaluation).
struct Batch {
  std::vector<int> indices;
  std::uint64_t noise_key = 0;
  bool noisy = false;
};

class Task;
using TaskPtr = std::shared_ptr<const Task>;

// A deterministic, self-contained optimization problem. Immutable after
// construction; all evaluation is stateless and safe to call concurrently.
class Task {
 public:
  virtual ~Task() = default;

  const std::string& name() const { return name_; }
  const std::vector<LayerShape>& parameter_layout() const { return layout_; }
  MetricDirection metric_direction() const { return direction_; }
  int batch_size() const { return batch_size_; }
  int train_size() const { return train_size_; }
  int validation_size() const { return validation_size_; }
  int epoch_length() const {
    return (train_size_ + batch_size_ - 1) / batch_size_;
  }
  std::uint64_t seed() const { return seed_; }

  // Deterministic starting point, a pure function of the task seed.
  virtual ParamVector initial_params() const = 0;

  virtual double loss(const ParamVector& theta, const Batch& batch) const = 0;
  virtual ParamVector grad(const ParamVector& theta,
                           const Batch& batch) const = 0;
  virtual double metric(const ParamVector& theta, Split split) const = 0;

  // Minibatches for one epoch: a fixed shuffle driven by (seed, epoch) only,
  // never by shared state, so interrupted trials can resume exactly.
  std::vector<Batch> epoch_batches(int epoch) const;

  // The whole training set as one noiseless batch.
  Batch full_train_batch() const;

  // Metric value reported for diverged trials.
  double worst_metric() const {
    return direction_ == MetricDirection::higher_better ? 0.0
                                                        : kDivergenceThreshold;
  }

  // Stratified delta-fraction training subset sharing this task's validation
  // set. Only classification tasks support it.
  virtual TaskPtr stratified_subset(double delta) const;

 protected:
  std::string name_;
  std::vector<LayerShape> layout_;
  MetricDirection direction_ = MetricDirection::lower_better;
  int batch_size_ = 1;
  int train_size_ = 0;
  int validation_size_ = 0;
  std::uint64_t seed_ = 0;
};

TaskPtr make_quadratic(int dim, double condition_number, std::uint64_t seed);
TaskPtr make_logreg(int n_samples, int dim, int n_classes, std::uint64_t seed);
TaskPtr make_mlp(int n_samples, int dim, int hidden, int n_classes,
                 std::uint64_t seed);
// Sharp learning-rate basin: tolerant optimizers survive a wide rate range,
// rate-sensitive ones diverge an order of magnitude above the basin center.
TaskPtr make_synthetic_landscape(std::uint64_t seed);

// Evaluation wrappers enforcing the divergence contract: non-finite inputs or
// |loss| past the threshold yield nullopt instead of propagating NaNs.
std::optional<double> eval_loss(const Task& task, const ParamVector& theta,
                                const Batch& batch);
std::optional<ParamVector> eval_grad(const Task& task, const ParamVector& theta,
                                     const Batch& batch);
std::optional<double> eval_metric(const Task& task, const ParamVector& theta,
                                  Split split);

// Central finite differences, the test oracle for analytic gradients.
ParamVector finite_diff_grad(const Task& task, const ParamVector& theta,
                             const Batch& batch, double h);

}  // namespace optbench
