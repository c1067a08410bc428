#include "optbench/tasks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "optbench/kernels.hpp"
#include "optbench/rng.hpp"

namespace optbench {

namespace {

std::vector<int> shuffled_indices(int n, std::uint64_t seed) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

}  // namespace

std::vector<Batch> Task::epoch_batches(int epoch) const {
  auto idx = shuffled_indices(train_size_,
                              hash_mix(seed_, 0x5a5a0000u + epoch));
  std::vector<Batch> batches;
  for (int lo = 0; lo < train_size_; lo += batch_size_) {
    Batch b;
    int hi = std::min(train_size_, lo + batch_size_);
    b.indices.assign(idx.begin() + lo, idx.begin() + hi);
    // Keyed by batch membership, not position, so the noise follows the
    // examples rather than the shuffle.
    b.noise_key = hash_mix(seed_, static_cast<std::uint64_t>(b.indices[0]));
    b.noisy = true;
    batches.push_back(std::move(b));
  }
  return batches;
}

Batch Task::full_train_batch() const {
  Batch b;
  b.indices.resize(train_size_);
  std::iota(b.indices.begin(), b.indices.end(), 0);
  b.noisy = false;
  return b;
}

TaskPtr Task::stratified_subset(double) const {
  throw std::invalid_argument("stratified_subset: task '" + name_ +
                              "' is not a classification task");
}

// ---------------------------------------------------------------------------
// Quadratic: L(theta) = 1/2 (theta - theta*)^T D (theta - theta*), diagonal D
// spanning [1, condition_number]. Minibatches add a seeded bounded linear
// noise term so the stochastic gradient stays consistent with the loss.

namespace {

class QuadraticTask final : public Task {
 public:
  QuadraticTask(int dim, double cond, std::uint64_t seed, double noise_scale,
                std::string name)
      : dim_(dim), noise_scale_(noise_scale) {
    name_ = std::move(name);
    layout_ = {{dim, 1}};
    direction_ = MetricDirection::lower_better;
    batch_size_ = 8;
    train_size_ = 64;
    validation_size_ = 1;
    seed_ = seed;
    diag_.resize(dim);
    for (int i = 0; i < dim; ++i)
      diag_[i] = dim == 1 ? 1.0
                          : std::pow(cond, static_cast<double>(i) / (dim - 1));
    center_.resize(dim);
    Rng crng(hash_mix(seed, 1));
    for (int i = 0; i < dim; ++i) center_[i] = crng.normal();
  }

  ParamVector initial_params() const override {
    ParamVector p = ParamVector::zeros(layout_);
    Rng rng(hash_mix(seed_, 2));
    for (int i = 0; i < dim_; ++i) p.layers[0][i] = center_[i] + rng.normal();
    return p;
  }

  double loss(const ParamVector& theta, const Batch& batch) const override {
    const auto& t = theta.layers[0];
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
      double d = t[i] - center_[i];
      s += 0.5 * diag_[i] * d * d;
    }
    if (batch.noisy && noise_scale_ > 0.0) {
      Rng nrng(batch.noise_key);
      for (int i = 0; i < dim_; ++i) s += noise_scale_ * nrng.normal() * t[i];
    }
    return s;
  }

  ParamVector grad(const ParamVector& theta, const Batch& batch) const override {
    ParamVector g = ParamVector::zeros(layout_);
    const auto& t = theta.layers[0];
    for (int i = 0; i < dim_; ++i)
      g.layers[0][i] = diag_[i] * (t[i] - center_[i]);
    if (batch.noisy && noise_scale_ > 0.0) {
      Rng nrng(batch.noise_key);
      for (int i = 0; i < dim_; ++i)
        g.layers[0][i] += noise_scale_ * nrng.normal();
    }
    return g;
  }

  double metric(const ParamVector& theta, Split) const override {
    return loss(theta, full_train_batch());
  }

 protected:
  int dim_;
  double noise_scale_;
  std::vector<double> diag_;
  std::vector<double> center_;
};

}  // namespace

TaskPtr make_quadratic(int dim, double condition_number, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("make_quadratic: dim must be >= 1");
  if (!std::isfinite(condition_number) || condition_number < 1.0)
    throw std::invalid_argument(
        "make_quadratic: condition_number must be finite and >= 1");
  return std::make_shared<QuadraticTask>(dim, condition_number, seed, 0.05,
                                         "quadratic");
}

// ---------------------------------------------------------------------------
// Gaussian-blob classifiers: softmax logistic regression and a one-hidden-
// layer tanh MLP. n_samples counts training examples; a fresh validation set
// is drawn from the same blobs.

namespace {

struct Blobs {
  int dim = 0;
  int k = 0;
  std::vector<double> xtr;
  std::vector<int> ytr;
  std::vector<double> xva;
  std::vector<int> yva;
};

Blobs make_blobs(int n_samples, int dim, int k, std::uint64_t seed) {
  Blobs b;
  b.dim = dim;
  b.k = k;
  Rng crng(hash_mix(seed, 3));
  std::vector<double> centers(static_cast<std::size_t>(k) * dim);
  for (auto& c : centers) c = 3.0 * crng.normal();
  int n_val = std::max(50, n_samples / 5);
  auto gen = [&](int n, std::vector<double>& x, std::vector<int>& y,
                 std::uint64_t sub) {
    Rng rng(hash_mix(seed, sub));
    x.resize(static_cast<std::size_t>(n) * dim);
    y.resize(n);
    for (int i = 0; i < n; ++i) {
      int cls = i % k;
      y[i] = cls;
      for (int j = 0; j < dim; ++j)
        x[static_cast<std::size_t>(i) * dim + j] =
            centers[static_cast<std::size_t>(cls) * dim + j] + rng.normal();
    }
  };
  gen(n_samples, b.xtr, b.ytr, 4);
  gen(n_val, b.xva, b.yva, 5);
  return b;
}

std::vector<int> all_rows(int n) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

// Shared plumbing for the blob classifiers: stratified subsetting with a
// validation set shared between the partial and the full task.
class ClassificationTask : public Task {
 public:
  TaskPtr stratified_subset(double delta) const override {
    if (!(delta > 0.0 && delta <= 1.0))
      throw std::invalid_argument("stratified_subset: delta must be in (0,1]");
    std::vector<std::vector<int>> by_class(data_.k);
    for (int i = 0; i < static_cast<int>(data_.ytr.size()); ++i)
      by_class[data_.ytr[i]].push_back(i);
    std::vector<int> chosen;
    for (int c = 0; c < data_.k; ++c) {
      int nc = static_cast<int>(by_class[c].size());
      int take = static_cast<int>(std::llround(delta * nc));
      take = std::clamp(take, 1, nc);
      if (static_cast<int>(std::llround(delta * nc)) < 1 && delta < 1.0)
        throw std::invalid_argument(
            "stratified_subset: delta too small to keep one sample per class");
      auto order = shuffled_indices(nc, hash_mix(seed_, 0xd00d + c));
      for (int i = 0; i < take; ++i) chosen.push_back(by_class[c][order[i]]);
    }
    std::sort(chosen.begin(), chosen.end());
    Blobs sub;
    sub.dim = data_.dim;
    sub.k = data_.k;
    sub.xva = data_.xva;  // validation shared with the full task
    sub.yva = data_.yva;
    for (int row : chosen) {
      sub.ytr.push_back(data_.ytr[row]);
      for (int j = 0; j < data_.dim; ++j)
        sub.xtr.push_back(data_.xtr[static_cast<std::size_t>(row) * data_.dim + j]);
    }
    return clone_with_data(std::move(sub));
  }

  const Blobs& data() const { return data_; }

 protected:
  virtual TaskPtr clone_with_data(Blobs data) const = 0;

  Blobs data_;
};

class LogregTask final : public ClassificationTask {
 public:
  LogregTask(Blobs data, std::uint64_t seed) {
    data_ = std::move(data);
    name_ = "logreg";
    layout_ = {{data_.k, data_.dim}, {data_.k, 1}};
    direction_ = MetricDirection::higher_better;
    batch_size_ = std::min<int>(32, static_cast<int>(data_.ytr.size()));
    train_size_ = static_cast<int>(data_.ytr.size());
    validation_size_ = static_cast<int>(data_.yva.size());
    seed_ = seed;
  }

  ParamVector initial_params() const override {
    ParamVector p = ParamVector::zeros(layout_);
    Rng rng(hash_mix(seed_, 6));
    for (auto& v : p.layers[0]) v = 0.1 * rng.normal();
    return p;
  }

  double loss(const ParamVector& theta, const Batch& batch) const override {
    double s = kernels::logreg_loss_grad(
        data_.xtr.data(), data_.ytr.data(), batch.indices.data(),
        static_cast<int>(batch.indices.size()), data_.dim, data_.k,
        theta.layers[0].data(), theta.layers[1].data(), nullptr, nullptr);
    return s / static_cast<double>(batch.indices.size());
  }

  ParamVector grad(const ParamVector& theta, const Batch& batch) const override {
    ParamVector g = ParamVector::zeros(layout_);
    kernels::logreg_loss_grad(
        data_.xtr.data(), data_.ytr.data(), batch.indices.data(),
        static_cast<int>(batch.indices.size()), data_.dim, data_.k,
        theta.layers[0].data(), theta.layers[1].data(), g.layers[0].data(),
        g.layers[1].data());
    double inv = 1.0 / static_cast<double>(batch.indices.size());
    for (auto& l : g.layers)
      for (auto& v : l) v *= inv;
    return g;
  }

 protected:
  TaskPtr clone_with_data(Blobs data) const override {
    return std::make_shared<LogregTask>(std::move(data), seed_);
  }

 public:
  double metric(const ParamVector& theta, Split split) const override {
    const bool val = split == Split::validation;
    const auto& x = val ? data_.xva : data_.xtr;
    const auto& y = val ? data_.yva : data_.ytr;
    int n = static_cast<int>(y.size());
    auto idx = all_rows(n);
    int c = kernels::logreg_correct_count(x.data(), y.data(), idx.data(), n,
                                          data_.dim, data_.k,
                                          theta.layers[0].data(),
                                          theta.layers[1].data());
    return static_cast<double>(c) / n;
  }
};

class MlpTask final : public ClassificationTask {
 public:
  MlpTask(Blobs data, int hidden, std::uint64_t seed) : hidden_(hidden) {
    data_ = std::move(data);
    name_ = "mlp";
    layout_ = {{hidden, data_.dim}, {hidden, 1}, {data_.k, hidden},
               {data_.k, 1}};
    direction_ = MetricDirection::higher_better;
    batch_size_ = std::min<int>(32, static_cast<int>(data_.ytr.size()));
    train_size_ = static_cast<int>(data_.ytr.size());
    validation_size_ = static_cast<int>(data_.yva.size());
    seed_ = seed;
  }

  ParamVector initial_params() const override {
    ParamVector p = ParamVector::zeros(layout_);
    Rng rng(hash_mix(seed_, 7));
    double s1 = 0.5 / std::sqrt(static_cast<double>(data_.dim));
    double s2 = 0.5 / std::sqrt(static_cast<double>(hidden_));
    for (auto& v : p.layers[0]) v = s1 * rng.normal();
    for (auto& v : p.layers[2]) v = s2 * rng.normal();
    return p;
  }

  double loss(const ParamVector& theta, const Batch& batch) const override {
    double s = kernels::mlp_loss_grad(
        data_.xtr.data(), data_.ytr.data(), batch.indices.data(),
        static_cast<int>(batch.indices.size()), data_.dim, hidden_, data_.k,
        theta.layers[0].data(), theta.layers[1].data(), theta.layers[2].data(),
        theta.layers[3].data(), nullptr, nullptr, nullptr, nullptr);
    return s / static_cast<double>(batch.indices.size());
  }

  ParamVector grad(const ParamVector& theta, const Batch& batch) const override {
    ParamVector g = ParamVector::zeros(layout_);
    kernels::mlp_loss_grad(
        data_.xtr.data(), data_.ytr.data(), batch.indices.data(),
        static_cast<int>(batch.indices.size()), data_.dim, hidden_, data_.k,
        theta.layers[0].data(), theta.layers[1].data(), theta.layers[2].data(),
        theta.layers[3].data(), g.layers[0].data(), g.layers[1].data(),
        g.layers[2].data(), g.layers[3].data());
    double inv = 1.0 / static_cast<double>(batch.indices.size());
    for (auto& l : g.layers)
      for (auto& v : l) v *= inv;
    return g;
  }

  double metric(const ParamVector& theta, Split split) const override {
    const bool val = split == Split::validation;
    const auto& x = val ? data_.xva : data_.xtr;
    const auto& y = val ? data_.yva : data_.ytr;
    int n = static_cast<int>(y.size());
    auto idx = all_rows(n);
    int c = kernels::mlp_correct_count(
        x.data(), y.data(), idx.data(), n, data_.dim, hidden_, data_.k,
        theta.layers[0].data(), theta.layers[1].data(), theta.layers[2].data(),
        theta.layers[3].data());
    return static_cast<double>(c) / n;
  }

 protected:
  TaskPtr clone_with_data(Blobs data) const override {
    return std::make_shared<MlpTask>(std::move(data), hidden_, seed_);
  }

 private:
  int hidden_;
};

}  // namespace

TaskPtr make_logreg(int n_samples, int dim, int n_classes, std::uint64_t seed) {
  if (n_classes < 2)
    throw std::invalid_argument("make_logreg: n_classes must be >= 2");
  if (dim < 1) throw std::invalid_argument("make_logreg: dim must be >= 1");
  if (n_samples < 10 * n_classes)
    throw std::invalid_argument(
        "make_logreg: need at least 10 samples per class");
  return std::make_shared<LogregTask>(make_blobs(n_samples, dim, n_classes, seed),
                                      seed);
}

TaskPtr make_mlp(int n_samples, int dim, int hidden, int n_classes,
                 std::uint64_t seed) {
  if (hidden < 1) throw std::invalid_argument("make_mlp: hidden must be >= 1");
  if (n_classes < 2)
    throw std::invalid_argument("make_mlp: n_classes must be >= 2");
  if (dim < 1) throw std::invalid_argument("make_mlp: dim must be >= 1");
  if (n_samples < 10 * n_classes)
    throw std::invalid_argument("make_mlp: need at least 10 samples per class");
  return std::make_shared<MlpTask>(make_blobs(n_samples, dim, n_classes, seed),
                                   hidden, seed);
}

// ---------------------------------------------------------------------------
// Synthetic learning-rate landscape: a stiff noiseless quadratic whose metric
// is 1/(1+loss), so the known optimum is 1.0 and divergence collapses to ~0.
// Plain gradient steps blow up above alpha = 2/curvature, giving the sharp
// basin; adaptive rules normalize the step and stay tolerant.

namespace {

class LandscapeTask final : public Task {
 public:
  explicit LandscapeTask(std::uint64_t seed) {
    name_ = "landscape";
    layout_ = {{2, 1}};
    direction_ = MetricDirection::higher_better;
    batch_size_ = 4;
    train_size_ = 40;
    validation_size_ = 1;
    seed_ = seed;
    Rng rng(hash_mix(seed, 8));
    start_ = {1.0 + 0.1 * rng.uniform(), 1.0 + 0.1 * rng.uniform()};
  }

  static constexpr double kCurvature = 50.0;

  ParamVector initial_params() const override {
    ParamVector p = ParamVector::zeros(layout_);
    p.layers[0][0] = start_[0];
    p.layers[0][1] = start_[1];
    return p;
  }

  double loss(const ParamVector& theta, const Batch&) const override {
    const auto& t = theta.layers[0];
    return 0.5 * kCurvature * (t[0] * t[0] + t[1] * t[1]);
  }

  ParamVector grad(const ParamVector& theta, const Batch&) const override {
    ParamVector g = ParamVector::zeros(layout_);
    g.layers[0][0] = kCurvature * theta.layers[0][0];
    g.layers[0][1] = kCurvature * theta.layers[0][1];
    return g;
  }

  double metric(const ParamVector& theta, Split) const override {
    return 1.0 / (1.0 + loss(theta, Batch{}));
  }

 private:
  std::array<double, 2> start_;
};

}  // namespace

TaskPtr make_synthetic_landscape(std::uint64_t seed) {
  return std::make_shared<LandscapeTask>(seed);
}

// ---------------------------------------------------------------------------

std::optional<double> eval_loss(const Task& task, const ParamVector& theta,
                                const Batch& batch) {
  if (!theta.finite()) return std::nullopt;
  double l = task.loss(theta, batch);
  if (!std::isfinite(l) || std::abs(l) > kDivergenceThreshold)
    return std::nullopt;
  return l;
}

std::optional<ParamVector> eval_grad(const Task& task, const ParamVector& theta,
                                     const Batch& batch) {
  if (!theta.finite()) return std::nullopt;
  ParamVector g = task.grad(theta, batch);
  if (!g.finite()) return std::nullopt;
  return g;
}

std::optional<double> eval_metric(const Task& task, const ParamVector& theta,
                                  Split split) {
  if (!theta.finite()) return std::nullopt;
  double m = task.metric(theta, split);
  if (!std::isfinite(m)) return std::nullopt;
  return m;
}

ParamVector finite_diff_grad(const Task& task, const ParamVector& theta,
                             const Batch& batch, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_grad: h must be > 0");
  ParamVector g = ParamVector::zeros_like(theta);
  ParamVector probe = theta;
  for (std::size_t l = 0; l < theta.layers.size(); ++l) {
    for (std::size_t i = 0; i < theta.layers[l].size(); ++i) {
      double orig = probe.layers[l][i];
      probe.layers[l][i] = orig + h;
      double fp = task.loss(probe, batch);
      probe.layers[l][i] = orig - h;
      double fm = task.loss(probe, batch);
      probe.layers[l][i] = orig;
      g.layers[l][i] = (fp - fm) / (2.0 * h);
    }
  }
  return g;
}

}  // namespace optbench
