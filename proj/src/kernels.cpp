#include "optbench/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <vector>

namespace optbench::kernels {

namespace {

std::atomic<bool> g_parallel{true};

// Per-row forward/backward pieces, shared by the blocked and the reference
// paths so the arithmetic is written once.

inline double logreg_row(const double* x, int label, int dim, int k,
                         const double* W, const double* b, double* gW,
                         double* gb) {
  std::vector<double> z(k);
  for (int c = 0; c < k; ++c) {
    double acc = b[c];
    const double* w = W + static_cast<std::size_t>(c) * dim;
    for (int j = 0; j < dim; ++j) acc += w[j] * x[j];
    z[c] = acc;
  }
  double mx = z[0];
  for (int c = 1; c < k; ++c) mx = std::max(mx, z[c]);
  double sum = 0.0;
  for (int c = 0; c < k; ++c) sum += std::exp(z[c] - mx);
  double loss = std::log(sum) - (z[label] - mx);
  if (gW != nullptr) {
    for (int c = 0; c < k; ++c) {
      double d = std::exp(z[c] - mx) / sum - (c == label ? 1.0 : 0.0);
      gb[c] += d;
      double* gw = gW + static_cast<std::size_t>(c) * dim;
      for (int j = 0; j < dim; ++j) gw[j] += d * x[j];
    }
  }
  return loss;
}

inline int argmax_lowest(const double* z, int k) {
  int best = 0;
  for (int c = 1; c < k; ++c)
    if (z[c] > z[best]) best = c;
  return best;
}

inline double mlp_row(const double* x, int label, int dim, int h, int k,
                      const double* W1, const double* b1, const double* W2,
                      const double* b2, double* gW1, double* gb1, double* gW2,
                      double* gb2) {
  std::vector<double> hid(h), z(k);
  for (int j = 0; j < h; ++j) {
    double acc = b1[j];
    const double* w = W1 + static_cast<std::size_t>(j) * dim;
    for (int i = 0; i < dim; ++i) acc += w[i] * x[i];
    hid[j] = std::tanh(acc);
  }
  for (int c = 0; c < k; ++c) {
    double acc = b2[c];
    const double* w = W2 + static_cast<std::size_t>(c) * h;
    for (int j = 0; j < h; ++j) acc += w[j] * hid[j];
    z[c] = acc;
  }
  double mx = z[0];
  for (int c = 1; c < k; ++c) mx = std::max(mx, z[c]);
  double sum = 0.0;
  for (int c = 0; c < k; ++c) sum += std::exp(z[c] - mx);
  double loss = std::log(sum) - (z[label] - mx);
  if (gW1 != nullptr) {
    std::vector<double> d2(k), dh(h, 0.0);
    for (int c = 0; c < k; ++c)
      d2[c] = std::exp(z[c] - mx) / sum - (c == label ? 1.0 : 0.0);
    for (int c = 0; c < k; ++c) {
      gb2[c] += d2[c];
      double* gw = gW2 + static_cast<std::size_t>(c) * h;
      const double* w = W2 + static_cast<std::size_t>(c) * h;
      for (int j = 0; j < h; ++j) {
        gw[j] += d2[c] * hid[j];
        dh[j] += d2[c] * w[j];
      }
    }
    for (int j = 0; j < h; ++j) {
      double da = dh[j] * (1.0 - hid[j] * hid[j]);
      gb1[j] += da;
      double* gw = gW1 + static_cast<std::size_t>(j) * dim;
      for (int i = 0; i < dim; ++i) gw[i] += da * x[i];
    }
  }
  return loss;
}

}  // namespace

void set_parallel(bool on) { g_parallel.store(on); }
bool parallel_enabled() { return g_parallel.load(); }

double logreg_loss_grad(const double* X, const int* labels, const int* idx,
                        int m, int dim, int k, const double* W, const double* b,
                        double* gW, double* gb) {
  const bool want_grad = gW != nullptr;
  const int nb = (m + kBlockRows - 1) / kBlockRows;
  const std::size_t wsz = static_cast<std::size_t>(k) * dim;
  std::vector<double> bloss(nb, 0.0);
  std::vector<double> bgW(want_grad ? nb * wsz : 0, 0.0);
  std::vector<double> bgb(want_grad ? static_cast<std::size_t>(nb) * k : 0,
                          0.0);
  const bool par = parallel_enabled();
#pragma omp parallel for schedule(static) if (par)
  for (int blk = 0; blk < nb; ++blk) {
    const int lo = blk * kBlockRows;
    const int hi = std::min(m, lo + kBlockRows);
    double* pgW = want_grad ? bgW.data() + blk * wsz : nullptr;
    double* pgb = want_grad ? bgb.data() + static_cast<std::size_t>(blk) * k
                            : nullptr;
    double acc = 0.0;
    for (int i = lo; i < hi; ++i) {
      const int row = idx[i];
      acc += logreg_row(X + static_cast<std::size_t>(row) * dim, labels[row],
                        dim, k, W, b, pgW, pgb);
    }
    bloss[blk] = acc;
  }
  // Fixed-order combine keeps the sum independent of thread count.
  double loss = 0.0;
  for (int blk = 0; blk < nb; ++blk) {
    loss += bloss[blk];
    if (want_grad) {
      const double* pgW = bgW.data() + blk * wsz;
      const double* pgb = bgb.data() + static_cast<std::size_t>(blk) * k;
      for (std::size_t j = 0; j < wsz; ++j) gW[j] += pgW[j];
      for (int c = 0; c < k; ++c) gb[c] += pgb[c];
    }
  }
  return loss;
}

int logreg_correct_count(const double* X, const int* labels, const int* idx,
                         int m, int dim, int k, const double* W,
                         const double* b) {
  int count = 0;
  const bool par = parallel_enabled();
#pragma omp parallel for schedule(static) reduction(+ : count) if (par)
  for (int i = 0; i < m; ++i) {
    const int row = idx[i];
    const double* x = X + static_cast<std::size_t>(row) * dim;
    std::vector<double> z(k);
    for (int c = 0; c < k; ++c) {
      double acc = b[c];
      const double* w = W + static_cast<std::size_t>(c) * dim;
      for (int j = 0; j < dim; ++j) acc += w[j] * x[j];
      z[c] = acc;
    }
    if (argmax_lowest(z.data(), k) == labels[row]) ++count;
  }
  return count;
}

double mlp_loss_grad(const double* X, const int* labels, const int* idx, int m,
                     int dim, int h, int k, const double* W1, const double* b1,
                     const double* W2, const double* b2, double* gW1,
                     double* gb1, double* gW2, double* gb2) {
  const bool want_grad = gW1 != nullptr;
  const int nb = (m + kBlockRows - 1) / kBlockRows;
  const std::size_t w1sz = static_cast<std::size_t>(h) * dim;
  const std::size_t w2sz = static_cast<std::size_t>(k) * h;
  std::vector<double> bloss(nb, 0.0);
  std::vector<double> bgW1(want_grad ? nb * w1sz : 0, 0.0);
  std::vector<double> bgb1(want_grad ? static_cast<std::size_t>(nb) * h : 0,
                           0.0);
  std::vector<double> bgW2(want_grad ? nb * w2sz : 0, 0.0);
  std::vector<double> bgb2(want_grad ? static_cast<std::size_t>(nb) * k : 0,
                           0.0);
  const bool par = parallel_enabled();
#pragma omp parallel for schedule(static) if (par)
  for (int blk = 0; blk < nb; ++blk) {
    const int lo = blk * kBlockRows;
    const int hi = std::min(m, lo + kBlockRows);
    double* p1 = want_grad ? bgW1.data() + blk * w1sz : nullptr;
    double* pb1 =
        want_grad ? bgb1.data() + static_cast<std::size_t>(blk) * h : nullptr;
    double* p2 = want_grad ? bgW2.data() + blk * w2sz : nullptr;
    double* pb2 =
        want_grad ? bgb2.data() + static_cast<std::size_t>(blk) * k : nullptr;
    double acc = 0.0;
    for (int i = lo; i < hi; ++i) {
      const int row = idx[i];
      acc += mlp_row(X + static_cast<std::size_t>(row) * dim, labels[row], dim,
                     h, k, W1, b1, W2, b2, p1, pb1, p2, pb2);
    }
    bloss[blk] = acc;
  }
  double loss = 0.0;
  for (int blk = 0; blk < nb; ++blk) {
    loss += bloss[blk];
    if (want_grad) {
      const double* p1 = bgW1.data() + blk * w1sz;
      const double* pb1 = bgb1.data() + static_cast<std::size_t>(blk) * h;
      const double* p2 = bgW2.data() + blk * w2sz;
      const double* pb2 = bgb2.data() + static_cast<std::size_t>(blk) * k;
      for (std::size_t j = 0; j < w1sz; ++j) gW1[j] += p1[j];
      for (int j = 0; j < h; ++j) gb1[j] += pb1[j];
      for (std::size_t j = 0; j < w2sz; ++j) gW2[j] += p2[j];
      for (int c = 0; c < k; ++c) gb2[c] += pb2[c];
    }
  }
  return loss;
}

int mlp_correct_count(const double* X, const int* labels, const int* idx,
                      int m, int dim, int h, int k, const double* W1,
                      const double* b1, const double* W2, const double* b2) {
  int count = 0;
  const bool par = parallel_enabled();
#pragma omp parallel for schedule(static) reduction(+ : count) if (par)
  for (int i = 0; i < m; ++i) {
    const int row = idx[i];
    const double* x = X + static_cast<std::size_t>(row) * dim;
    std::vector<double> hid(h), z(k);
    for (int j = 0; j < h; ++j) {
      double acc = b1[j];
      const double* w = W1 + static_cast<std::size_t>(j) * dim;
      for (int d = 0; d < dim; ++d) acc += w[d] * x[d];
      hid[j] = std::tanh(acc);
    }
    for (int c = 0; c < k; ++c) {
      double acc = b2[c];
      const double* w = W2 + static_cast<std::size_t>(c) * h;
      for (int j = 0; j < h; ++j) acc += w[j] * hid[j];
      z[c] = acc;
    }
    if (argmax_lowest(z.data(), k) == labels[row]) ++count;
  }
  return count;
}

}  // namespace optbench::kernels

namespace optbench::kernels_ref {

double logreg_loss_grad(const double* X, const int* labels, const int* idx,
                        int m, int dim, int k, const double* W, const double* b,
                        double* gW, double* gb) {
  double loss = 0.0;
  for (int i = 0; i < m; ++i) {
    const int row = idx[i];
    loss += optbench::kernels::logreg_loss_grad(X, labels, &row, 1, dim, k, W,
                                                b, nullptr, nullptr);
  }
  // Straight re-computation for gradients, one row at a time.
  if (gW != nullptr) {
    loss = 0.0;
    for (int i = 0; i < m; ++i) {
      std::vector<double> z(k);
      const int row = idx[i];
      const double* x = X + static_cast<std::size_t>(row) * dim;
      for (int c = 0; c < k; ++c) {
        double acc = b[c];
        const double* w = W + static_cast<std::size_t>(c) * dim;
        for (int j = 0; j < dim; ++j) acc += w[j] * x[j];
        z[c] = acc;
      }
      double mx = *std::max_element(z.begin(), z.end());
      double sum = 0.0;
      for (int c = 0; c < k; ++c) sum += std::exp(z[c] - mx);
      loss += std::log(sum) - (z[labels[row]] - mx);
      for (int c = 0; c < k; ++c) {
        double d = std::exp(z[c] - mx) / sum - (c == labels[row] ? 1.0 : 0.0);
        gb[c] += d;
        for (int j = 0; j < dim; ++j)
          gW[static_cast<std::size_t>(c) * dim + j] += d * x[j];
      }
    }
  }
  return loss;
}

double mlp_loss_grad(const double* X, const int* labels, const int* idx, int m,
                     int dim, int h, int k, const double* W1, const double* b1,
                     const double* W2, const double* b2, double* gW1,
                     double* gb1, double* gW2, double* gb2) {
  double loss = 0.0;
  for (int i = 0; i < m; ++i) {
    const int row = idx[i];
    const double* x = X + static_cast<std::size_t>(row) * dim;
    std::vector<double> hid(h), z(k);
    for (int j = 0; j < h; ++j) {
      double acc = b1[j];
      const double* w = W1 + static_cast<std::size_t>(j) * dim;
      for (int d = 0; d < dim; ++d) acc += w[d] * x[d];
      hid[j] = std::tanh(acc);
    }
    for (int c = 0; c < k; ++c) {
      double acc = b2[c];
      const double* w = W2 + static_cast<std::size_t>(c) * h;
      for (int j = 0; j < h; ++j) acc += w[j] * hid[j];
      z[c] = acc;
    }
    double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (int c = 0; c < k; ++c) sum += std::exp(z[c] - mx);
    loss += std::log(sum) - (z[labels[row]] - mx);
    if (gW1 != nullptr) {
      std::vector<double> d2(k), dh(h, 0.0);
      for (int c = 0; c < k; ++c)
        d2[c] = std::exp(z[c] - mx) / sum - (c == labels[row] ? 1.0 : 0.0);
      for (int c = 0; c < k; ++c) {
        gb2[c] += d2[c];
        for (int j = 0; j < h; ++j) {
          gW2[static_cast<std::size_t>(c) * h + j] += d2[c] * hid[j];
          dh[j] += d2[c] * W2[static_cast<std::size_t>(c) * h + j];
        }
      }
      for (int j = 0; j < h; ++j) {
        double da = dh[j] * (1.0 - hid[j] * hid[j]);
        gb1[j] += da;
        for (int d = 0; d < dim; ++d)
          gW1[static_cast<std::size_t>(j) * dim + d] += da * x[d];
      }
    }
  }
  return loss;
}

}  // namespace optbench::kernels_ref
