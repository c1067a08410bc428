#pragma once

namespace optbench::kernels {

// Toggles the OpenMP path for the batch kernels. Both paths accumulate
// per-block partials and combine them in fixed block order, so results are
// bitwise identical regardless of the setting or thread count.
void set_parallel(bool on);
bool parallel_enabled();

// Rows per reduction block.
inline constexpr int kBlockRows = 128;

// Softmax cross-entropy over the rows selected by idx[0..m).
// X is row-major n_total x dim, W is k x dim, b is k.
// Returns the summed loss; when gW/gb are non-null the summed gradients are
// accumulated into them (caller zeroes).
double logreg_loss_grad(const double* X, const int* labels, const int* idx,
                        int m, int dim, int k, const double* W, const double* b,
                        double* gW, double* gb);

// Correct-prediction count under argmax with ties broken by lowest class.
int logreg_correct_count(const double* X, const int* labels, const int* idx,
                         int m, int dim, int k, const double* W,
                         const double* b);

// One-hidden-layer tanh MLP with softmax output, same conventions.
// W1 is h x dim, b1 is h, W2 is k x h, b2 is k.
double mlp_loss_grad(const double* X, const int* labels, const int* idx, int m,
                     int dim, int h, int k, const double* W1, const double* b1,
                     const double* W2, const double* b2, double* gW1,
                     double* gb1, double* gW2, double* gb2);

int mlp_correct_count(const double* X, const int* labels, const int* idx,
                      int m, int dim, int h, int k, const double* W1,
                      const double* b1, const double* W2, const double* b2);

}  // namespace optbench::kernels

// Plain straight-loop serial implementations, kept as the reference the
// blocked kernels are tested and benchmarked against.
namespace optbench::kernels_ref {

double logreg_loss_grad(const double* X, const int* labels, const int* idx,
                        int m, int dim, int k, const double* W, const double* b,
                        double* gW, double* gb);

double mlp_loss_grad(const double* X, const int* labels, const int* idx, int m,
                     int dim, int h, int k, const double* W1, const double* b1,
                     const double* W2, const double* b2, double* gW1,
                     double* gb1, double* gW2, double* gb2);

}  // namespace optbench::kernels_ref
