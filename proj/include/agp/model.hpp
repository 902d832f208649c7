#pragma once

#include <vector>

#include "agp/centers.hpp"
#include "agp/dataset.hpp"
#include "agp/kernel.hpp"
#include "agp/linalg.hpp"

namespace agp {

/// Centers + metric + noise, with the cached kernel-matrix pseudo-inverse
/// and the weight vector alpha = k_inv * center targets. Caches must be
/// rebuilt (refresh) after any metric or sigma change.
struct ModelState {
    CenterSet centers;
    KernelMetric metric;
    double sigma = 0.0;
    Matrix k_inv;
    Vector alpha;
};

/// Builds a state with freshly computed caches.
ModelState make_model(CenterSet centers, KernelMetric metric, double sigma);

/// Recomputes k_inv (SVD pseudo-inverse of the kernel matrix plus sigma^2 I)
/// and alpha. Throws NumericalError for a degenerate kernel matrix.
ModelState refresh(ModelState state);

/// Predictive mean: kernel_vector(x)^T alpha.
double predict(const ModelState& state, const Vector& x);

/// Predictive mean for every row of xs.
Vector predict_all(const ModelState& state, const Matrix& xs);

struct LossReport {
    double data_fit = 0.0;
    double regularizer = 0.0;
    double total = 0.0;
    int batch_size = 0;
};

/// Regularized squared loss: sum of squared residuals over the batch plus
/// mu * sum_i l_i^2 (univariate) or mu * sum_i ||P_i||_F (multivariate).
LossReport loss(const ModelState& state, const Dataset& batch, double mu);

/// Analytic loss gradient w.r.t. the per-center lengthscales.
Vector grad_univariate(const ModelState& state, const Dataset& batch, double mu);

/// Analytic loss gradient w.r.t. the per-center precision matrices, with the
/// symmetric-matrix correction G + G^T - diag(G) applied.
std::vector<Matrix> grad_multivariate(const ModelState& state, const Dataset& batch, double mu);

}  // namespace agp
