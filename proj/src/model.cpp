#include "agp/model.hpp"

#include <cmath>

#include "agp/parallel.hpp"

namespace agp {

ModelState make_model(CenterSet centers, KernelMetric metric, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("make_model: sigma must be non-negative");
    validate_metric(metric, centers.count(), centers.dim());
    ModelState state;
    state.centers = std::move(centers);
    state.metric = std::move(metric);
    state.sigma = sigma;
    return refresh(std::move(state));
}

ModelState refresh(ModelState state) {
    const Matrix k = kernel_matrix(state.centers, state.metric, state.sigma);
    if (!k.allFinite()) {
        throw NumericalError("refresh: kernel matrix has non-finite entries");
    }
    state.k_inv = svd_pinv(k);
    if (state.k_inv.norm() == 0.0 && k.norm() > 0.0) {
        throw NumericalError("refresh: kernel matrix is degenerate (rank 0 at cutoff)");
    }
    state.alpha = state.k_inv * state.centers.targets;
    return state;
}

double predict(const ModelState& state, const Vector& x) {
    if (state.alpha.size() != state.centers.count()) {
        throw std::invalid_argument("predict: stale caches, call refresh");
    }
    return kernel_vector(state.centers, state.metric, x).dot(state.alpha);
}

Vector predict_all(const ModelState& state, const Matrix& xs) {
    Vector out(xs.rows());
    parallel_for(static_cast<int>(xs.rows()),
                 [&](int i) { out(i) = predict(state, xs.row(i).transpose()); });
    return out;
}

namespace {

double regularizer_value(const KernelMetric& metric, double mu) {
    double reg = 0.0;
    switch (metric.mode) {
        case MetricMode::shared:
            reg = metric.shared_lengthscale * metric.shared_lengthscale;
            break;
        case MetricMode::per_center_univariate:
            reg = metric.lengthscales.squaredNorm();
            break;
        case MetricMode::per_center_multivariate:
            for (const Matrix& p : metric.precisions) reg += p.norm();
            break;
    }
    return mu * reg;
}

}  // namespace

LossReport loss(const ModelState& state, const Dataset& batch, double mu) {
    if (batch.size() < 1) throw std::invalid_argument("loss: empty batch");
    if (mu < 0.0) throw std::invalid_argument("loss: mu must be non-negative");

    const Vector preds = predict_all(state, batch.features);
    LossReport report;
    report.batch_size = batch.size();
    report.data_fit = (preds - batch.targets).squaredNorm();
    report.regularizer = regularizer_value(state.metric, mu);
    report.total = report.data_fit + report.regularizer;
    return report;
}

Vector grad_univariate(const ModelState& state, const Dataset& batch, double mu) {
    if (state.metric.mode != MetricMode::per_center_univariate) {
        throw std::invalid_argument("grad_univariate: metric mode is not per-center univariate");
    }
    if (batch.size() < 1) throw std::invalid_argument("grad_univariate: empty batch");
    const int n = state.centers.count();
    if (state.alpha.size() != n) {
        throw std::invalid_argument("grad_univariate: stale caches, call refresh");
    }

    // s_i = sum_m (dK/dl_i)(i, m) * alpha_m. The kernel-matrix derivative is
    // nonzero only in row i, with a zero diagonal entry (the unit diagonal is
    // constant in l).
    Vector s = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
        const Vector ci = state.centers.centers.row(i).transpose();
        for (int m = 0; m < n; ++m) {
            if (m == i) continue;
            s(i) += dk_dl(ci, state.centers.centers.row(m).transpose(),
                          state.metric.lengthscales(i)) *
                    state.alpha(m);
        }
    }

    const Matrix k_inv_t = state.k_inv.transpose();
    const int b = batch.size();
    Matrix contrib(b, n);  // per-sample gradient rows, summed in index order
    parallel_for(b, [&](int r) {
        const Vector x = batch.features.row(r).transpose();
        const Vector kv = kernel_vector(state.centers, state.metric, x);
        const double resid2 = 2.0 * (kv.dot(state.alpha) - batch.targets(r));
        const Vector w = k_inv_t * kv;
        for (int i = 0; i < n; ++i) {
            const Vector ci = state.centers.centers.row(i).transpose();
            const double direct = dk_dl(ci, x, state.metric.lengthscales(i)) * state.alpha(i);
            contrib(r, i) = resid2 * (direct - w(i) * s(i));
        }
    });

    Vector grad = Vector::Zero(n);
    for (int r = 0; r < b; ++r) grad += contrib.row(r).transpose();
    grad += 2.0 * mu * state.metric.lengthscales;
    return grad;
}

std::vector<Matrix> grad_multivariate(const ModelState& state, const Dataset& batch, double mu) {
    if (state.metric.mode != MetricMode::per_center_multivariate) {
        throw std::invalid_argument(
            "grad_multivariate: metric mode is not per-center multivariate");
    }
    if (batch.size() < 1) throw std::invalid_argument("grad_multivariate: empty batch");
    const int n = state.centers.count();
    const int d = state.centers.dim();
    if (state.alpha.size() != n) {
        throw std::invalid_argument("grad_multivariate: stale caches, call refresh");
    }

    // S_i = sum_m (dK/dP_i)(i, m) * alpha_m, one D x D matrix per center.
    std::vector<Matrix> s(n, Matrix::Zero(d, d));
    for (int i = 0; i < n; ++i) {
        const Vector ci = state.centers.centers.row(i).transpose();
        for (int m = 0; m < n; ++m) {
            if (m == i) continue;
            s[i] += state.alpha(m) * dk_dP(ci, state.centers.centers.row(m).transpose(),
                                           state.metric.precisions[i]);
        }
    }

    const Matrix k_inv_t = state.k_inv.transpose();
    const int b = batch.size();
    std::vector<std::vector<Matrix>> contrib(b);
    parallel_for(b, [&](int r) {
        const Vector x = batch.features.row(r).transpose();
        const Vector kv = kernel_vector(state.centers, state.metric, x);
        const double resid2 = 2.0 * (kv.dot(state.alpha) - batch.targets(r));
        const Vector w = k_inv_t * kv;
        auto& rows = contrib[r];
        rows.reserve(n);
        for (int i = 0; i < n; ++i) {
            const Vector ci = state.centers.centers.row(i).transpose();
            const Matrix direct = dk_dP(ci, x, state.metric.precisions[i]) * state.alpha(i);
            rows.push_back(resid2 * (direct - w(i) * s[i]));
        }
    });

    std::vector<Matrix> grad(n, Matrix::Zero(d, d));
    for (int r = 0; r < b; ++r) {
        for (int i = 0; i < n; ++i) grad[i] += contrib[r][i];
    }
    for (int i = 0; i < n; ++i) {
        const Matrix& p = state.metric.precisions[i];
        const double pnorm = p.norm();
        if (pnorm > 0.0) grad[i] += (mu / pnorm) * p;
        // symmetric-matrix correction: off-diagonal entries are tied pairs
        Matrix g = grad[i];
        grad[i] = g + Matrix(g.transpose()) - Matrix(g.diagonal().asDiagonal());
    }
    return grad;
}

}  // namespace agp
