#include "agp/kernel.hpp"

#include <cmath>

namespace agp {

std::string to_string(MetricMode m) {
    switch (m) {
        case MetricMode::shared: return "shared";
        case MetricMode::per_center_univariate: return "per_center_univariate";
        case MetricMode::per_center_multivariate: return "per_center_multivariate";
    }
    return "unknown";
}

MetricMode metric_mode_from_string(const std::string& s) {
    if (s == "shared") return MetricMode::shared;
    if (s == "per_center_univariate") return MetricMode::per_center_univariate;
    if (s == "per_center_multivariate") return MetricMode::per_center_multivariate;
    throw std::invalid_argument("unknown metric mode: " + s);
}

KernelMetric shared_metric(double lengthscale) {
    if (!(lengthscale > 0.0)) {
        throw std::invalid_argument("shared_metric: lengthscale must be positive");
    }
    KernelMetric m;
    m.mode = MetricMode::shared;
    m.shared_lengthscale = lengthscale;
    return m;
}

KernelMetric univariate_metric(Vector lengthscales) {
    KernelMetric m;
    m.mode = MetricMode::per_center_univariate;
    m.lengthscales = std::move(lengthscales);
    return m;
}

KernelMetric multivariate_metric(std::vector<Matrix> precisions) {
    KernelMetric m;
    m.mode = MetricMode::per_center_multivariate;
    m.precisions = std::move(precisions);
    return m;
}

void validate_metric(const KernelMetric& metric, int n_centers, int dim) {
    switch (metric.mode) {
        case MetricMode::shared:
            if (!(metric.shared_lengthscale > 0.0)) {
                throw std::invalid_argument("metric: shared lengthscale must be positive");
            }
            break;
        case MetricMode::per_center_univariate:
            if (metric.lengthscales.size() != n_centers) {
                throw std::invalid_argument("metric: expected one lengthscale per center");
            }
            for (Eigen::Index i = 0; i < metric.lengthscales.size(); ++i) {
                if (!(metric.lengthscales(i) > 0.0)) {
                    throw std::invalid_argument("metric: lengthscale " + std::to_string(i) +
                                                " is not positive");
                }
            }
            break;
        case MetricMode::per_center_multivariate:
            if (static_cast<int>(metric.precisions.size()) != n_centers) {
                throw std::invalid_argument("metric: expected one precision matrix per center");
            }
            for (size_t i = 0; i < metric.precisions.size(); ++i) {
                const Matrix& p = metric.precisions[i];
                if (p.rows() != dim || p.cols() != dim) {
                    throw std::invalid_argument("metric: precision " + std::to_string(i) +
                                                " has wrong shape");
                }
                if (!is_symmetric(p)) {
                    throw std::invalid_argument("metric: precision " + std::to_string(i) +
                                                " is not symmetric");
                }
                if (min_eigenvalue(p) < -1e-10) {
                    throw std::invalid_argument("metric: precision " + std::to_string(i) +
                                                " is not PSD");
                }
            }
            break;
    }
}

double k_univariate(const Vector& center, const Vector& x, double lengthscale) {
    if (!(lengthscale > 0.0)) {
        throw std::invalid_argument("k_univariate: lengthscale must be positive");
    }
    if (center.size() != x.size()) {
        throw std::invalid_argument("k_univariate: dimension mismatch");
    }
    const double d2 = (center - x).squaredNorm();
    return std::exp(-d2 / (2.0 * lengthscale * lengthscale));
}

double k_multivariate(const Vector& center, const Vector& x, const Matrix& precision) {
    if (center.size() != x.size() || precision.rows() != center.size() ||
        precision.cols() != center.size()) {
        throw std::invalid_argument("k_multivariate: dimension mismatch");
    }
    if (!is_symmetric(precision)) {
        throw std::invalid_argument("k_multivariate: precision is not symmetric");
    }
    const Vector d = center - x;
    double q = d.dot(precision * d);
    if (q < 0.0) {
        // PSD metrics keep the quadratic form non-negative up to rounding.
        if (q < -1e-9 * std::max(1.0, d.squaredNorm())) {
            throw std::invalid_argument("k_multivariate: precision is indefinite");
        }
        q = 0.0;
    }
    return std::exp(-0.5 * q);
}

double dk_dl(const Vector& center, const Vector& x, double lengthscale) {
    const double k = k_univariate(center, x, lengthscale);
    const double d2 = (center - x).squaredNorm();
    return d2 / (lengthscale * lengthscale * lengthscale) * k;
}

Matrix dk_dP(const Vector& center, const Vector& x, const Matrix& precision) {
    const double k = k_multivariate(center, x, precision);
    const Vector d = center - x;
    return -0.5 * k * (d * d.transpose());
}

namespace {

double k_for_center(const CenterSet& centers, const KernelMetric& metric, int i,
                    const Vector& x) {
    const Vector ci = centers.centers.row(i).transpose();
    switch (metric.mode) {
        case MetricMode::shared:
            return k_univariate(ci, x, metric.shared_lengthscale);
        case MetricMode::per_center_univariate:
            return k_univariate(ci, x, metric.lengthscales(i));
        case MetricMode::per_center_multivariate:
            return k_multivariate(ci, x, metric.precisions[i]);
    }
    return 0.0;
}

}  // namespace

Matrix kernel_matrix(const CenterSet& centers, const KernelMetric& metric, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("kernel_matrix: sigma must be non-negative");
    const int n = centers.count();
    Matrix k(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            k(i, j) = k_for_center(centers, metric, i, centers.centers.row(j).transpose());
        }
        k(i, i) += sigma * sigma;
    }
    return k;
}

Vector kernel_vector(const CenterSet& centers, const KernelMetric& metric, const Vector& x) {
    if (x.size() != centers.dim()) {
        throw std::invalid_argument("kernel_vector: x has dimension " + std::to_string(x.size()) +
                                    ", centers have " + std::to_string(centers.dim()));
    }
    const int n = centers.count();
    Vector kv(n);
    for (int i = 0; i < n; ++i) kv(i) = k_for_center(centers, metric, i, x);
    return kv;
}

}  // namespace agp
