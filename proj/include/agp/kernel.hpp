#pragma once

#include <string>
#include <vector>

#include "agp/centers.hpp"
#include "agp/linalg.hpp"

namespace agp {

enum class MetricMode { shared, per_center_univariate, per_center_multivariate };

std::string to_string(MetricMode m);
MetricMode metric_mode_from_string(const std::string& s);

/// Kernel metric parameters: one shared lengthscale, one lengthscale per
/// center, or one symmetric PSD precision matrix per center.
struct KernelMetric {
    MetricMode mode = MetricMode::shared;
    double shared_lengthscale = 1.0;
    Vector lengthscales;             // per_center_univariate: N entries
    std::vector<Matrix> precisions;  // per_center_multivariate: N matrices, D x D
};

KernelMetric shared_metric(double lengthscale);
KernelMetric univariate_metric(Vector lengthscales);
KernelMetric multivariate_metric(std::vector<Matrix> precisions);

/// Checks mode-appropriate fields: positive lengthscales, symmetric PSD
/// precisions, sizes consistent with n_centers and dim.
void validate_metric(const KernelMetric& metric, int n_centers, int dim);

/// exp(-||center - x||^2 / (2 l^2)), in (0, 1].
double k_univariate(const Vector& center, const Vector& x, double lengthscale);

/// exp(-1/2 (center - x)^T P (center - x)), in (0, 1].
double k_multivariate(const Vector& center, const Vector& x, const Matrix& precision);

/// d/dl of k_univariate: (||center - x||^2 / l^3) * k.
double dk_dl(const Vector& center, const Vector& x, double lengthscale);

/// dK/dP of k_multivariate: -1/2 (center - x)(center - x)^T * k, a symmetric
/// D x D matrix.
Matrix dk_dP(const Vector& center, const Vector& x, const Matrix& precision);

/// Center-to-center kernel matrix plus sigma^2 on the diagonal. Entry (i, j)
/// is evaluated under center i's metric, so the matrix is asymmetric as soon
/// as per-center metrics differ.
Matrix kernel_matrix(const CenterSet& centers, const KernelMetric& metric, double sigma);

/// Kernel values from every center to x, entry i under center i's metric.
Vector kernel_vector(const CenterSet& centers, const KernelMetric& metric, const Vector& x);

}  // namespace agp
