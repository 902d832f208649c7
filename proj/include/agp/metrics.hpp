#pragma once

#include <string>

#include "agp/linalg.hpp"

namespace agp {

struct EvalResult {
    double mse = 0.0;
    double rmse = 0.0;
    double nrmse = 0.0;
    int n = 0;
    double train_target_variance = 0.0;
};

/// MSE/RMSE over the residuals, and NRMSE = RMSE / sqrt(train target
/// variance).
EvalResult evaluate(const Vector& predictions, const Vector& targets,
                    double train_target_variance);

/// Population variance (divide by n).
double population_variance(const Vector& values);

std::string render_table(const EvalResult& r);
std::string to_csv(const EvalResult& r);  // header line + one data row

}  // namespace agp
