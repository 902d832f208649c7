#include "agp/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace agp {

EvalResult evaluate(const Vector& predictions, const Vector& targets,
                    double train_target_variance) {
    if (predictions.size() != targets.size()) {
        throw std::invalid_argument("evaluate: predictions and targets differ in length (" +
                                    std::to_string(predictions.size()) + " vs " +
                                    std::to_string(targets.size()) + ")");
    }
    if (predictions.size() < 1) throw std::invalid_argument("evaluate: empty input");
    if (!(train_target_variance > 0.0)) {
        throw std::invalid_argument("evaluate: train target variance must be positive");
    }

    EvalResult r;
    r.n = static_cast<int>(predictions.size());
    r.train_target_variance = train_target_variance;
    r.mse = (predictions - targets).squaredNorm() / r.n;
    r.rmse = std::sqrt(r.mse);
    r.nrmse = r.rmse / std::sqrt(train_target_variance);
    return r;
}

double population_variance(const Vector& values) {
    if (values.size() < 1) throw std::invalid_argument("population_variance: empty input");
    const double mean = values.mean();
    return (values.array() - mean).square().sum() / values.size();
}

std::string render_table(const EvalResult& r) {
    char buf[256];
    std::ostringstream out;
    std::snprintf(buf, sizeof(buf), "%-8s %.6f\n", "mse", r.mse);
    out << buf;
    std::snprintf(buf, sizeof(buf), "%-8s %.6f\n", "rmse", r.rmse);
    out << buf;
    std::snprintf(buf, sizeof(buf), "%-8s %.6f\n", "nrmse", r.nrmse);
    out << buf;
    std::snprintf(buf, sizeof(buf), "%-8s %d\n", "n", r.n);
    out << buf;
    return out.str();
}

std::string to_csv(const EvalResult& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "mse,rmse,nrmse,n,train_target_variance\n%.17g,%.17g,%.17g,%d,%.17g\n",
                  r.mse, r.rmse, r.nrmse, r.n, r.train_target_variance);
    return buf;
}

}  // namespace agp
