#include "agp/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "agp/metrics.hpp"

namespace agp {

std::vector<GridPoint> default_grid(const CenterSet& centers) {
    const int n = centers.count();
    std::vector<double> dists;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            dists.push_back((centers.centers.row(i) - centers.centers.row(j)).norm());
        }
    }
    double median = 1.0;
    if (!dists.empty()) {
        std::sort(dists.begin(), dists.end());
        median = dists[dists.size() / 2];
        if (!(median > 0.0)) median = 1.0;
    }

    std::vector<GridPoint> grid;
    const double lo = 0.1 * median;
    const double hi = 10.0 * median;
    for (int k = 0; k < 8; ++k) {
        const double l = lo * std::pow(hi / lo, static_cast<double>(k) / 7.0);
        for (double sigma : {1e-3, 1e-2, 1e-1}) grid.push_back({l, sigma});
    }
    return grid;
}

namespace {

KernelMetric expand_metric(MetricMode mode, double lengthscale, int n_centers, int dim) {
    switch (mode) {
        case MetricMode::shared:
            return shared_metric(lengthscale);
        case MetricMode::per_center_univariate:
            return univariate_metric(Vector::Constant(n_centers, lengthscale));
        case MetricMode::per_center_multivariate: {
            const Matrix p = Matrix::Identity(dim, dim) / (lengthscale * lengthscale);
            return multivariate_metric(std::vector<Matrix>(n_centers, p));
        }
    }
    throw std::invalid_argument("expand_metric: unknown mode");
}

double validation_score(const ModelState& state, const Dataset& validation, double target_var) {
    const Vector preds = predict_all(state, validation.features);
    const double mse = (preds - validation.targets).squaredNorm() / validation.size();
    return target_var > 0.0 ? std::sqrt(mse / target_var) : mse;
}

}  // namespace

GridInitResult grid_init(const CenterSet& centers, const Dataset& validation,
                         const std::vector<GridPoint>& grid, MetricMode mode) {
    if (grid.empty()) throw std::invalid_argument("grid_init: empty grid");
    if (validation.size() < 1) throw std::invalid_argument("grid_init: empty validation set");

    const double target_var = population_variance(validation.targets);
    double best_score = std::numeric_limits<double>::infinity();
    GridPoint best;
    bool found = false;
    for (const GridPoint& point : grid) {
        double score;
        try {
            const ModelState state =
                make_model(centers, shared_metric(point.lengthscale), point.sigma);
            score = validation_score(state, validation, target_var);
        } catch (const NumericalError&) {
            continue;
        }
        if (!std::isfinite(score)) continue;
        if (score < best_score) {
            best_score = score;
            best = point;
            found = true;
        }
    }
    if (!found) {
        throw NumericalError("grid_init: every grid point produced a non-finite score");
    }

    GridInitResult out;
    out.metric = expand_metric(mode, best.lengthscale, centers.count(), centers.dim());
    out.sigma = best.sigma;
    out.best = best;
    out.best_score = best_score;
    return out;
}

namespace {

Dataset take_batch(const Dataset& pool, const std::vector<int>& order, int begin, int end) {
    Dataset batch;
    batch.features.resize(end - begin, pool.dim());
    batch.targets.resize(end - begin);
    for (int i = begin; i < end; ++i) {
        batch.features.row(i - begin) = pool.features.row(order[i]);
        batch.targets(i - begin) = pool.targets(order[i]);
    }
    return batch;
}

void check_finite_univariate(const Vector& g) {
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g(i))) {
            throw NumericalError("sgd_epoch: non-finite gradient for center " +
                                 std::to_string(i));
        }
    }
}

void check_finite_multivariate(const std::vector<Matrix>& g) {
    for (size_t i = 0; i < g.size(); ++i) {
        if (!g[i].allFinite()) {
            throw NumericalError("sgd_epoch: non-finite gradient for center " +
                                 std::to_string(i));
        }
    }
}

}  // namespace

ModelState sgd_epoch(ModelState state, const Dataset& pool, const TrainConfig& cfg,
                     Velocity& velocity, Rng& rng, const UpdateObserver& observer) {
    if (pool.size() < 1) throw std::invalid_argument("sgd_epoch: empty training pool");
    if (cfg.batch_size < 1) throw std::invalid_argument("sgd_epoch: batch_size must be positive");
    const MetricMode mode = state.metric.mode;
    if (mode == MetricMode::shared) {
        throw std::invalid_argument("sgd_epoch: shared metrics are grid-searched, not optimized");
    }
    const int n = state.centers.count();
    const int d = state.centers.dim();
    if (mode == MetricMode::per_center_univariate && velocity.lengthscales.size() != n) {
        velocity.lengthscales = Vector::Zero(n);
    }
    if (mode == MetricMode::per_center_multivariate &&
        static_cast<int>(velocity.precisions.size()) != n) {
        velocity.precisions.assign(n, Matrix::Zero(d, d));
    }

    std::vector<int> order(pool.size());
    for (int i = 0; i < pool.size(); ++i) order[i] = i;
    rng.shuffle(order);

    for (int begin = 0; begin < pool.size(); begin += cfg.batch_size) {
        const int end = std::min<int>(pool.size(), begin + cfg.batch_size);
        const Dataset batch = take_batch(pool, order, begin, end);

        if (mode == MetricMode::per_center_univariate) {
            Vector g = grad_univariate(state, batch, cfg.mu);
            check_finite_univariate(g);
            for (int i = 0; i < n; ++i) {
                if (std::abs(g(i)) > cfg.grad_clip) {
                    g(i) = std::copysign(cfg.grad_clip, g(i));
                }
            }
            velocity.lengthscales = cfg.momentum * velocity.lengthscales - cfg.learning_rate * g;
            state.metric.lengthscales += velocity.lengthscales;
            for (int i = 0; i < n; ++i) {
                state.metric.lengthscales(i) =
                    std::max(state.metric.lengthscales(i), cfg.lengthscale_floor);
            }
            state = refresh(std::move(state));
            if (observer) observer(UpdateEvent{state, &g, nullptr});
        } else {
            std::vector<Matrix> g = grad_multivariate(state, batch, cfg.mu);
            check_finite_multivariate(g);
            for (int i = 0; i < n; ++i) {
                const double norm = g[i].norm();
                if (norm > cfg.grad_clip) g[i] *= cfg.grad_clip / norm;
            }
            for (int i = 0; i < n; ++i) {
                velocity.precisions[i] =
                    cfg.momentum * velocity.precisions[i] - cfg.learning_rate * g[i];
                state.metric.precisions[i] += velocity.precisions[i];
                if (cfg.psd_project) {
                    state.metric.precisions[i] = project_psd(state.metric.precisions[i]);
                }
            }
            state = refresh(std::move(state));
            if (observer) observer(UpdateEvent{state, nullptr, &g});
        }
    }
    return state;
}

FitResult fit(const Dataset& data, const Dataset& validation, const CenterSet& centers,
              const TrainConfig& cfg, MetricMode mode, const UpdateObserver& observer) {
    if (cfg.grid.empty()) throw std::invalid_argument("fit: grid must be non-empty");
    if (validation.size() < 1) throw std::invalid_argument("fit: empty validation set");

    const GridInitResult init = grid_init(centers, validation, cfg.grid, mode);
    ModelState state = make_model(centers, init.metric, init.sigma);

    const Dataset pool = non_center_samples(data, centers);
    if (pool.size() < 1) throw std::invalid_argument("fit: SGD training pool is empty");

    auto record = [&](const ModelState& s, double seconds) {
        EpochStats stats;
        stats.train_loss = loss(s, pool, cfg.mu).total / pool.size();
        stats.validation_loss = loss(s, validation, cfg.mu).data_fit / validation.size();
        stats.seconds = seconds;
        return stats;
    };

    FitResult out;
    out.trace.epochs.push_back(record(state, 0.0));
    out.trace.best_epoch = 0;
    out.model = state;
    double best_val = out.trace.epochs[0].validation_loss;

    if (mode == MetricMode::shared) return out;  // nothing to optimize beyond the grid

    Velocity velocity;
    Rng rng(cfg.seed);
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        state = sgd_epoch(std::move(state), pool, cfg, velocity, rng, observer);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.trace.epochs.push_back(record(state, seconds));
        if (out.trace.epochs.back().validation_loss < best_val) {
            best_val = out.trace.epochs.back().validation_loss;
            out.trace.best_epoch = epoch;
            out.model = state;
        }
    }
    return out;
}

void write_trace_csv(const TrainTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open file for writing: " + path);
    out << "epoch,train_loss,validation_loss,seconds\n";
    char buf[160];
    for (size_t e = 0; e < trace.epochs.size(); ++e) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.6f\n", e, trace.epochs[e].train_loss,
                      trace.epochs[e].validation_loss, trace.epochs[e].seconds);
        out << buf;
    }
}

}  // namespace agp
