#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "agp/model.hpp"
#include "agp/rng.hpp"

namespace agp {

struct GridPoint {
    double lengthscale = 1.0;
    double sigma = 0.0;
};

struct TrainConfig {
    double learning_rate = 1e-5;
    double momentum = 0.9;
    int batch_size = 64;
    double mu = 1e-5;
    int epochs = 0;
    uint64_t seed = 0;
    std::vector<GridPoint> grid;
    bool psd_project = true;          // project precisions after every update
    double lengthscale_floor = 1e-6;  // univariate positivity clamp
    double grad_clip = 1e3;           // per parameter-block norm clip
};

struct EpochStats {
    double train_loss = 0.0;       // (data fit + regularizer) / pool size
    double validation_loss = 0.0;  // mean squared residual on validation
    double seconds = 0.0;
};

struct TrainTrace {
    std::vector<EpochStats> epochs;  // entry 0 is the grid-initialized model
    int best_epoch = 0;
};

/// Momentum accumulator, shaped like the metric being optimized.
struct Velocity {
    Vector lengthscales;
    std::vector<Matrix> precisions;
};

/// Snapshot of a parameter update: the refreshed state plus the gradient
/// that produced it (one of the two pointers is null depending on the mode).
struct UpdateEvent {
    const ModelState& state;
    const Vector* grad_lengthscales = nullptr;
    const std::vector<Matrix>* grad_precisions = nullptr;
};

using UpdateObserver = std::function<void(const UpdateEvent&)>;

/// 8 log-spaced lengthscales spanning [0.1, 10] x the median pairwise center
/// distance, crossed with sigma in {1e-3, 1e-2, 1e-1}.
std::vector<GridPoint> default_grid(const CenterSet& centers);

struct GridInitResult {
    KernelMetric metric;
    double sigma = 0.0;
    GridPoint best;
    double best_score = 0.0;
};

/// Evaluates a shared-metric model on the validation set for every grid
/// point and returns the winner, expanded into the requested metric mode
/// (all lengthscales equal, or precisions l^-2 I).
GridInitResult grid_init(const CenterSet& centers, const Dataset& validation,
                         const std::vector<GridPoint>& grid, MetricMode mode);

/// One pass over the shuffled pool in mini-batches: gradient, velocity
/// update, parameter step, positivity clamp / cone projection, cache
/// refresh. Joint update of all per-center parameters per batch.
ModelState sgd_epoch(ModelState state, const Dataset& pool, const TrainConfig& cfg,
                     Velocity& velocity, Rng& rng, const UpdateObserver& observer = nullptr);

struct FitResult {
    ModelState model;
    TrainTrace trace;
};

/// grid_init followed by cfg.epochs of sgd_epoch; returns the snapshot with
/// the lowest validation loss, not the final state.
FitResult fit(const Dataset& data, const Dataset& validation, const CenterSet& centers,
              const TrainConfig& cfg, MetricMode mode, const UpdateObserver& observer = nullptr);

/// Trace as CSV: epoch,train_loss,validation_loss,seconds.
void write_trace_csv(const TrainTrace& trace, const std::string& path);

}  // namespace agp
