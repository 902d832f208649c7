#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agp/dataset.hpp"
#include "agp/train.hpp"

namespace agp {

/// Pixel-intensity prediction on the two-blob image: a shared-metric GP on
/// the two blob centers, then the per-center univariate and multivariate
/// models, all trained from the same sampled pixels.
struct BlobsConfig {
    int size = 64;
    uint64_t seed = 2;
    int train_pixels = 100;
    int validation_pixels = 100;
    int epochs = 500;
    // Lengthscales live on the normalized pixel scale (~0.1) while precision
    // entries are their inverse square (~10..100), so the two optimizations
    // need rates matching their parameter scales.
    double learning_rate = 1e-3;
    double multivariate_rate = 3e-1;
    double momentum = 0.9;
    int batch_size = 64;
    double mu = 1e-5;
};

struct BlobsModelRun {
    std::string name;  // "center-gp", "univariate-agp", "multivariate-agp"
    double nrmse = 0.0;
    Vector prediction;  // one value per pixel
    TrainTrace trace;
};

struct BlobsResult {
    Blobs blobs;
    double train_target_variance = 0.0;
    std::vector<BlobsModelRun> runs;
};

BlobsResult run_blobs(const BlobsConfig& cfg, const UpdateObserver& multivariate_observer = nullptr);

/// Lengthscale recovery on 1-D GP draws: how far the two estimated
/// per-center lengthscales sit from the generating one as the training size
/// grows, against a grid-searched shared-lengthscale baseline.
struct ConsistencyConfig {
    std::vector<int> sizes{32, 64, 128, 256};
    int repeats = 3;
    uint64_t seed = 21;
    double true_lengthscale = 13.5;
    double noise = 0.3;
    int epochs = 200;
    double learning_rate = 0.05;  // per-sample rate; the driver normalizes by pool size
    double momentum = 0.9;
    int batch_size = 64;
    double mu = 1e-5;
};

struct ConsistencyRow {
    int size = 0;
    double agp_mean = 0.0;      // mean distance of (l1, l2) to the truth
    double agp_std = 0.0;       // sample std over repeats
    double baseline_mean = 0.0; // grid-searched shared-metric distance
};

std::vector<ConsistencyRow> run_consistency(const ConsistencyConfig& cfg);

}  // namespace agp
