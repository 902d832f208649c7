#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agp/linalg.hpp"

namespace agp {

/// Per-dimension affine map fitted on training data. Dimensions with zero
/// variance keep std 1 (no-op) and are listed in constant_dims.
struct Standardization {
    Vector mean;
    Vector stddev;
    std::vector<int> constant_dims;
};

/// Feature rows with scalar targets. features is samples x dimensions.
struct Dataset {
    Matrix features;
    Vector targets;
    std::optional<Standardization> standardization;

    int size() const { return static_cast<int>(features.rows()); }
    int dim() const { return static_cast<int>(features.cols()); }
};

struct SplitSpec {
    int validation_count = 100;
    double test_fraction = 0.0;
    uint64_t rng_seed = 0;
};

struct Split {
    Dataset train;
    Dataset validation;
    Dataset test;
};

/// Loads a CSV file with a header row. The target column is selected by
/// header name, or by 0-based index when the string is an integer that
/// matches no header.
Dataset load_csv(const std::string& path, const std::string& target_column);

/// Writes header + rows with 17-significant-digit numbers (exact round-trip).
void write_csv(const Dataset& data, const std::string& path,
               const std::string& target_name = "target");

/// Fits per-dimension mean/std on `train` only and applies the same affine
/// map to every dataset in `others`.
std::pair<Dataset, std::vector<Dataset>> standardize(const Dataset& train,
                                                     const std::vector<Dataset>& others);

Dataset apply_standardization(const Dataset& data, const Standardization& stats);
Dataset invert_standardization(const Dataset& data, const Standardization& stats);

/// Seeded disjoint train/validation/test partition.
Split split(const Dataset& data, const SplitSpec& spec);

/// Synthetic image of two blobs (a circle and a 3:1 ellipse rotated 30
/// degrees) on a dark background with Gaussian-smoothed edges. Features are
/// [0,1]-normalized pixel coordinates, targets are intensities. The blob
/// centers, snapped to the pixel grid, are exposed as designated centers.
struct Blobs {
    Dataset data;  // pixel order: row-major, feature = (x, y)
    int width = 0;
    int height = 0;
    Matrix centers;         // 2 x 2 normalized coordinates
    Vector center_targets;  // intensity at those pixels
};

Blobs gen_blobs(int width, int height);

/// Squared-exponential covariance on a uniform n-point grid (unit signal
/// variance). The grid covers [0, span]; span <= 0 means spacing 1.
Matrix gp1d_covariance(int n, double lengthscale, double span = -1.0);

/// Draws targets on a uniform 1-D grid over [0, span] from a zero-mean GP
/// with squared-exponential covariance at the given lengthscale, plus
/// observation noise. span <= 0 means spacing 1. Deterministic under the
/// seed.
Dataset gen_gp_1d(int n, double lengthscale, double noise, uint64_t seed, double span = -1.0);

}  // namespace agp
