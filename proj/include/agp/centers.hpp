#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agp/dataset.hpp"
#include "agp/linalg.hpp"

namespace agp {

enum class CenterMethod { kmeans, random, fixed };

std::string to_string(CenterMethod m);
CenterMethod center_method_from_string(const std::string& s);

/// Representative training points used as the rows/columns of the training
/// kernel matrix, each carrying a target value.
struct CenterSet {
    Matrix centers;  // N x D
    Vector targets;  // N
    CenterMethod method = CenterMethod::fixed;
    std::vector<int> member_indices;  // kmeans: cluster id per training sample
    std::vector<int> source_indices;  // random: selected sample rows

    int count() const { return static_cast<int>(centers.rows()); }
    int dim() const { return static_cast<int>(centers.cols()); }
};

/// Lloyd's algorithm with k-means++ seeding. Each center's target is the
/// mean of its members' targets. Empty clusters are re-seeded from the point
/// farthest from its assigned center.
CenterSet kmeans(const Dataset& data, int n_centers, uint64_t seed, int max_iter = 100);

/// n_centers distinct samples drawn uniformly without replacement; each
/// center keeps its sample's target.
CenterSet random_centers(const Dataset& data, int n_centers, uint64_t seed);

/// The SGD training pool: samples that do not define centers. Random centers
/// are removed by index; kmeans centroids are synthetic points, so every
/// sample stays; fixed centers are removed by exact feature match.
Dataset non_center_samples(const Dataset& data, const CenterSet& centers);

/// Builds a CenterSet directly from given points and targets.
CenterSet fixed_centers(Matrix points, Vector targets);

/// Uses every sample of `data` as a center (the degenerate full-GP setup).
CenterSet all_samples_as_centers(const Dataset& data);

}  // namespace agp
