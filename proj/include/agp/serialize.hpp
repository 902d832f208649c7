#pragma once

#include <optional>
#include <string>

#include "agp/dataset.hpp"
#include "agp/model.hpp"

namespace agp {

/// Everything a model file carries besides the state itself: the feature
/// standardization fitted at training time and the training-target variance
/// used to normalize evaluation-time NRMSE.
struct LoadedModel {
    ModelState state;
    std::optional<Standardization> standardization;
    double train_target_variance = 1.0;
};

/// Writes the model as JSON. Numbers use 17 significant digits, so values
/// round-trip exactly and identical models produce byte-identical files.
void save_model(const ModelState& state, const std::optional<Standardization>& standardization,
                double train_target_variance, const std::string& path);

/// Parses a model file, validates its invariants and rebuilds the caches.
LoadedModel load_model(const std::string& path);

}  // namespace agp
