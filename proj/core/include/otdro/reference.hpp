#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "otdro/market_data.hpp"

namespace otdro {

// Weighted atoms over x = (g, s, r-, r+). Weights are nonnegative and sum to 1.
struct EmpiricalDistribution {
    std::vector<std::array<double, 4>> samples;
    std::vector<double> weights;
    std::vector<std::size_t> source_indices;  // positions in the training set

    std::size_t size() const { return samples.size(); }
};

// The ceil(alpha * N) training hours whose forecasts are closest to f,
// ordered by ascending training index. Ties at the cutoff distance go to the
// smaller training index.
struct NeighborSelection {
    std::vector<std::size_t> indices;
    std::vector<double> distances;  // |f - f_i|, parallel to indices
    double d_max = 0.0;
};

std::size_t neighbor_count(std::size_t n, double alpha);

NeighborSelection select_neighbors(std::span<const double> train_forecasts, double f, double alpha);

// w_i proportional to (1 - d_i / d_max)^beta. Entries with raw weight 0
// (d_i == d_max) come back as 0. If d_max == 0 or every raw weight is 0 the
// result is uniform.
std::vector<double> compute_weights(std::span<const double> distances, double d_max, double beta);

struct ReferenceOptions {
    double alpha = 1.0 / 3.0;
    double beta = 2.0;
    // Keep only the heaviest atoms (nearest forecasts) and renormalize.
    std::optional<std::size_t> max_samples;
};

// Training hours as parallel arrays: forecasts[i] is the mean forecast that
// was available for records[i].
struct TrainingView {
    std::span<const double> forecasts;
    std::span<const MarketRecord> records;
};

EmpiricalDistribution build_reference(const TrainingView& train, double f,
                                      const ReferenceOptions& options = {});

}  // namespace otdro
