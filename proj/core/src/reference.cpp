#include "otdro/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "otdro/error.hpp"

namespace otdro {
namespace {

using Key = std::pair<double, std::size_t>;  // (distance, training index)

}  // namespace

std::size_t neighbor_count(std::size_t n, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DataError("alpha must lie in (0, 1]");
    // Guard against alpha*n landing a rounding error above an integer.
    const double k = std::ceil(alpha * static_cast<double>(n) - 1e-9);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(k, 1.0)), 1, n);
}

NeighborSelection select_neighbors(std::span<const double> train_forecasts, double f, double alpha) {
    const std::size_t n = train_forecasts.size();
    if (n == 0) throw DataError("select_neighbors: empty training set");
    if (!std::isfinite(f)) throw DataError("select_neighbors: non-finite forecast");
    const std::size_t k = neighbor_count(n, alpha);

    std::vector<Key> keys(n);
    for (std::size_t i = 0; i < n; ++i) keys[i] = {std::abs(f - train_forecasts[i]), i};
    if (k < n) std::nth_element(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(k - 1), keys.end());
    keys.resize(k);
    std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) { return a.second < b.second; });

    NeighborSelection sel;
    sel.indices.reserve(k);
    sel.distances.reserve(k);
    for (const auto& [d, i] : keys) {
        sel.indices.push_back(i);
        sel.distances.push_back(d);
        sel.d_max = std::max(sel.d_max, d);
    }
    return sel;
}

std::vector<double> compute_weights(std::span<const double> distances, double d_max, double beta) {
    if (distances.empty()) throw DataError("compute_weights: no distances");
    if (!(beta > 0.0)) throw DataError("compute_weights: beta must be positive");
    if (!(d_max >= 0.0)) throw DataError("compute_weights: d_max must be nonnegative");
    for (double d : distances) {
        if (!(d >= 0.0) || d > d_max) throw DataError("compute_weights: distance outside [0, d_max]");
    }
    const double n = static_cast<double>(distances.size());
    std::vector<double> w(distances.size(), 1.0 / n);
    if (d_max == 0.0) return w;

    double total = 0.0;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        w[i] = std::pow(1.0 - distances[i] / d_max, beta);
        total += w[i];
    }
    if (total == 0.0) {
        std::fill(w.begin(), w.end(), 1.0 / n);
        return w;
    }
    for (double& x : w) x /= total;
    return w;
}

EmpiricalDistribution build_reference(const TrainingView& train, double f, const ReferenceOptions& options) {
    if (train.forecasts.size() != train.records.size()) {
        throw DataError("build_reference: forecasts and records differ in length");
    }
    const NeighborSelection sel = select_neighbors(train.forecasts, f, options.alpha);
    const std::vector<double> w = compute_weights(sel.distances, sel.d_max, options.beta);

    std::vector<std::size_t> kept;
    kept.reserve(w.size());
    for (std::size_t j = 0; j < w.size(); ++j)
        if (w[j] > 0.0) kept.push_back(j);

    if (options.max_samples) {
        if (*options.max_samples == 0) throw DataError("build_reference: max_samples must be positive");
        if (kept.size() > *options.max_samples) {
            const auto cap = static_cast<std::ptrdiff_t>(*options.max_samples);
            // Heaviest atoms = nearest forecasts; ties by training index.
            std::nth_element(kept.begin(), kept.begin() + cap - 1, kept.end(), [&](std::size_t a, std::size_t b) {
                return Key{sel.distances[a], sel.indices[a]} < Key{sel.distances[b], sel.indices[b]};
            });
            kept.resize(static_cast<std::size_t>(cap));
            std::sort(kept.begin(), kept.end());
        }
    }

    double total = 0.0;
    for (auto j : kept) total += w[j];

    EmpiricalDistribution dist;
    dist.samples.reserve(kept.size());
    dist.weights.reserve(kept.size());
    dist.source_indices.reserve(kept.size());
    for (auto j : kept) {
        const std::size_t i = sel.indices[j];
        dist.samples.push_back(train.records[i].as_vector());
        dist.weights.push_back(w[j] / total);
        dist.source_indices.push_back(i);
    }
    return dist;
}

}  // namespace otdro
