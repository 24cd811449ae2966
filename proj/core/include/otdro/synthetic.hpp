#pragma once

#include <cstddef>
#include <cstdint>

#include "otdro/market_data.hpp"

namespace otdro {

// Parameters of the desk-scale market simulator. Prices in EUR/MWh,
// volumes in MWh.
struct SyntheticConfig {
    Timestamp start = parse_timestamp("2017-01-01T00:00:00Z");
    std::size_t hours = 8760;
    std::size_t ensemble_size = 52;

    double capacity_mwh = 100.0;
    double generation_persistence = 0.97;  // AR(1) coefficient of the latent wind state

    double spot_mean = 40.0;
    double spot_daily_amplitude = 8.0;
    double spot_noise_sd = 6.0;
    double spot_persistence = 0.9;

    // Outside spikes r- = s - U*spread and r+ = s + U*spread, U ~ U[0,1).
    double regulation_spread_max = 20.0;

    // Up-regulation spikes: with this per-hour probability r+ is raised to a
    // level Y drawn from a Pareto law P(Y >= y) ~ y^-p on [spike_scale, tail_cap].
    double spike_probability = 0.01;
    double spike_scale = 100.0;
    double tail_exponent = 1.0;
    double tail_cap = 4000.0;

    // Down-regulation crashes: r- is lowered by an independent draw of the same law.
    double down_spike_probability = 0.0;

    // Ensemble member = g + common hourly error + member error, clipped at 0;
    // both standard deviations are fractions of capacity.
    double forecast_error_sd = 0.08;
    double ensemble_spread_sd = 0.05;

    // Frequent Pareto spikes in r+ capped at 4000 EUR/MWh.
    static SyntheticConfig spike_heavy();
};

// Throws DataError on invalid parameters.
void check(const SyntheticConfig& config);

// Deterministic in (config, seed) on every platform: uses mt19937_64 with
// hand-rolled variate transforms rather than std distributions.
Dataset generate_synthetic(const SyntheticConfig& config, std::uint64_t seed);

// Inverse CDF of the truncated Pareto law on [scale, cap] with exponent p.
double truncated_pareto_quantile(double u, double scale, double cap, double p);

}  // namespace otdro
