#include "otdro/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "otdro/error.hpp"

namespace otdro {
namespace {

class Variates {
public:
    explicit Variates(std::uint64_t seed) : engine_(seed) {}

    // 53 random mantissa bits, uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

void require(bool ok, const char* what) {
    if (!ok) throw DataError(std::string("invalid synthetic config: ") + what);
}

}  // namespace

SyntheticConfig SyntheticConfig::spike_heavy() {
    SyntheticConfig c;
    c.spike_probability = 0.04;
    c.spike_scale = 100.0;
    c.tail_exponent = 1.0;
    c.tail_cap = 4000.0;
    return c;
}

void check(const SyntheticConfig& c) {
    require(c.hours > 0, "hours must be positive");
    require(c.ensemble_size > 0 && c.ensemble_size <= 999, "ensemble_size must be in [1, 999]");
    require(c.capacity_mwh > 0.0, "capacity_mwh must be positive");
    require(c.generation_persistence >= 0.0 && c.generation_persistence < 1.0,
            "generation_persistence must be in [0, 1)");
    require(c.spot_persistence >= 0.0 && c.spot_persistence < 1.0, "spot_persistence must be in [0, 1)");
    require(c.spot_noise_sd >= 0.0 && c.regulation_spread_max >= 0.0, "spreads must be nonnegative");
    require(c.spike_probability >= 0.0 && c.spike_probability <= 1.0, "spike_probability must be in [0, 1]");
    require(c.down_spike_probability >= 0.0 && c.down_spike_probability <= 1.0,
            "down_spike_probability must be in [0, 1]");
    require(c.tail_exponent > 0.0, "tail_exponent must be positive");
    require(c.spike_scale > 0.0 && c.tail_cap > c.spike_scale, "need 0 < spike_scale < tail_cap");
    require(c.forecast_error_sd >= 0.0 && c.ensemble_spread_sd >= 0.0, "forecast noise must be nonnegative");
    require(is_whole_hour(c.start), "start must be on a whole hour");
}

double truncated_pareto_quantile(double u, double scale, double cap, double p) {
    const double k = std::pow(scale / cap, p);
    return scale * std::pow(1.0 - u * (1.0 - k), -1.0 / p);
}

Dataset generate_synthetic(const SyntheticConfig& c, std::uint64_t seed) {
    check(c);
    Variates rng(seed);
    Dataset ds;
    ds.records.reserve(c.hours);
    ds.forecasts.reserve(c.hours);

    const double gen_innov = std::sqrt(1.0 - c.generation_persistence * c.generation_persistence);
    const double spot_innov = std::sqrt(1.0 - c.spot_persistence * c.spot_persistence);
    double wind = rng.normal();
    double spot_state = rng.normal();

    for (std::size_t h = 0; h < c.hours; ++h) {
        const Timestamp t = c.start + kHour * static_cast<long>(h);
        // Every hour consumes the same number of draws so that changing one
        // mechanism leaves the others' paths untouched.
        wind = c.generation_persistence * wind + gen_innov * rng.normal();
        spot_state = c.spot_persistence * spot_state + spot_innov * rng.normal();
        const double u_down = rng.uniform();
        const double u_up = rng.uniform();
        const double u_spike = rng.uniform();
        const double u_spike_level = rng.uniform();
        const double u_crash = rng.uniform();
        const double u_crash_level = rng.uniform();
        const double common_error = rng.normal();

        const auto hour_of_day = (t.time_since_epoch().count() / 3600) % 24;
        MarketRecord r;
        r.time = t;
        r.g = c.capacity_mwh / (1.0 + std::exp(-1.5 * wind));
        r.s = c.spot_mean +
              c.spot_daily_amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(hour_of_day - 8) / 24.0) +
              c.spot_noise_sd * spot_state;
        r.r_minus = r.s - u_down * c.regulation_spread_max;
        r.r_plus = r.s + u_up * c.regulation_spread_max;
        if (u_spike < c.spike_probability) {
            const double level = truncated_pareto_quantile(u_spike_level, c.spike_scale, c.tail_cap, c.tail_exponent);
            r.r_plus = std::max(r.r_plus, level);
        }
        if (u_crash < c.down_spike_probability) {
            r.r_minus -= truncated_pareto_quantile(u_crash_level, c.spike_scale, c.tail_cap, c.tail_exponent);
        }
        ds.records.push_back(r);

        ForecastRecord f;
        f.time = t;
        f.ensemble.resize(c.ensemble_size);
        const double shared = c.forecast_error_sd * c.capacity_mwh * common_error;
        for (auto& member : f.ensemble) {
            member = std::max(0.0, r.g + shared + c.ensemble_spread_sd * c.capacity_mwh * rng.normal());
        }
        f.f_mean = ensemble_mean(f.ensemble);
        ds.forecasts.push_back(std::move(f));
    }
    return ds;
}

}  // namespace otdro
