#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace otdro {

inline constexpr std::array<double, 4> kDefaultTailThresholds{200.0, 500.0, 1000.0, 3000.0};

struct TailRow {
    double q = 0.0;       // threshold, EUR/MWh
    std::size_t count = 0;  // prices >= q
    double freq = 0.0;    // count / N
    double epsilon_q = 0.0;  // q * freq
};

struct TailReport {
    std::vector<TailRow> rows;
    std::size_t n_obs = 0;
    std::optional<double> p_hat;
};

// Exceedance table of the up-regulation price. Thresholds must be positive
// and strictly increasing.
TailReport tail_exceedance(std::span<const double> prices,
                           std::span<const double> thresholds = kDefaultTailThresholds);

// Negative OLS slope of log(freq) on log(q) over thresholds with count > 0.
double estimate_tail_exponent(std::span<const TailRow> rows);
double estimate_tail_exponent(std::span<const double> prices,
                              std::span<const double> thresholds = kDefaultTailThresholds);

// Fills p_hat when at least two thresholds have exceedances.
void attach_tail_exponent(TailReport& report);

struct RadiusClamp {
    double lower = 0.0;
    double upper = 1e9;
};

// {min, median, max} of the nonzero epsilon_q values, each first rounded to
// one decimal (an even-count median is the midpoint rounded to two decimals),
// then clamped into [clamp.lower, clamp.upper].
std::array<double, 3> suggest_radii(std::span<const TailRow> rows, RadiusClamp clamp = {});

// Table-style CSV: q,count,freq,freq_percent,epsilon_q plus '#' footer lines.
std::string to_csv(const TailReport& report);

}  // namespace otdro
