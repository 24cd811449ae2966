#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otdro/market_data.hpp"
#include "otdro/time.hpp"

namespace otdro {

// n*s + (g - n)_+ * r- - (n - g)_+ * r+
double settle_profit(double n, const std::array<double, 4>& x);
inline double settle_profit(double n, const MarketRecord& r) { return settle_profit(n, r.as_vector()); }

// n*s - max((n - g) * r+, (n - g) * r-). Equal to settle_profit whenever r- <= r+.
double settle_profit_rewrite(double n, const std::array<double, 4>& x);

struct Nomination {
    Timestamp time;
    double n = 0.0;
};

struct ProfitSeries {
    std::vector<Timestamp> times;
    std::vector<double> hourly;
    std::vector<double> cumulative;

    std::size_t size() const { return hourly.size(); }
};

// Settles each nomination against the record with the same timestamp. The
// two sequences must match one-to-one.
ProfitSeries cumulative_profit(std::span<const Nomination> nominations, std::span<const MarketRecord> records);
ProfitSeries accumulate_profit(std::vector<Timestamp> times, std::vector<double> hourly);

struct Drop {
    std::size_t start = 0;   // running maximum before the decline
    std::size_t trough = 0;
    std::size_t end = 0;     // first index back at or above the start level, or the last index
    double magnitude = 0.0;
    bool recovered = false;
};

struct DropStats {
    std::vector<Drop> drops;
    double mean = 0.0;
    double std = 0.0;  // population
};

DropStats drop_statistics(std::span<const double> cumulative);
inline DropStats drop_statistics(const ProfitSeries& series) { return drop_statistics(series.cumulative); }

struct SeasonProfit {
    std::string label;
    double profit = 0.0;
};

struct SeasonDelta {
    std::string label;
    std::optional<double> percent;  // empty when the baseline profit is 0
};

// 100 * (strategy - baseline) / |baseline| per season, in strategy order.
std::vector<SeasonDelta> seasonal_comparison(std::span<const SeasonProfit> strategy,
                                             std::span<const SeasonProfit> baseline);

// "+21.04", "-0.53", "0.00"; "NA" for an undefined delta.
std::string format_percent(const std::optional<double>& percent);

}  // namespace otdro
