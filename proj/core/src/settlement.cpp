#include "otdro/settlement.hpp"

#include <algorithm>
#include <cmath>

#include "otdro/error.hpp"
#include "otdro/text.hpp"

namespace otdro {

double settle_profit(double n, const std::array<double, 4>& x) {
    const double g = x[0], s = x[1], rm = x[2], rp = x[3];
    return n * s + std::max(g - n, 0.0) * rm - std::max(n - g, 0.0) * rp;
}

double settle_profit_rewrite(double n, const std::array<double, 4>& x) {
    const double g = x[0], s = x[1], rm = x[2], rp = x[3];
    return n * s - std::max((n - g) * rp, (n - g) * rm);
}

ProfitSeries accumulate_profit(std::vector<Timestamp> times, std::vector<double> hourly) {
    if (times.size() != hourly.size()) throw DataError("profit series: timestamps and profits differ in length");
    ProfitSeries out;
    out.cumulative.resize(hourly.size());
    double running = 0.0;
    for (std::size_t t = 0; t < hourly.size(); ++t) {
        running = t == 0 ? hourly[0] : running + hourly[t];
        out.cumulative[t] = running;
    }
    out.times = std::move(times);
    out.hourly = std::move(hourly);
    return out;
}

ProfitSeries cumulative_profit(std::span<const Nomination> nominations, std::span<const MarketRecord> records) {
    if (nominations.size() != records.size())
        throw DataError("cumulative_profit: " + std::to_string(nominations.size()) + " nominations for " +
                        std::to_string(records.size()) + " records");
    std::vector<Timestamp> times(nominations.size());
    std::vector<double> hourly(nominations.size());
    for (std::size_t t = 0; t < nominations.size(); ++t) {
        if (nominations[t].time != records[t].time)
            throw DataError("cumulative_profit: nomination at " + format_timestamp(nominations[t].time) +
                            " does not match record at " + format_timestamp(records[t].time));
        times[t] = nominations[t].time;
        hourly[t] = settle_profit(nominations[t].n, records[t]);
    }
    return accumulate_profit(std::move(times), std::move(hourly));
}

DropStats drop_statistics(std::span<const double> p) {
    DropStats out;
    if (p.empty()) throw DataError("drop_statistics: empty series");
    std::size_t peak = 0;
    std::size_t t = 1;
    while (t < p.size()) {
        if (p[t] >= p[peak]) {
            peak = t++;
            continue;
        }
        Drop d;
        d.start = peak;
        d.trough = t;
        std::size_t u = t;
        for (; u < p.size(); ++u) {
            if (p[u] >= p[peak]) break;
            if (p[u] < p[d.trough]) d.trough = u;
        }
        d.magnitude = p[peak] - p[d.trough];
        d.recovered = u < p.size();
        d.end = d.recovered ? u : p.size() - 1;
        out.drops.push_back(d);
        if (!d.recovered) break;
        peak = u;
        t = u + 1;
    }
    if (!out.drops.empty()) {
        double sum = 0.0;
        for (const auto& d : out.drops) sum += d.magnitude;
        out.mean = sum / static_cast<double>(out.drops.size());
        double ss = 0.0;
        for (const auto& d : out.drops) ss += (d.magnitude - out.mean) * (d.magnitude - out.mean);
        out.std = std::sqrt(ss / static_cast<double>(out.drops.size()));
    }
    return out;
}

std::vector<SeasonDelta> seasonal_comparison(std::span<const SeasonProfit> strategy,
                                             std::span<const SeasonProfit> baseline) {
    if (strategy.size() != baseline.size())
        throw DataError("seasonal_comparison: strategy has " + std::to_string(strategy.size()) +
                        " seasons, baseline has " + std::to_string(baseline.size()));
    std::vector<SeasonDelta> out;
    out.reserve(strategy.size());
    for (const auto& s : strategy) {
        const auto it = std::find_if(baseline.begin(), baseline.end(),
                                     [&](const SeasonProfit& b) { return b.label == s.label; });
        if (it == baseline.end()) throw DataError("seasonal_comparison: season '" + s.label + "' missing from baseline");
        SeasonDelta d{s.label, std::nullopt};
        if (it->profit != 0.0) d.percent = 100.0 * (s.profit - it->profit) / std::abs(it->profit);
        out.push_back(std::move(d));
    }
    return out;
}

std::string format_percent(const std::optional<double>& percent) {
    if (!percent) return "NA";
    std::string s = format_fixed(*percent, 2);
    if (s != "0.00" && s.front() != '-') s.insert(s.begin(), '+');
    return s;
}

}  // namespace otdro
