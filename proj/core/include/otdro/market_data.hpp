#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "otdro/time.hpp"

namespace otdro {

// One hour of realized market outcomes. The uncertainty vector of the
// nomination problem is (g, s, r_minus, r_plus).
struct MarketRecord {
    Timestamp time{};
    double g = 0.0;        // generation, MWh
    double s = 0.0;        // spot price, EUR/MWh
    double r_minus = 0.0;  // down-regulation price, EUR/MWh
    double r_plus = 0.0;   // up-regulation price, EUR/MWh

    std::array<double, 4> as_vector() const { return {g, s, r_minus, r_plus}; }

    friend bool operator==(const MarketRecord&, const MarketRecord&) = default;
};

struct ForecastRecord {
    Timestamp time{};
    std::vector<double> ensemble;
    double f_mean = 0.0;

    friend bool operator==(const ForecastRecord&, const ForecastRecord&) = default;
};

// Records and forecasts aligned hour by hour: records[i].time == forecasts[i].time.
struct Dataset {
    std::vector<MarketRecord> records;
    std::vector<ForecastRecord> forecasts;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

template <typename T>
struct Ingested {
    std::vector<T> rows;
    std::vector<std::string> warnings;
};

inline constexpr const char* kMarketHeader =
    "time,generation_mwh,spot_eur_mwh,down_reg_eur_mwh,up_reg_eur_mwh";

// Market CSV ingestion. Rows are sorted by time; duplicates, gaps, malformed
// or non-finite values and negative generation raise DataError with the line
// number (and column where applicable).
Ingested<MarketRecord> read_market_csv(std::istream& in, const std::string& source = "<stream>");
Ingested<MarketRecord> ingest_market_csv(const std::filesystem::path& path);

std::string forecast_header(std::size_t ensemble_size);

// Forecast CSV ingestion (`time,ens_001,...,ens_NNN`). An empty input yields
// an empty set and a warning.
Ingested<ForecastRecord> read_forecast_csv(std::istream& in, std::size_t ensemble_size,
                                           const std::string& source = "<stream>");
Ingested<ForecastRecord> ingest_forecast_csv(const std::filesystem::path& path,
                                             std::size_t ensemble_size);

// Emit in the ingestion schema with shortest round-trip number formatting,
// so that ingest(emit(x)) == x bit for bit.
void write_market_csv(std::ostream& out, std::span<const MarketRecord> records);
void write_forecast_csv(std::ostream& out, std::span<const ForecastRecord> forecasts);

// Inner join on timestamps. The joined hours must be non-empty and hourly
// contiguous.
Dataset align(std::vector<MarketRecord> records, std::vector<ForecastRecord> forecasts);

double ensemble_mean(std::span<const double> ensemble);

inline constexpr std::array<double, 4> kDefaultValidationThresholds{200.0, 500.0, 1000.0, 3000.0};

struct ValidationReport {
    std::size_t n_records = 0;
    std::size_t ordering_violations = 0;  // hours violating r- <= s <= r+
    std::size_t negative_down_reg = 0;    // hours with r- < 0
    std::vector<double> thresholds;
    std::vector<std::size_t> up_reg_above;  // hours with r+ > threshold

    friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

ValidationReport validate(std::span<const MarketRecord> records,
                          std::span<const double> thresholds = kDefaultValidationThresholds);
std::string to_json(const ValidationReport& report);

}  // namespace otdro
