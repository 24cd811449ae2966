#include "otdro/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "otdro/error.hpp"
#include "otdro/text.hpp"

namespace otdro {
namespace {

std::string where(const std::string& source, std::size_t line) {
    return source + ":" + std::to_string(line);
}

// Reads one line, stripping CR and a leading UTF-8 BOM on the first line.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    return true;
}

double parse_field(std::string_view field, const std::string& source, std::size_t line,
                   const std::string& column) {
    const auto v = parse_number(field);
    if (!v) {
        throw DataError(where(source, line) + ": column '" + column + "': cannot parse number '" +
                        std::string(trim(field)) + "'");
    }
    if (!std::isfinite(*v)) {
        throw DataError(where(source, line) + ": column '" + column + "': non-finite value '" +
                        std::string(trim(field)) + "'");
    }
    return *v;
}

Timestamp parse_time_field(std::string_view field, const std::string& source, std::size_t line) {
    Timestamp t;
    try {
        t = parse_timestamp(trim(field));
    } catch (const DataError& e) {
        throw DataError(where(source, line) + ": column 'time': " + e.what());
    }
    if (!is_whole_hour(t)) {
        throw DataError(where(source, line) + ": column 'time': " + format_timestamp(t) +
                        " is not on a whole hour");
    }
    return t;
}

// Sorts rows by time and rejects duplicates and gaps in the hourly grid.
template <typename Row>
void sort_and_check_hourly(std::vector<Row>& rows, std::vector<std::size_t>& lines,
                           const std::string& source) {
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rows[a].time < rows[b].time; });
    for (std::size_t k = 1; k < order.size(); ++k) {
        const auto& prev = rows[order[k - 1]];
        const auto& cur = rows[order[k]];
        if (cur.time == prev.time) {
            throw DataError(source + ": duplicate timestamp " + format_timestamp(cur.time) + " (lines " +
                            std::to_string(lines[order[k - 1]]) + " and " + std::to_string(lines[order[k]]) +
                            ")");
        }
        if (cur.time - prev.time != kHour) {
            throw DataError(source + ": missing hours between " + format_timestamp(prev.time) + " and " +
                            format_timestamp(cur.time));
        }
    }
    std::vector<Row> sorted;
    sorted.reserve(rows.size());
    for (auto i : order) sorted.push_back(std::move(rows[i]));
    rows = std::move(sorted);
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return in;
}

}  // namespace

Ingested<MarketRecord> read_market_csv(std::istream& in, const std::string& source) {
    static const std::array<std::string, 5> columns{"time", "generation_mwh", "spot_eur_mwh",
                                                    "down_reg_eur_mwh", "up_reg_eur_mwh"};
    Ingested<MarketRecord> out;
    std::string line;
    std::size_t line_no = 0;
    if (!next_line(in, line, line_no)) throw DataError(source + ": empty file, expected header");
    if (line != kMarketHeader) {
        throw DataError(where(source, 1) + ": header mismatch, expected '" + std::string(kMarketHeader) +
                        "', found '" + line + "'");
    }
    std::vector<std::size_t> lines;
    while (next_line(in, line, line_no)) {
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != columns.size()) {
            throw DataError(where(source, line_no) + ": expected 5 columns, found " +
                            std::to_string(fields.size()));
        }
        MarketRecord r;
        r.time = parse_time_field(fields[0], source, line_no);
        r.g = parse_field(fields[1], source, line_no, columns[1]);
        r.s = parse_field(fields[2], source, line_no, columns[2]);
        r.r_minus = parse_field(fields[3], source, line_no, columns[3]);
        r.r_plus = parse_field(fields[4], source, line_no, columns[4]);
        if (r.g < 0.0) {
            throw DataError(where(source, line_no) + ": column 'generation_mwh': negative generation " +
                            format_number(r.g));
        }
        out.rows.push_back(r);
        lines.push_back(line_no);
    }
    sort_and_check_hourly(out.rows, lines, source);
    return out;
}

Ingested<MarketRecord> ingest_market_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_market_csv(in, path.string());
}

std::string forecast_header(std::size_t ensemble_size) {
    std::string h = "time";
    char buf[16];
    for (std::size_t k = 1; k <= ensemble_size; ++k) {
        std::snprintf(buf, sizeof buf, ",ens_%03zu", k);
        h += buf;
    }
    return h;
}

Ingested<ForecastRecord> read_forecast_csv(std::istream& in, std::size_t ensemble_size,
                                           const std::string& source) {
    if (ensemble_size == 0 || ensemble_size > 999) {
        throw DataError("ensemble size must be in [1, 999], got " + std::to_string(ensemble_size));
    }
    Ingested<ForecastRecord> out;
    std::string line;
    std::size_t line_no = 0;
    if (!next_line(in, line, line_no) || trim(line).empty()) {
        out.warnings.push_back(source + ": empty forecast file, no forecasts loaded");
        return out;
    }
    const std::string header = forecast_header(ensemble_size);
    if (line != header) {
        const auto found = split(line, ',').size();
        throw DataError(where(source, 1) + ": header mismatch, expected 'time' plus " +
                        std::to_string(ensemble_size) + " ensemble columns ens_001..., found " +
                        std::to_string(found) + " columns");
    }
    std::vector<std::size_t> lines;
    while (next_line(in, line, line_no)) {
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != ensemble_size + 1) {
            throw DataError(where(source, line_no) + ": expected " + std::to_string(ensemble_size) +
                            " ensemble columns, found " + std::to_string(fields.size() - 1));
        }
        ForecastRecord f;
        f.time = parse_time_field(fields[0], source, line_no);
        f.ensemble.reserve(ensemble_size);
        char col[16];
        for (std::size_t k = 1; k < fields.size(); ++k) {
            std::snprintf(col, sizeof col, "ens_%03zu", k);
            const double v = parse_field(fields[k], source, line_no, col);
            if (v < 0.0) {
                throw DataError(where(source, line_no) + ": column '" + col + "': negative forecast " +
                                format_number(v));
            }
            f.ensemble.push_back(v);
        }
        f.f_mean = ensemble_mean(f.ensemble);
        out.rows.push_back(std::move(f));
        lines.push_back(line_no);
    }
    sort_and_check_hourly(out.rows, lines, source);
    return out;
}

Ingested<ForecastRecord> ingest_forecast_csv(const std::filesystem::path& path, std::size_t ensemble_size) {
    auto in = open_input(path);
    return read_forecast_csv(in, ensemble_size, path.string());
}

void write_market_csv(std::ostream& out, std::span<const MarketRecord> records) {
    out << kMarketHeader << '\n';
    for (const auto& r : records) {
        out << format_timestamp(r.time) << ',' << format_number(r.g) << ',' << format_number(r.s) << ','
            << format_number(r.r_minus) << ',' << format_number(r.r_plus) << '\n';
    }
}

void write_forecast_csv(std::ostream& out, std::span<const ForecastRecord> forecasts) {
    if (forecasts.empty()) return;
    const std::size_t e = forecasts.front().ensemble.size();
    out << forecast_header(e) << '\n';
    for (const auto& f : forecasts) {
        if (f.ensemble.size() != e) throw DataError("forecast rows have inconsistent ensemble sizes");
        out << format_timestamp(f.time);
        for (double v : f.ensemble) out << ',' << format_number(v);
        out << '\n';
    }
}

double ensemble_mean(std::span<const double> ensemble) {
    if (ensemble.empty()) throw DataError("empty ensemble");
    double sum = 0.0;
    for (double v : ensemble) sum += v;
    return sum / static_cast<double>(ensemble.size());
}

Dataset align(std::vector<MarketRecord> records, std::vector<ForecastRecord> forecasts) {
    Dataset ds;
    std::size_t i = 0, j = 0;
    while (i < records.size() && j < forecasts.size()) {
        if (records[i].time < forecasts[j].time) {
            ++i;
        } else if (forecasts[j].time < records[i].time) {
            ++j;
        } else {
            ds.records.push_back(records[i++]);
            ds.forecasts.push_back(std::move(forecasts[j++]));
        }
    }
    if (ds.empty()) throw DataError("market and forecast data share no timestamps");
    for (std::size_t k = 1; k < ds.size(); ++k) {
        if (ds.records[k].time - ds.records[k - 1].time != kHour) {
            throw DataError("aligned data has missing hours between " + format_timestamp(ds.records[k - 1].time) +
                            " and " + format_timestamp(ds.records[k].time));
        }
    }
    return ds;
}

ValidationReport validate(std::span<const MarketRecord> records, std::span<const double> thresholds) {
    if (records.empty()) throw DataError("validate: empty dataset");
    ValidationReport rep;
    rep.n_records = records.size();
    rep.thresholds.assign(thresholds.begin(), thresholds.end());
    rep.up_reg_above.assign(thresholds.size(), 0);
    for (const auto& r : records) {
        if (!(r.r_minus <= r.s && r.s <= r.r_plus)) ++rep.ordering_violations;
        if (r.r_minus < 0.0) ++rep.negative_down_reg;
        for (std::size_t k = 0; k < thresholds.size(); ++k)
            if (r.r_plus > thresholds[k]) ++rep.up_reg_above[k];
    }
    return rep;
}

std::string to_json(const ValidationReport& report) {
    nlohmann::ordered_json j;
    j["n_records"] = report.n_records;
    j["ordering_violations"] = report.ordering_violations;
    j["negative_down_reg"] = report.negative_down_reg;
    auto& above = j["up_reg_above"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < report.thresholds.size(); ++k)
        above.push_back({{"threshold_eur_mwh", report.thresholds[k]}, {"count", report.up_reg_above[k]}});
    return j.dump(2) + "\n";
}

}  // namespace otdro
