#include "otdro/report.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "otdro/error.hpp"
#include "otdro/text.hpp"
#include "otdro/time.hpp"

namespace otdro::cli {

namespace {

using nlohmann::ordered_json;

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json summary_json(const std::vector<std::string>& names, const std::vector<StrategySummary>& strategies) {
    ordered_json out = ordered_json::array();
    for (std::size_t s = 0; s < strategies.size(); ++s) {
        const auto& st = strategies[s];
        out.push_back({{"strategy", names[s]},
                       {"profit", st.profit},
                       {"delta_percent", optional_number(st.delta_percent)},
                       {"drops", {{"count", st.drops.drops.size()}, {"mean", st.drops.mean}, {"std", st.drops.std}}}});
    }
    return out;
}

void drop_rows(std::ostringstream& out, const std::string& period, const std::vector<std::string>& names,
               const std::vector<StrategySummary>& strategies) {
    for (std::size_t s = 0; s < strategies.size(); ++s) {
        const auto& st = strategies[s];
        for (std::size_t k = 0; k < st.drops.drops.size(); ++k) {
            const auto& d = st.drops.drops[k];
            const auto& t = st.drop_times[k];
            out << period << ',' << names[s] << ',' << format_timestamp(t.start) << ',' << format_timestamp(t.trough)
                << ',' << format_timestamp(t.end) << ',' << format_number(d.magnitude) << ','
                << (d.recovered ? "true" : "false") << '\n';
        }
    }
}

}  // namespace

std::string report_json(const BacktestReport& report) {
    const auto& cfg = report.config;
    ordered_json doc;
    doc["strategies"] = report.strategies;
    doc["config"] = {{"alpha", cfg.reference.alpha},
                     {"beta", cfg.reference.beta},
                     {"epsilons", cfg.epsilons},
                     {"margin", cfg.margin},
                     {"max_samples", cfg.reference.max_samples ? ordered_json(*cfg.reference.max_samples) : ordered_json(nullptr)},
                     {"nomination_upper", optional_number(cfg.nomination_upper)},
                     {"backend", to_string(cfg.backend)},
                     {"transport_exponent", cfg.cost.p},
                     {"thresholds", cfg.tail_thresholds}};
    ordered_json folds = ordered_json::array();
    for (const auto& f : report.folds) {
        folds.push_back({{"label", f.label},
                         {"first", format_timestamp(f.first)},
                         {"last", format_timestamp(f.last)},
                         {"train_hours", f.train_hours},
                         {"test_hours", f.test_hours},
                         {"skipped_hours", f.skipped_hours},
                         {"strategies", summary_json(report.strategies, f.strategies)}});
    }
    doc["folds"] = std::move(folds);
    doc["overall"] = summary_json(report.strategies, report.overall);

    ordered_json rows = ordered_json::array();
    for (const auto& r : report.tail.rows)
        rows.push_back({{"q", r.q}, {"count", r.count}, {"freq", r.freq}, {"epsilon_q", r.epsilon_q}});
    doc["tail"] = {{"n_obs", report.tail.n_obs}, {"p_hat", optional_number(report.tail.p_hat)}, {"rows", rows}};

    doc["skipped_hours"] = report.skipped_hours;
    ordered_json skipped = ordered_json::array();
    for (const auto& h : report.hours)
        if (h.skipped) skipped.push_back({{"time", format_timestamp(h.time)}, {"error", h.error}});
    doc["skipped"] = std::move(skipped);
    return doc.dump(2) + "\n";
}

std::string table2_csv(const BacktestReport& report) {
    std::ostringstream out;
    out << "season";
    for (std::size_t s = 1; s < report.strategies.size(); ++s) out << ',' << report.strategies[s];
    out << '\n';
    for (const auto& f : report.folds) {
        out << f.label;
        for (std::size_t s = 1; s < f.strategies.size(); ++s) out << ',' << format_percent(f.strategies[s].delta_percent);
        out << '\n';
    }
    return out.str();
}

std::string drops_csv(const BacktestReport& report) {
    std::ostringstream out;
    out << "period,strategy,start,trough,end,magnitude,recovered\n";
    for (const auto& f : report.folds) drop_rows(out, f.label, report.strategies, f.strategies);
    drop_rows(out, "overall", report.strategies, report.overall);
    return out.str();
}

std::string nominations_csv(const BacktestReport& report) {
    std::ostringstream out;
    out << "time,strategy,n,profit\n";
    for (const auto& h : report.hours) {
        const std::string t = format_timestamp(h.time);
        for (std::size_t s = 0; s < report.strategies.size(); ++s) {
            out << t << ',' << report.strategies[s] << ',';
            if (h.skipped)
                out << "NA,NA\n";
            else
                out << format_number(h.nominations[s]) << ',' << format_number(h.profits[s]) << '\n';
        }
    }
    return out.str();
}

std::string summary_text(const BacktestReport& report) {
    std::ostringstream out;
    std::size_t hours = report.hours.size();
    out << "Backtest: " << report.folds.size() << " seasons, " << hours << " test hours, " << report.skipped_hours
        << " skipped\n\n";
    out << "Seasonal profit difference vs mean forecast (%)\n";
    out << table2_csv(report) << '\n';
    out << "Whole period\n";
    out << "strategy,profit,delta_percent,drops,mean_drop,std_drop\n";
    for (std::size_t s = 0; s < report.strategies.size(); ++s) {
        const auto& st = report.overall[s];
        out << report.strategies[s] << ',' << format_fixed(st.profit, 2) << ','
            << (s == 0 ? std::string("-") : format_percent(st.delta_percent)) << ',' << st.drops.drops.size() << ','
            << format_fixed(st.drops.mean, 2) << ',' << format_fixed(st.drops.std, 2) << '\n';
    }
    out << "\nUp-regulation tail\n" << to_csv(report.tail);
    return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw DataError("failed writing " + path.string());
}

void emit_report(const BacktestReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw DataError("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
    write_file(dir / "report.json", report_json(report));
    write_file(dir / "table2.csv", table2_csv(report));
    write_file(dir / "table1.csv", to_csv(report.tail));
    write_file(dir / "drops.csv", drops_csv(report));
    write_file(dir / "nominations.csv", nominations_csv(report));
}

}  // namespace otdro::cli
