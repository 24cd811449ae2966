#include "otdro/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "otdro/backtest.hpp"
#include "otdro/calibration.hpp"
#include "otdro/config.hpp"
#include "otdro/error.hpp"
#include "otdro/market_data.hpp"
#include "otdro/report.hpp"
#include "otdro/synthetic.hpp"
#include "otdro/text.hpp"
#include "otdro/time.hpp"

namespace otdro::cli {

namespace {

std::size_t detect_ensemble_size(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open forecast file: " + path.string());
    std::string header;
    if (!std::getline(in, header) || trim(header).empty())
        throw DataError(path.string() + ": empty forecast file; pass --ensemble to accept it");
    const auto fields = split(trim(header), ',');
    if (fields.size() < 2) throw DataError(path.string() + ": forecast header has no ensemble columns");
    return fields.size() - 1;
}

std::vector<MarketRecord> load_market(const std::filesystem::path& path, std::ostream& err) {
    auto in = ingest_market_csv(path);
    for (const auto& w : in.warnings) err << "warning: " << w << '\n';
    return std::move(in.rows);
}

std::vector<ForecastRecord> load_forecasts(const std::filesystem::path& path, std::optional<std::size_t> ensemble,
                                           std::ostream& err) {
    auto in = ingest_forecast_csv(path, ensemble ? *ensemble : detect_ensemble_size(path));
    for (const auto& w : in.warnings) err << "warning: " << w << '\n';
    return std::move(in.rows);
}

Dataset load_dataset(const RunConfig& cfg, std::ostream& err) {
    if (cfg.synthetic) return generate_synthetic(cfg.synthetic->config, cfg.synthetic->seed);
    if (!cfg.market || !cfg.forecast) throw ConfigError("market", "market and forecast files are required");
    return align(load_market(*cfg.market, err), load_forecasts(*cfg.forecast, cfg.ensemble_size, err));
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    for (auto part : split(text, ',')) {
        const auto v = parse_number(part);
        if (!v) throw DataError(flag + ": '" + std::string(part) + "' is not a number");
        out.push_back(*v);
    }
    return out;
}

std::filesystem::path ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw DataError("cannot create output directory " + dir.string());
    return dir;
}

struct Options {
    std::string market, forecast, out, config, date, thresholds = "200,500,1000,3000", epsilon, preset = "default",
                                                  start = "2017-01-01T00:00:00Z";
    std::size_t ensemble = 0, hours = 8760, max_samples = 0;
    std::optional<std::size_t> jobs;
    std::optional<std::uint64_t> seed;
};

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
    const auto dir = ensure_dir(o.out);
    auto records = load_market(o.market, err);
    std::ostringstream m;
    write_market_csv(m, records);
    write_file(dir / "market.csv", m.str());
    out << "market: " << records.size() << " hours";
    if (!records.empty())
        out << " from " << format_timestamp(records.front().time) << " to " << format_timestamp(records.back().time);
    out << '\n';
    if (!o.forecast.empty()) {
        auto forecasts = load_forecasts(o.forecast, o.ensemble ? std::optional(o.ensemble) : std::nullopt, err);
        std::ostringstream f;
        write_forecast_csv(f, forecasts);
        write_file(dir / "forecast.csv", f.str());
        const std::size_t n_fc = forecasts.size();
        const Dataset ds = align(std::move(records), std::move(forecasts));
        out << "forecast: " << n_fc << " hours; aligned: " << ds.size() << " hours\n";
    }
    return kOk;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
    const auto records = load_market(o.market, err);
    const auto thresholds = parse_list(o.thresholds, "--thresholds");
    const std::string json = to_json(validate(records, thresholds));
    if (o.out.empty())
        out << json << '\n';
    else
        write_file(o.out, json + "\n");
    return kOk;
}

int cmd_calibrate(const Options& o, std::ostream& out, std::ostream& err) {
    const auto records = load_market(o.market, err);
    const auto thresholds = parse_list(o.thresholds, "--thresholds");
    std::vector<double> r_plus;
    r_plus.reserve(records.size());
    for (const auto& r : records) r_plus.push_back(r.r_plus);
    TailReport tail = tail_exceedance(r_plus, thresholds);
    attach_tail_exponent(tail);
    const auto dir = ensure_dir(o.out.empty() ? std::filesystem::path(".") : std::filesystem::path(o.out));
    const std::string csv = to_csv(tail);
    write_file(dir / "table1.csv", csv);
    out << csv;
    if (std::any_of(tail.rows.begin(), tail.rows.end(), [](const TailRow& r) { return r.count > 0; })) {
        const auto radii = suggest_radii(tail.rows);
        out << "suggested radii: " << format_number(radii[0]) << ", " << format_number(radii[1]) << ", "
            << format_number(radii[2]) << '\n';
    }
    return kOk;
}

RunConfig base_config(const Options& o) {
    if (!o.config.empty()) return load_config(o.config);
    return parse_config("{}", ".");
}

int cmd_nominate(const Options& o, std::ostream& out, std::ostream& err) {
    RunConfig cfg = base_config(o);
    if (!o.market.empty()) cfg.market = o.market;
    if (!o.forecast.empty()) cfg.forecast = o.forecast;
    if (o.ensemble) cfg.ensemble_size = o.ensemble;
    if (!o.epsilon.empty()) {
        cfg.backtest.epsilons = parse_list(o.epsilon, "--epsilon");
        std::sort(cfg.backtest.epsilons.begin(), cfg.backtest.epsilons.end());
    }
    if (o.max_samples) cfg.backtest.reference.max_samples = o.max_samples;
    if (o.jobs) cfg.backtest.jobs = *o.jobs;
    cfg.backtest.check();
    if (!cfg.market || !cfg.forecast) throw ConfigError("market", "nominate needs --market and --forecast");

    const Timestamp day = parse_date(o.date);
    const Timestamp gate = day + std::chrono::hours(12);
    const Timestamp target = day + std::chrono::hours(24);

    auto records = load_market(*cfg.market, err);
    auto forecasts = load_forecasts(*cfg.forecast, cfg.ensemble_size, err);
    std::vector<ForecastRecord> tomorrow;
    for (const auto& f : forecasts)
        if (f.time >= target && f.time < target + std::chrono::hours(24)) tomorrow.push_back(f);
    if (tomorrow.size() != 24)
        throw DataError("forecast file has " + std::to_string(tomorrow.size()) + " of the 24 hours of " +
                        format_timestamp(target).substr(0, 10));

    std::erase_if(records, [&](const MarketRecord& r) { return r.time >= gate; });
    std::erase_if(forecasts, [&](const ForecastRecord& f) { return f.time >= gate; });
    const Dataset train = align(std::move(records), std::move(forecasts));
    std::vector<double> train_fc;
    train_fc.reserve(train.size());
    for (const auto& f : train.forecasts) train_fc.push_back(f.f_mean);

    const DayPlan plan = nominate_day({train_fc, train.records}, tomorrow, cfg.backtest);

    std::ostringstream csv;
    csv << "time,f_mean";
    for (const auto& s : plan.strategies) csv << ',' << s;
    for (double e : cfg.backtest.epsilons) csv << ",worst_case_eps_" << format_number(e);
    csv << ",status\n";
    std::size_t failed = 0;
    for (const auto& h : plan.hours) {
        csv << format_timestamp(h.time) << ',' << format_number(h.f_mean);
        for (double n : h.nominations) csv << ',' << (h.skipped ? "NA" : format_number(n));
        for (double w : h.worst_case) csv << ',' << (h.skipped ? "NA" : format_number(w));
        csv << ',' << (h.skipped ? "failed" : "ok") << '\n';
        if (h.skipped) {
            ++failed;
            err << "warning: " << format_timestamp(h.time) << ": " << h.error << '\n';
        }
    }
    if (o.out.empty())
        out << csv.str();
    else
        write_file(o.out, csv.str());
    return failed == plan.hours.size() ? kSolverError : kOk;
}

int cmd_backtest(const Options& o, std::ostream& out, std::ostream& err) {
    RunConfig cfg = load_config(o.config);
    if (o.jobs) cfg.backtest.jobs = *o.jobs;
    if (!o.out.empty()) cfg.output_dir = o.out;
    if (o.seed) {
        if (!cfg.synthetic) throw ConfigError("synthetic", "--seed applies only to synthetic runs");
        cfg.synthetic->seed = *o.seed;
    }
    const Dataset data = load_dataset(cfg, err);
    const BacktestReport report = run_backtest(data, cfg.backtest);
    emit_report(report, cfg.output_dir);
    out << summary_text(report);
    out << "\nwrote " << kReportFiles.size() << " files to " << cfg.output_dir.string() << '\n';
    return kOk;
}

int cmd_synth(const Options& o, std::ostream& out, std::ostream&) {
    SyntheticConfig sc = synthetic_preset(o.preset);
    sc.hours = o.hours;
    sc.start = parse_timestamp(o.start);
    if (o.ensemble) sc.ensemble_size = o.ensemble;
    check(sc);
    const Dataset ds = generate_synthetic(sc, *o.seed);
    const auto dir = ensure_dir(o.out);
    std::ostringstream m, f;
    write_market_csv(m, ds.records);
    write_forecast_csv(f, ds.forecasts);
    write_file(dir / "market.csv", m.str());
    write_file(dir / "forecast.csv", f.str());
    out << "wrote " << ds.size() << " hours (ensemble " << sc.ensemble_size << ") to " << dir.string() << '\n';
    return kOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Distributionally robust day-ahead wind nominations", "otdro"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "otdro 0.1.0");
    Options o;

    auto* ingest = app.add_subcommand("ingest", "Read and normalize market (and forecast) CSV files");
    ingest->add_option("--market", o.market, "Market CSV")->required();
    ingest->add_option("--forecast", o.forecast, "Forecast ensemble CSV");
    ingest->add_option("--ensemble", o.ensemble, "Ensemble size (default: from the forecast header)");
    ingest->add_option("--out", o.out, "Output directory")->required();

    auto* validate_cmd = app.add_subcommand("validate", "Report price ordering violations and spike counts as JSON");
    validate_cmd->add_option("--market", o.market, "Market CSV")->required();
    validate_cmd->add_option("--thresholds", o.thresholds, "Comma-separated up-regulation thresholds, EUR/MWh");
    validate_cmd->add_option("--out", o.out, "Output JSON file (default: stdout)");

    auto* calibrate = app.add_subcommand("calibrate", "Up-regulation exceedance table and tail exponent");
    calibrate->add_option("--market", o.market, "Market CSV")->required();
    calibrate->add_option("--thresholds", o.thresholds, "Comma-separated thresholds, EUR/MWh");
    calibrate->add_option("--out", o.out, "Output directory for table1.csv (default: .)");

    auto* nominate = app.add_subcommand("nominate", "Nominations for the 24 hours of the day after the bidding day");
    nominate->add_option("--config", o.config, "JSON run configuration");
    nominate->add_option("--market", o.market, "Market CSV (overrides the config)");
    nominate->add_option("--forecast", o.forecast, "Forecast ensemble CSV (overrides the config)");
    nominate->add_option("--ensemble", o.ensemble, "Ensemble size (default: from the forecast header)");
    nominate->add_option("--date", o.date, "Bidding day D (YYYY-MM-DD); uses data before D 12:00 UTC")->required();
    nominate->add_option("--epsilon", o.epsilon, "Comma-separated transport budgets");
    nominate->add_option("--max-samples", o.max_samples, "Cap on reference atoms per hour");
    nominate->add_option("--jobs", o.jobs, "Worker threads, 0 = all processors (default: config, else 0)");
    nominate->add_option("--out", o.out, "Output CSV (default: stdout)");

    auto* backtest = app.add_subcommand("backtest", "Leave-one-season-out backtest");
    backtest->add_option("--config", o.config, "JSON run configuration")->required();
    backtest->add_option("--jobs", o.jobs, "Worker threads, 0 = all processors (default: config, else 0)");
    backtest->add_option("--out", o.out, "Output directory (overrides the config)");
    backtest->add_option("--seed", o.seed, "Seed for a synthetic dataset (overrides the config)");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic market and forecast dataset");
    synth->add_option("--seed", o.seed, "Random seed")->required();
    synth->add_option("--out", o.out, "Output directory")->required();
    synth->add_option("--hours", o.hours, "Number of hours");
    synth->add_option("--start", o.start, "First hour (ISO-8601)");
    synth->add_option("--preset", o.preset, "default or spike_heavy");
    synth->add_option("--ensemble", o.ensemble, "Ensemble size");

    // CLI11 consumes arguments from the back, without the program name.
    std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rest.begin(), rest.end());
    try {
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(o, out, err);
        if (validate_cmd->parsed()) return cmd_validate(o, out, err);
        if (calibrate->parsed()) return cmd_calibrate(o, out, err);
        if (nominate->parsed()) return cmd_nominate(o, out, err);
        if (backtest->parsed()) return cmd_backtest(o, out, err);
        if (synth->parsed()) return cmd_synth(o, out, err);
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << '\n';
        return kSolverError;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kUsage;
}

}  // namespace otdro::cli
