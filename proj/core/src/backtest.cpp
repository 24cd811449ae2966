#include "otdro/backtest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "otdro/error.hpp"
#include "otdro/geometry.hpp"
#include "otdro/seasons.hpp"
#include "otdro/text.hpp"

namespace otdro {

namespace {

struct FoldContext {
    std::vector<double> forecasts;
    std::vector<MarketRecord> records;
    PolyhedralSupport support;
    NominationBounds bounds;

    TrainingView view() const { return {forecasts, records}; }
};

FoldContext make_context(std::vector<double> forecasts, std::vector<MarketRecord> records, const BacktestConfig& config) {
    if (records.empty()) throw DataError("backtest: fold has an empty training set");
    FoldContext ctx{std::move(forecasts), std::move(records), {}, {}};
    ctx.support = build_support_xi(ctx.records, config.margin);
    ctx.bounds = default_bounds(ctx.support);
    if (config.nomination_upper) ctx.bounds.upper = *config.nomination_upper;
    return ctx;
}

double baseline_nomination(const ForecastRecord& fc, NominationBounds bounds) {
    const double n = fc.ensemble.empty() ? std::clamp(fc.f_mean, bounds.lower, bounds.upper)
                                         : mean_forecast_nomination(fc.ensemble, bounds);
    if (!std::isfinite(n)) throw DataError("forecast at " + format_timestamp(fc.time) + " is not finite");
    return n;
}

void nominate_hour(const FoldContext& ctx, const ForecastRecord& fc, const BacktestConfig& config, HourResult& out) {
    out.time = fc.time;
    out.f_mean = fc.f_mean;
    const std::size_t E = config.epsilons.size();
    out.nominations.assign(E + 1, 0.0);
    out.worst_case.assign(E, 0.0);
    try {
        if (!std::isfinite(fc.f_mean)) throw DataError("forecast mean at " + format_timestamp(fc.time) + " is not finite");
        out.nominations[0] = baseline_nomination(fc, ctx.bounds);
        const auto ref = build_reference(ctx.view(), fc.f_mean, config.reference);
        auto problem = make_problem(ref, ctx.support, 0.0, ctx.bounds, config.cost);
        SolveOptions opts;
        opts.backend = config.backend;
        for (std::size_t e = 0; e < E; ++e) {
            problem.epsilon = config.epsilons[e];
            const auto sol = solve_nomination(problem, opts);
            out.nominations[e + 1] = sol.n_star;
            out.worst_case[e] = sol.worst_case_profit;
        }
    } catch (const std::exception& ex) {
        out.skipped = true;
        out.error = ex.what();
        std::fill(out.nominations.begin(), out.nominations.end(), 0.0);
        std::fill(out.worst_case.begin(), out.worst_case.end(), 0.0);
    }
}

// Runs body(k) for k in [0, count) on up to `jobs` threads. Each k writes
// only its own output slot, so results do not depend on scheduling.
template <typename Body>
void parallel_for(std::size_t count, std::size_t jobs, Body body) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, count);
    if (jobs <= 1) {
        for (std::size_t k = 0; k < count; ++k) body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        for (std::size_t w = 0; w < jobs; ++w)
            workers.emplace_back([&] {
                try {
                    for (std::size_t k = next++; k < count; k = next++) body(k);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = count;
                }
            });
    }
    if (failure) std::rethrow_exception(failure);
}

StrategySummary summarize(const std::vector<const HourResult*>& hours, std::size_t strategy) {
    std::vector<Timestamp> times;
    std::vector<double> hourly;
    for (const HourResult* h : hours) {
        if (h->skipped) continue;
        times.push_back(h->time);
        hourly.push_back(h->profits[strategy]);
    }
    StrategySummary s;
    const auto series = accumulate_profit(std::move(times), std::move(hourly));
    s.profit = series.cumulative.empty() ? 0.0 : series.cumulative.back();
    if (!series.cumulative.empty()) s.drops = drop_statistics(series);
    for (const auto& d : s.drops.drops)
        s.drop_times.push_back({series.times[d.start], series.times[d.trough], series.times[d.end]});
    return s;
}

void fill_deltas(std::vector<StrategySummary>& strategies) {
    for (std::size_t k = 1; k < strategies.size(); ++k) {
        const SeasonProfit strat{"", strategies[k].profit}, base{"", strategies[0].profit};
        strategies[k].delta_percent = seasonal_comparison(std::span(&strat, 1), std::span(&base, 1)).front().percent;
    }
}

}  // namespace

void BacktestConfig::check() const {
    if (!(reference.alpha > 0.0 && reference.alpha <= 1.0))
        throw ConfigError("alpha", "must lie in the interval (0, 1], got " + format_number(reference.alpha));
    if (!(reference.beta > 0.0) || !std::isfinite(reference.beta))
        throw ConfigError("beta", "must be > 0, got " + format_number(reference.beta));
    if (reference.max_samples && *reference.max_samples == 0) throw ConfigError("max_samples", "must be >= 1");
    if (epsilons.empty()) throw ConfigError("epsilons", "must list at least one radius");
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
        if (!(epsilons[k] >= 0.0) || !std::isfinite(epsilons[k]))
            throw ConfigError("epsilons[" + std::to_string(k) + "]", "must be finite and >= 0");
        if (k > 0 && !(epsilons[k] > epsilons[k - 1]))
            throw ConfigError("epsilons", "must be strictly increasing");
    }
    if (!(margin >= 0.0) || !std::isfinite(margin)) throw ConfigError("margin", "must be finite and >= 0");
    if (nomination_upper && (!(*nomination_upper >= 0.0) || !std::isfinite(*nomination_upper)))
        throw ConfigError("nomination_upper", "must be finite and >= 0");
    if (cost.p != 1.0) throw ConfigError("transport_exponent", "only p = 1 is supported by the solver");
    if (tail_thresholds.empty()) throw ConfigError("thresholds", "must list at least one threshold");
    for (std::size_t k = 0; k < tail_thresholds.size(); ++k)
        if (!(tail_thresholds[k] > 0.0) || (k > 0 && !(tail_thresholds[k] > tail_thresholds[k - 1])))
            throw ConfigError("thresholds", "must be positive and strictly increasing");
}

std::vector<std::string> strategy_names(const BacktestConfig& config) {
    std::vector<std::string> names{"mean_forecast"};
    for (double e : config.epsilons) names.push_back("dro_eps_" + format_number(e));
    return names;
}

BacktestReport run_backtest(const Dataset& dataset, const BacktestConfig& config) {
    config.check();
    if (dataset.records.size() != dataset.forecasts.size())
        throw DataError("backtest: records and forecasts are not aligned");
    const auto folds = split_seasons(dataset);
    if (folds.size() < 2)
        throw DataError("backtest: need at least two seasons, found " + std::to_string(folds.size()));

    std::vector<FoldContext> contexts;
    contexts.reserve(folds.size());
    for (const auto& fold : folds) {
        std::vector<double> fc;
        std::vector<MarketRecord> rec;
        fc.reserve(fold.train_indices.size());
        rec.reserve(fold.train_indices.size());
        for (std::size_t idx : fold.train_indices) {
            fc.push_back(dataset.forecasts[idx].f_mean);
            rec.push_back(dataset.records[idx]);
        }
        contexts.push_back(make_context(std::move(fc), std::move(rec), config));
    }

    struct Task {
        std::size_t fold;
        std::size_t index;
    };
    std::vector<Task> tasks;
    for (std::size_t f = 0; f < folds.size(); ++f)
        for (std::size_t idx = folds[f].test_begin; idx < folds[f].test_end; ++idx) tasks.push_back({f, idx});

    BacktestReport report;
    report.config = config;
    report.strategies = strategy_names(config);
    report.hours.resize(tasks.size());
    const std::size_t S = report.strategies.size();

    parallel_for(tasks.size(), config.jobs, [&](std::size_t k) {
        const Task& task = tasks[k];
        HourResult& h = report.hours[k];
        h.fold = task.fold;
        nominate_hour(contexts[task.fold], dataset.forecasts[task.index], config, h);
        h.profits.assign(S, 0.0);
        if (!h.skipped)
            for (std::size_t s = 0; s < S; ++s) h.profits[s] = settle_profit(h.nominations[s], dataset.records[task.index]);
    });

    std::vector<std::vector<const HourResult*>> by_fold(folds.size());
    std::vector<const HourResult*> all;
    for (const auto& h : report.hours) {
        by_fold[h.fold].push_back(&h);
        all.push_back(&h);
        if (h.skipped) ++report.skipped_hours;
    }
    for (std::size_t f = 0; f < folds.size(); ++f) {
        FoldReport fr;
        fr.label = folds[f].label;
        fr.first = folds[f].test_first;
        fr.last = folds[f].test_last;
        fr.train_hours = folds[f].train_indices.size();
        fr.test_hours = folds[f].test_size();
        for (const HourResult* h : by_fold[f]) fr.skipped_hours += h->skipped ? 1 : 0;
        for (std::size_t s = 0; s < S; ++s) fr.strategies.push_back(summarize(by_fold[f], s));
        fill_deltas(fr.strategies);
        report.folds.push_back(std::move(fr));
    }
    for (std::size_t s = 0; s < S; ++s) report.overall.push_back(summarize(all, s));
    fill_deltas(report.overall);

    std::vector<double> r_plus;
    r_plus.reserve(dataset.size());
    for (const auto& r : dataset.records) r_plus.push_back(r.r_plus);
    report.tail = tail_exceedance(r_plus, config.tail_thresholds);
    attach_tail_exponent(report.tail);
    return report;
}

DayPlan nominate_day(const TrainingView& train, std::span<const ForecastRecord> forecasts, const BacktestConfig& config) {
    config.check();
    if (forecasts.size() != 24)
        throw DataError("nominate_day: expected 24 forecast hours, got " + std::to_string(forecasts.size()));
    if (train.forecasts.size() != train.records.size())
        throw DataError("nominate_day: training forecasts and records differ in length");
    const FoldContext ctx = make_context({train.forecasts.begin(), train.forecasts.end()},
                                         {train.records.begin(), train.records.end()}, config);
    DayPlan plan;
    plan.strategies = strategy_names(config);
    plan.hours.resize(forecasts.size());
    parallel_for(forecasts.size(), config.jobs,
                 [&](std::size_t k) { nominate_hour(ctx, forecasts[k], config, plan.hours[k]); });
    return plan;
}

}  // namespace otdro
