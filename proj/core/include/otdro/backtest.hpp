#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otdro/calibration.hpp"
#include "otdro/dro.hpp"
#include "otdro/market_data.hpp"
#include "otdro/reference.hpp"
#include "otdro/settlement.hpp"

namespace otdro {

struct BacktestConfig {
    ReferenceOptions reference;
    std::vector<double> epsilons{0.5, 1.0, 1.5};
    double margin = kDefaultMargin;
    TransportCost cost;
    // Upper nomination bound; unset means the upper end of the fold's generation box.
    std::optional<double> nomination_upper;
    Backend backend = Backend::structured;
    std::size_t jobs = 1;  // 0 = all available processors
    std::vector<double> tail_thresholds{kDefaultTailThresholds.begin(), kDefaultTailThresholds.end()};

    // Throws ConfigError naming the offending field.
    void check() const;
};

// "mean_forecast" followed by "dro_eps_<epsilon>" per configured epsilon.
std::vector<std::string> strategy_names(const BacktestConfig& config);

struct HourResult {
    Timestamp time{};
    std::size_t fold = 0;
    double f_mean = 0.0;
    bool skipped = false;
    std::string error;
    std::vector<double> nominations;  // per strategy
    std::vector<double> profits;      // per strategy; realized, 0 when skipped
    std::vector<double> worst_case;   // per epsilon
};

struct DropTimes {
    Timestamp start{};
    Timestamp trough{};
    Timestamp end{};
};

struct StrategySummary {
    double profit = 0.0;
    std::optional<double> delta_percent;  // vs the baseline; unset for the baseline itself
    DropStats drops;
    std::vector<DropTimes> drop_times;  // parallel to drops.drops
};

struct FoldReport {
    std::string label;
    Timestamp first{};
    Timestamp last{};
    std::size_t train_hours = 0;
    std::size_t test_hours = 0;
    std::size_t skipped_hours = 0;
    std::vector<StrategySummary> strategies;
};

struct BacktestReport {
    BacktestConfig config;
    std::vector<std::string> strategies;
    std::vector<FoldReport> folds;
    std::vector<HourResult> hours;        // every test hour in time order
    std::vector<StrategySummary> overall;  // whole evaluated period
    TailReport tail;
    std::size_t skipped_hours = 0;
};

// Leave-one-season-out evaluation. Hours whose solve fails are recorded and
// skipped for every strategy.
BacktestReport run_backtest(const Dataset& dataset, const BacktestConfig& config);

struct DayPlan {
    std::vector<std::string> strategies;
    std::vector<HourResult> hours;  // profits left empty
};

// Independent nominations for each of 24 forecast hours, trained on `train`.
DayPlan nominate_day(const TrainingView& train, std::span<const ForecastRecord> forecasts, const BacktestConfig& config);

}  // namespace otdro
