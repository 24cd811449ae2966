#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "otdro/market_data.hpp"

namespace otdro {

enum class Season { winter, spring, summer, autumn };

// One leave-one-season-out fold. The test window is the contiguous index
// range [test_begin, test_end) of the dataset; everything else trains.
struct SeasonFold {
    std::string label;  // "Winter 2016-17", "Spring 2020", ...
    Season season = Season::winter;
    std::size_t test_begin = 0;
    std::size_t test_end = 0;
    Timestamp test_first{};
    Timestamp test_last{};
    std::vector<std::size_t> train_indices;

    std::size_t test_size() const { return test_end - test_begin; }
};

inline constexpr std::size_t kMinSeasonHours = 28 * 24;

// Calendar seasons: Winter = Dec-Feb, Spring = Mar-May, Summer = Jun-Aug,
// Autumn = Sep-Nov. A partial season at either end of the data becomes its
// own fold when it covers at least 28 days, otherwise it merges into the
// adjacent fold. Requires `times` hourly contiguous spanning >= 3 months.
std::vector<SeasonFold> split_seasons(const std::vector<Timestamp>& times);
std::vector<SeasonFold> split_seasons(const Dataset& dataset);

std::string season_label(Timestamp t);

}  // namespace otdro
