#include "otdro/seasons.hpp"

#include <chrono>

#include "otdro/error.hpp"

namespace otdro {
namespace {

using namespace std::chrono;

struct SeasonKey {
    Season season;
    int year;  // for winter: the year of its December

    bool operator==(const SeasonKey&) const = default;
};

SeasonKey season_of(Timestamp t) {
    const year_month_day ymd{floor<days>(t)};
    const unsigned m = static_cast<unsigned>(ymd.month());
    const int y = static_cast<int>(ymd.year());
    if (m == 12) return {Season::winter, y};
    if (m <= 2) return {Season::winter, y - 1};
    if (m <= 5) return {Season::spring, y};
    if (m <= 8) return {Season::summer, y};
    return {Season::autumn, y};
}

std::string label_of(SeasonKey key) {
    switch (key.season) {
        case Season::winter: {
            const int next = (key.year + 1) % 100;
            return "Winter " + std::to_string(key.year) + "-" + (next < 10 ? "0" : "") + std::to_string(next);
        }
        case Season::spring: return "Spring " + std::to_string(key.year);
        case Season::summer: return "Summer " + std::to_string(key.year);
        case Season::autumn: return "Autumn " + std::to_string(key.year);
    }
    return {};
}

Timestamp add_months(Timestamp t, int n) {
    const sys_days d = floor<days>(t);
    year_month_day ymd{d};
    ymd += months{n};
    if (!ymd.ok()) ymd = ymd.year() / ymd.month() / last;
    return Timestamp{sys_days{ymd}} + (t - Timestamp{d});
}

}  // namespace

std::string season_label(Timestamp t) { return label_of(season_of(t)); }

std::vector<SeasonFold> split_seasons(const std::vector<Timestamp>& times) {
    if (times.empty()) throw DataError("split_seasons: empty dataset");
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (times[k] - times[k - 1] != kHour) {
            throw DataError("split_seasons: data is not hourly contiguous at " + format_timestamp(times[k]));
        }
    }
    if (times.back() + kHour < add_months(times.front(), 3)) {
        throw DataError("split_seasons: data spans less than three months (" + format_timestamp(times.front()) +
                        " to " + format_timestamp(times.back()) + ")");
    }

    struct Group {
        SeasonKey key;
        std::size_t begin, end;
    };
    std::vector<Group> groups;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const SeasonKey key = season_of(times[k]);
        if (groups.empty() || !(groups.back().key == key)) groups.push_back({key, k, k});
        groups.back().end = k + 1;
    }

    if (groups.size() > 1 && groups.front().end - groups.front().begin < kMinSeasonHours) {
        groups[1].begin = groups.front().begin;
        groups.erase(groups.begin());
    }
    if (groups.size() > 1 && groups.back().end - groups.back().begin < kMinSeasonHours) {
        groups[groups.size() - 2].end = groups.back().end;
        groups.pop_back();
    }

    std::vector<SeasonFold> folds;
    folds.reserve(groups.size());
    for (const auto& g : groups) {
        SeasonFold f;
        f.label = label_of(g.key);
        f.season = g.key.season;
        f.test_begin = g.begin;
        f.test_end = g.end;
        f.test_first = times[g.begin];
        f.test_last = times[g.end - 1];
        f.train_indices.reserve(times.size() - (g.end - g.begin));
        for (std::size_t k = 0; k < g.begin; ++k) f.train_indices.push_back(k);
        for (std::size_t k = g.end; k < times.size(); ++k) f.train_indices.push_back(k);
        folds.push_back(std::move(f));
    }
    return folds;
}

std::vector<SeasonFold> split_seasons(const Dataset& dataset) {
    std::vector<Timestamp> times;
    times.reserve(dataset.size());
    for (const auto& r : dataset.records) times.push_back(r.time);
    return split_seasons(times);
}

}  // namespace otdro
