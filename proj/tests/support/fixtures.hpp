#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "otdro/geometry.hpp"
#include "otdro/market_data.hpp"
#include "otdro/reference.hpp"
#include "otdro/time.hpp"

namespace otdro::testing {

inline MarketRecord record(Timestamp t, double g, double s, double rm, double rp) { return {t, g, s, rm, rp}; }

inline Timestamp hour(const char* iso) { return parse_timestamp(iso); }

inline EmpiricalDistribution distribution(std::vector<std::array<double, 4>> samples, std::vector<double> weights) {
    EmpiricalDistribution d;
    d.samples = std::move(samples);
    d.weights = std::move(weights);
    for (std::size_t i = 0; i < d.samples.size(); ++i) d.source_indices.push_back(i);
    return d;
}

inline std::vector<MarketRecord> as_records(const EmpiricalDistribution& d) {
    std::vector<MarketRecord> out;
    Timestamp t = parse_timestamp("2018-01-01T00:00:00Z");
    for (const auto& x : d.samples) {
        out.push_back({t, x[0], x[1], x[2], x[3]});
        t += kHour;
    }
    return out;
}

inline PolyhedralSupport support_for(const EmpiricalDistribution& d, double margin = kDefaultMargin) {
    return build_support_xi(as_records(d), margin);
}

// Random instance with r- <= s <= r+ and uniform-ish random weights.
inline EmpiricalDistribution random_distribution(std::mt19937_64& rng, std::size_t m) {
    std::uniform_real_distribution<double> g(0.0, 100.0), s(10.0, 80.0), spread(0.0, 40.0), u(0.1, 1.0);
    EmpiricalDistribution d;
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double sp = s(rng);
        d.samples.push_back({g(rng), sp, sp - spread(rng), sp + spread(rng)});
        d.weights.push_back(u(rng));
        total += d.weights.back();
        d.source_indices.push_back(i);
    }
    for (double& w : d.weights) w /= total;
    return d;
}

// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("otdro_" + tag + "_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()) +
                 "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace otdro::testing
