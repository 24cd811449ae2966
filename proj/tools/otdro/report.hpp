#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "otdro/backtest.hpp"

namespace otdro::cli {

// The report bundle, in the order written.
inline const std::vector<std::string> kReportFiles{"report.json", "table2.csv", "table1.csv", "drops.csv",
                                                   "nominations.csv"};

std::string report_json(const BacktestReport& report);
std::string table2_csv(const BacktestReport& report);
std::string drops_csv(const BacktestReport& report);
std::string nominations_csv(const BacktestReport& report);
std::string summary_text(const BacktestReport& report);

// Creates `dir` if needed and writes the bundle. Throws DataError on I/O failure.
void emit_report(const BacktestReport& report, const std::filesystem::path& dir);

// Writes `content` to `path` in full or throws DataError naming the path.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace otdro::cli
