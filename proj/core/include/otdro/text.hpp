#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace otdro {

// Shortest decimal text that parses back to the identical double.
std::string format_number(double value);

// Fixed-point with the given number of decimals.
std::string format_fixed(double value, int decimals);

// Strict parse of the whole field; nullopt on any trailing garbage.
std::optional<double> parse_number(std::string_view text);

std::vector<std::string_view> split(std::string_view line, char sep);

std::string_view trim(std::string_view text);

}  // namespace otdro
