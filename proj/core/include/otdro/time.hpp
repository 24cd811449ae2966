#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace otdro {

using Timestamp = std::chrono::sys_seconds;

inline constexpr std::chrono::seconds kHour{3600};

// Parses ISO-8601 date-times such as "2017-01-01T00:00:00Z",
// "2017-01-01 02:00+02:00" or "2017-01-01T00:00" (no offset means UTC) and
// normalizes to UTC. Throws DataError on malformed input.
Timestamp parse_timestamp(std::string_view text);

// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(Timestamp t);

// Parses a calendar date "YYYY-MM-DD" to midnight UTC.
Timestamp parse_date(std::string_view text);

bool is_whole_hour(Timestamp t);

}  // namespace otdro
