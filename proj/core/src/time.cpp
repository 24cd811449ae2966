#include "otdro/time.hpp"

#include <array>
#include <charconv>
#include <cstdio>

#include "otdro/error.hpp"

namespace otdro {
namespace {

using namespace std::chrono;

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i)
        if (text[i] < '0' || text[i] > '9') return false;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return ec == std::errc{};
}

[[noreturn]] void bad(std::string_view text, const char* why) {
    throw DataError("invalid timestamp '" + std::string(text) + "': " + why);
}

sys_days parse_ymd(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (text.size() < 10 || !read_int(text, 0, 4, y) || text[4] != '-' || !read_int(text, 5, 2, m) ||
        text[7] != '-' || !read_int(text, 8, 2, d))
        bad(text, "expected YYYY-MM-DD");
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) bad(text, "no such calendar date");
    return sys_days{ymd};
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
    const sys_days date = parse_ymd(text);
    std::size_t pos = 10;
    int hh = 0, mm = 0, ss = 0;
    if (pos < text.size()) {
        if (text[pos] != 'T' && text[pos] != ' ') bad(text, "expected 'T' between date and time");
        ++pos;
        if (!read_int(text, pos, 2, hh) || pos + 2 >= text.size() || text[pos + 2] != ':' ||
            !read_int(text, pos + 3, 2, mm))
            bad(text, "expected HH:MM");
        pos += 5;
        if (pos < text.size() && text[pos] == ':') {
            if (!read_int(text, pos + 1, 2, ss)) bad(text, "expected seconds");
            pos += 3;
            if (pos < text.size() && text[pos] == '.') {
                ++pos;
                while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
                    if (text[pos] != '0') bad(text, "fractional seconds must be zero");
                    ++pos;
                }
            }
        }
    }
    if (hh > 23 || mm > 59 || ss > 59) bad(text, "time of day out of range");

    seconds offset{0};
    if (pos < text.size()) {
        const char c = text[pos];
        if (c == 'Z' || c == 'z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            int oh = 0, om = 0;
            if (!read_int(text, pos + 1, 2, oh)) bad(text, "malformed UTC offset");
            std::size_t next = pos + 3;
            if (next < text.size() && text[next] == ':') ++next;
            if (!read_int(text, next, 2, om)) bad(text, "malformed UTC offset");
            if (oh > 23 || om > 59) bad(text, "UTC offset out of range");
            offset = hours{oh} + minutes{om};
            if (c == '-') offset = -offset;
            pos = next + 2;
        } else {
            bad(text, "unexpected trailing characters");
        }
    }
    if (pos != text.size()) bad(text, "unexpected trailing characters");
    return Timestamp{date} + hours{hh} + minutes{mm} + seconds{ss} - offset;
}

Timestamp parse_date(std::string_view text) {
    if (text.size() != 10) bad(text, "expected YYYY-MM-DD");
    return Timestamp{parse_ymd(text)};
}

std::string format_timestamp(Timestamp t) {
    const sys_days date = floor<days>(t);
    const year_month_day ymd{date};
    const hh_mm_ss hms{t - date};
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
    return buf.data();
}

bool is_whole_hour(Timestamp t) { return t.time_since_epoch().count() % 3600 == 0; }

}  // namespace otdro
