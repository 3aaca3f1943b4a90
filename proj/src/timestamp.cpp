#include "ruaf/timestamp.hpp"

#include <cstdio>

namespace ruaf {

namespace {

// days since 1970-01-01 for a civil date (proleptic Gregorian)
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

bool two_digits(const std::string& s, std::size_t pos, unsigned& out) {
    const char a = s[pos], b = s[pos + 1];
    if (a < '0' || a > '9' || b < '0' || b > '9') return false;
    out = static_cast<unsigned>(a - '0') * 10 + static_cast<unsigned>(b - '0');
    return true;
}

unsigned days_in_month(std::int64_t y, unsigned m) {
    static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2) {
        const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        return leap ? 29 : 28;
    }
    return kDays[m - 1];
}

}  // namespace

std::optional<EpochSeconds> parse_timestamp(const std::string& text) {
    // "YYYY-MM-DD HH:MM:SS UTC" is exactly 23 chars
    if (text.size() != 23) return std::nullopt;
    if (text[4] != '-' || text[7] != '-' || text[10] != ' ' || text[13] != ':' ||
        text[16] != ':' || text.compare(19, 4, " UTC") != 0)
        return std::nullopt;
    for (std::size_t i : {0u, 1u, 2u, 3u}) {
        if (text[i] < '0' || text[i] > '9') return std::nullopt;
    }
    const std::int64_t year = (text[0] - '0') * 1000 + (text[1] - '0') * 100 +
                              (text[2] - '0') * 10 + (text[3] - '0');
    unsigned month, day, hour, minute, second;
    if (!two_digits(text, 5, month) || !two_digits(text, 8, day) || !two_digits(text, 11, hour) ||
        !two_digits(text, 14, minute) || !two_digits(text, 17, second))
        return std::nullopt;
    if (year < 1970 || month < 1 || month > 12) return std::nullopt;
    if (day < 1 || day > days_in_month(year, month)) return std::nullopt;
    if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
    return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second;
}

std::string format_timestamp(EpochSeconds t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    std::int64_t y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    const unsigned hour = static_cast<unsigned>(rem / 3600);
    const unsigned minute = static_cast<unsigned>((rem % 3600) / 60);
    const unsigned second = static_cast<unsigned>(rem % 60);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u %02u:%02u:%02u UTC",
                  static_cast<long long>(y), m, d, hour, minute, second);
    return buf;
}

}  // namespace ruaf
