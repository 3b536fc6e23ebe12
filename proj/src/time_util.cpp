#include "mobsim/time_util.hpp"

#include <array>
#include <cstdio>
#include <cstring>

namespace mobsim {

namespace {

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);             // [0, 399]
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;  // [0, 365]
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;            // [0, 146096]
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int* y, int* m, int* d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    *d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    *m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    *y = static_cast<int>(yy + (*m <= 2));
}

constexpr std::array<const char*, 12> kMonthNames = {
    "Jan", "Feb", "Mar", "Apr", "May", "Jun",
    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

std::int64_t epoch_from_civil(const CivilTime& c) {
    return days_from_civil(c.year, c.month, c.day) * 86400 + c.hour * 3600 +
           c.minute * 60 + c.second;
}

CivilTime civil_from_epoch(std::int64_t t) {
    CivilTime c;
    const std::int64_t days = floor_div(t, 86400);
    std::int64_t rem = t - days * 86400;
    civil_from_days(days, &c.year, &c.month, &c.day);
    c.hour = static_cast<int>(rem / 3600);
    rem %= 3600;
    c.minute = static_cast<int>(rem / 60);
    c.second = static_cast<int>(rem % 60);
    return c;
}

int hour_of_day(std::int64_t t) {
    std::int64_t sec = t - floor_div(t, 86400) * 86400;
    return static_cast<int>(sec / 3600);
}

bool parse_iso8601(const std::string& s, std::int64_t* out) {
    CivilTime c;
    char sep = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%d", &c.year, &c.month, &c.day,
                    &sep, &c.hour, &c.minute, &c.second) == 7) {
        if (sep != 'T' && sep != ' ') return false;
    } else if (std::sscanf(s.c_str(), "%d-%d-%d", &c.year, &c.month, &c.day) == 3) {
        c.hour = c.minute = c.second = 0;
    } else {
        return false;
    }
    if (c.month < 1 || c.month > 12 || c.day < 1 || c.day > 31) return false;
    if (c.hour < 0 || c.hour > 23 || c.minute < 0 || c.minute > 59 ||
        c.second < 0 || c.second > 60)
        return false;
    *out = epoch_from_civil(c);
    return true;
}

std::string format_iso8601(std::int64_t t) {
    const CivilTime c = civil_from_epoch(t);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", c.year,
                  c.month, c.day, c.hour, c.minute, c.second);
    return buf;
}

bool parse_ctime(const std::string& s, std::int64_t* out) {
    char wday[8] = {0};
    char mon[8] = {0};
    CivilTime c;
    if (std::sscanf(s.c_str(), "%7s %7s %d %d:%d:%d %d", wday, mon, &c.day,
                    &c.hour, &c.minute, &c.second, &c.year) != 7) {
        return false;
    }
    c.month = 0;
    for (int i = 0; i < 12; ++i) {
        if (std::strcmp(mon, kMonthNames[i]) == 0) {
            c.month = i + 1;
            break;
        }
    }
    if (c.month == 0 || c.day < 1 || c.day > 31) return false;
    if (c.hour < 0 || c.hour > 23 || c.minute < 0 || c.minute > 59 ||
        c.second < 0 || c.second > 60)
        return false;
    *out = epoch_from_civil(c);
    return true;
}

}  // namespace mobsim
