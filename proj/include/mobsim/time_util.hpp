#pragma once

#include <cstdint>
#include <string>

namespace mobsim {

// Timestamps are seconds since the Unix epoch, timezone-naive.  Ingestion
// localizes check-in times up front, so everything downstream treats the
// value as local civil time.

struct CivilTime {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;
    int minute = 0;
    int second = 0;
};

std::int64_t epoch_from_civil(const CivilTime& c);
CivilTime civil_from_epoch(std::int64_t t);

// Hour of day in [0, 24).
int hour_of_day(std::int64_t t);

// "2012-04-10T00:00:00" (a space separator is also accepted).
// Returns false on malformed input.
bool parse_iso8601(const std::string& s, std::int64_t* out);
std::string format_iso8601(std::int64_t t);

// The asctime-style stamp used by check-in dumps: "Tue Apr 03 18:27:37 2012".
bool parse_ctime(const std::string& s, std::int64_t* out);

}  // namespace mobsim
