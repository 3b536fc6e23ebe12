#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mobsim/geo.hpp"
#include "mobsim/trajectory.hpp"

namespace mobsim::ingest {

struct CheckinRecord {
    std::int64_t user_id = 0;
    std::string location_id;
    std::int64_t utc_time = 0;
    int tz_offset_min = 0;
};

struct VenueRecord {
    std::string location_id;
    GeoPoint point;
    std::string category;
    std::string country_code;
};

struct ParseResult {
    std::vector<CheckinRecord> checkins;
    std::vector<VenueRecord> venues;
    std::size_t skipped = 0;  // malformed lines
};

// Tab-delimited: user_id, location_id, UTC time ("Tue Apr 03 18:27:37 2012"),
// timezone offset in minutes.  Malformed lines are counted, not fatal.
ParseResult parse_checkins(const std::string& path);

// Tab-delimited: location_id, latitude, longitude, category, country code.
ParseResult parse_venues(const std::string& path);

// UTC plus the offset, in seconds since the epoch.
std::int64_t localize(std::int64_t utc_time, int tz_offset_min);

// A localized check-in joined with its venue.
struct LocalizedCheckin {
    std::int64_t user_id = 0;
    GeoPoint point;
    std::int64_t time = 0;
};

// Collapses maximal chains of consecutive check-ins whose successive gaps
// are <= threshold_s into one record with mean coordinates and mean
// timestamp (rounded to the nearest second).  Input must be one user's
// records in time order.
std::vector<LocalizedCheckin> collapse_fast_checkins(
    std::span<const LocalizedCheckin> user_sorted, double threshold_s = 7.0);

// One "user_id <tab> user_id" edge per line; ids as in the check-in file.
struct RawEdgeList {
    std::vector<std::pair<std::int64_t, std::int64_t>> edges;
    std::size_t skipped = 0;
};
RawEdgeList parse_raw_edges(const std::string& path);

struct PipelineStep {
    std::string name;
    std::size_t users = 0;
    std::size_t checkins = 0;
};

struct PipelineResult {
    std::vector<TrajectoryRecord> trajectories;  // uids remapped to 0..n-1
    std::vector<std::pair<int, int>> edges;      // remapped, u < v
    std::vector<std::int64_t> uid_map;           // new uid -> original user id
    std::vector<PipelineStep> steps;
};

// The full preprocessing pipeline: join check-ins with venues and localize,
// restrict to the bbox and the [start, end) window, keep users present in
// the social snapshot, collapse fast check-ins, keep users with at least
// two check-ins and at least one edge among survivors, then keep the main
// component of the induced graph.  Throws EmptyResultError when nobody
// survives.
PipelineResult filter_pipeline(std::span<const CheckinRecord> checkins,
                               std::span<const VenueRecord> venues,
                               const RawEdgeList& graph, std::int64_t start,
                               std::int64_t end, const BoundingBox& bbox,
                               double collapse_threshold_s = 7.0);

void write_pipeline_report(const std::string& path, const PipelineResult& res);

}  // namespace mobsim::ingest
