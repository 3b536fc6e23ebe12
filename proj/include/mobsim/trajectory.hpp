#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mobsim/geo.hpp"

namespace mobsim {

struct TrajectoryRecord {
    int uid = 0;
    GeoPoint point;
    std::int64_t timestamp = 0;
};

// Orders by (uid, timestamp); this is the canonical on-disk order.
void sort_trajectories(std::vector<TrajectoryRecord>& records);

// CSV with header "uid,lat,lng,timestamp"; timestamps ISO-8601, second
// precision.  Write is atomic (temp file + rename).
void write_trajectories(const std::string& path,
                        std::span<const TrajectoryRecord> records);
std::vector<TrajectoryRecord> read_trajectories(const std::string& path);

// Invokes fn(uid, user_records) for each uid group of a (uid, t)-sorted span.
void for_each_user(
    std::span<const TrajectoryRecord> sorted,
    const std::function<void(int, std::span<const TrajectoryRecord>)>& fn);

}  // namespace mobsim
