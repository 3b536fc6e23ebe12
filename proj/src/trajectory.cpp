#include "mobsim/trajectory.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mobsim/errors.hpp"
#include "mobsim/time_util.hpp"

namespace mobsim {

void sort_trajectories(std::vector<TrajectoryRecord>& records) {
    std::stable_sort(records.begin(), records.end(),
                     [](const TrajectoryRecord& a, const TrajectoryRecord& b) {
                         if (a.uid != b.uid) return a.uid < b.uid;
                         return a.timestamp < b.timestamp;
                     });
}

void write_trajectories(const std::string& path,
                        std::span<const TrajectoryRecord> records) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw FileError("cannot open for writing: " + tmp);
        out << "uid,lat,lng,timestamp\n";
        char buf[128];
        for (const auto& r : records) {
            std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,", r.uid, r.point.lat,
                          r.point.lng);
            out << buf << format_iso8601(r.timestamp) << '\n';
        }
        if (!out) throw FileError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw FileError("rename failed: " + path);
    }
}

std::vector<TrajectoryRecord> read_trajectories(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open trajectory file: " + path);
    std::vector<TrajectoryRecord> out;
    std::string line;
    if (!std::getline(in, line)) return out;  // header (or empty file)
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string uid_s, lat_s, lng_s, ts_s;
        if (!std::getline(ss, uid_s, ',') || !std::getline(ss, lat_s, ',') ||
            !std::getline(ss, lng_s, ',') || !std::getline(ss, ts_s)) {
            throw FileError("malformed trajectory row: " + line);
        }
        TrajectoryRecord r;
        try {
            r.uid = std::stoi(uid_s);
            r.point.lat = std::stod(lat_s);
            r.point.lng = std::stod(lng_s);
        } catch (const std::exception&) {
            throw FileError("malformed trajectory row: " + line);
        }
        if (!parse_iso8601(ts_s, &r.timestamp)) {
            throw FileError("bad timestamp in trajectory row: " + line);
        }
        out.push_back(r);
    }
    return out;
}

void for_each_user(
    std::span<const TrajectoryRecord> sorted,
    const std::function<void(int, std::span<const TrajectoryRecord>)>& fn) {
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        const int uid = sorted[i].uid;
        while (j < sorted.size() && sorted[j].uid == uid) ++j;
        fn(uid, sorted.subspan(i, j - i));
        i = j;
    }
}

}  // namespace mobsim
