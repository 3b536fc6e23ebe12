#include "mobsim/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "mobsim/errors.hpp"
#include "mobsim/time_util.hpp"

namespace mobsim::ingest {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r') {
        out.back().pop_back();
    }
    return out;
}

}  // namespace

ParseResult parse_checkins(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open check-in file: " + path);
    ParseResult res;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_tabs(line);
        if (fields.size() != 4) {
            ++res.skipped;
            continue;
        }
        CheckinRecord rec;
        std::int64_t utc = 0;
        try {
            rec.user_id = std::stoll(fields[0]);
            rec.tz_offset_min = std::stoi(fields[3]);
        } catch (const std::exception&) {
            ++res.skipped;
            continue;
        }
        if (!parse_ctime(fields[2], &utc) || rec.tz_offset_min < -14 * 60 ||
            rec.tz_offset_min > 14 * 60) {
            ++res.skipped;
            continue;
        }
        rec.location_id = fields[1];
        rec.utc_time = utc;
        res.checkins.push_back(std::move(rec));
    }
    return res;
}

ParseResult parse_venues(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open venue file: " + path);
    ParseResult res;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_tabs(line);
        if (fields.size() < 3) {
            ++res.skipped;
            continue;
        }
        VenueRecord rec;
        try {
            rec.point.lat = std::stod(fields[1]);
            rec.point.lng = std::stod(fields[2]);
        } catch (const std::exception&) {
            ++res.skipped;
            continue;
        }
        if (!(rec.point.lat >= -90.0 && rec.point.lat <= 90.0) ||
            !(rec.point.lng >= -180.0 && rec.point.lng <= 180.0)) {
            ++res.skipped;
            continue;
        }
        rec.location_id = fields[0];
        if (fields.size() > 3) rec.category = fields[3];
        if (fields.size() > 4) rec.country_code = fields[4];
        res.venues.push_back(std::move(rec));
    }
    return res;
}

std::int64_t localize(std::int64_t utc_time, int tz_offset_min) {
    return utc_time + static_cast<std::int64_t>(tz_offset_min) * 60;
}

std::vector<LocalizedCheckin> collapse_fast_checkins(
    std::span<const LocalizedCheckin> user_sorted, double threshold_s) {
    std::vector<LocalizedCheckin> out;
    std::size_t i = 0;
    while (i < user_sorted.size()) {
        std::size_t j = i;
        while (j + 1 < user_sorted.size() &&
               static_cast<double>(user_sorted[j + 1].time -
                                   user_sorted[j].time) <= threshold_s) {
            ++j;
        }
        if (j == i) {
            out.push_back(user_sorted[i]);
        } else {
            LocalizedCheckin merged;
            merged.user_id = user_sorted[i].user_id;
            double lat = 0.0, lng = 0.0, t = 0.0;
            const double n = static_cast<double>(j - i + 1);
            for (std::size_t k = i; k <= j; ++k) {
                lat += user_sorted[k].point.lat;
                lng += user_sorted[k].point.lng;
                t += static_cast<double>(user_sorted[k].time);
            }
            merged.point.lat = lat / n;
            merged.point.lng = lng / n;
            merged.time = static_cast<std::int64_t>(std::llround(t / n));
            out.push_back(merged);
        }
        i = j + 1;
    }
    return out;
}

RawEdgeList parse_raw_edges(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open edge file: " + path);
    RawEdgeList res;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::int64_t u, v;
        if (ss >> u >> v) {
            res.edges.emplace_back(u, v);
        } else {
            ++res.skipped;
        }
    }
    return res;
}

PipelineResult filter_pipeline(std::span<const CheckinRecord> checkins,
                               std::span<const VenueRecord> venues,
                               const RawEdgeList& graph, std::int64_t start,
                               std::int64_t end, const BoundingBox& bbox,
                               double collapse_threshold_s) {
    PipelineResult res;
    const auto report = [&](const std::string& name,
                            const std::map<std::int64_t,
                                           std::vector<LocalizedCheckin>>& users) {
        std::size_t n = 0;
        for (const auto& [uid, recs] : users) n += recs.size();
        res.steps.push_back({name, users.size(), n});
    };

    std::unordered_map<std::string, GeoPoint> venue_pos;
    venue_pos.reserve(venues.size());
    for (const auto& v : venues) venue_pos.emplace(v.location_id, v.point);

    // Join on location_id and localize the timestamps.
    std::map<std::int64_t, std::vector<LocalizedCheckin>> users;
    for (const auto& c : checkins) {
        auto it = venue_pos.find(c.location_id);
        if (it == venue_pos.end()) continue;
        users[c.user_id].push_back(
            {c.user_id, it->second, localize(c.utc_time, c.tz_offset_min)});
    }
    report("join", users);

    const auto drop_if = [&](auto&& pred) {
        for (auto it = users.begin(); it != users.end();) {
            auto& recs = it->second;
            recs.erase(std::remove_if(recs.begin(), recs.end(), pred), recs.end());
            it = recs.empty() ? users.erase(it) : std::next(it);
        }
    };

    drop_if([&](const LocalizedCheckin& r) { return !bbox.contains(r.point); });
    report("bbox", users);

    drop_if([&](const LocalizedCheckin& r) {
        return r.time < start || r.time >= end;
    });
    report("window", users);

    std::set<std::int64_t> graph_users;
    for (const auto& [u, v] : graph.edges) {
        graph_users.insert(u);
        graph_users.insert(v);
    }
    for (auto it = users.begin(); it != users.end();) {
        it = graph_users.count(it->first) ? std::next(it) : users.erase(it);
    }
    report("graph_membership", users);

    for (auto& [uid, recs] : users) {
        std::sort(recs.begin(), recs.end(),
                  [](const LocalizedCheckin& a, const LocalizedCheckin& b) {
                      return a.time < b.time;
                  });
        recs = collapse_fast_checkins(recs, collapse_threshold_s);
    }
    report("collapse_fast_checkins", users);

    for (auto it = users.begin(); it != users.end();) {
        it = it->second.size() >= 2 ? std::next(it) : users.erase(it);
    }
    report("min_two_checkins", users);

    // Keep users with at least one edge among the survivors.
    std::set<std::int64_t> with_edge;
    for (const auto& [u, v] : graph.edges) {
        if (u != v && users.count(u) && users.count(v)) {
            with_edge.insert(u);
            with_edge.insert(v);
        }
    }
    for (auto it = users.begin(); it != users.end();) {
        it = with_edge.count(it->first) ? std::next(it) : users.erase(it);
    }
    report("has_edge", users);

    // Main component of the graph induced on the survivors.
    std::map<std::int64_t, int> index;
    for (const auto& [uid, recs] : users) {
        index.emplace(uid, static_cast<int>(index.size()));
    }
    std::vector<std::vector<int>> adj(index.size());
    for (const auto& [u, v] : graph.edges) {
        if (u == v) continue;
        auto iu = index.find(u);
        auto iv = index.find(v);
        if (iu == index.end() || iv == index.end()) continue;
        adj[static_cast<std::size_t>(iu->second)].push_back(iv->second);
        adj[static_cast<std::size_t>(iv->second)].push_back(iu->second);
    }
    std::vector<int> comp(index.size(), -1);
    int n_comp = 0;
    for (std::size_t s = 0; s < adj.size(); ++s) {
        if (comp[s] != -1) continue;
        std::vector<int> stack{static_cast<int>(s)};
        comp[s] = n_comp;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v : adj[static_cast<std::size_t>(u)]) {
                if (comp[static_cast<std::size_t>(v)] == -1) {
                    comp[static_cast<std::size_t>(v)] = n_comp;
                    stack.push_back(v);
                }
            }
        }
        ++n_comp;
    }
    std::vector<std::size_t> comp_size(static_cast<std::size_t>(n_comp), 0);
    for (int c : comp) comp_size[static_cast<std::size_t>(c)]++;
    int main_comp = 0;
    for (int c = 1; c < n_comp; ++c) {
        if (comp_size[static_cast<std::size_t>(c)] >
            comp_size[static_cast<std::size_t>(main_comp)]) {
            main_comp = c;
        }
    }
    for (auto it = users.begin(); it != users.end();) {
        const int idx = index.at(it->first);
        it = comp[static_cast<std::size_t>(idx)] == main_comp ? std::next(it)
                                                              : users.erase(it);
    }
    report("main_component", users);

    if (users.empty()) {
        throw EmptyResultError("no user survived the filtering pipeline");
    }

    // Remap the survivors to contiguous uids in ascending original order.
    std::map<std::int64_t, int> uid_of;
    for (const auto& [uid, recs] : users) {
        uid_of.emplace(uid, static_cast<int>(uid_of.size()));
        res.uid_map.push_back(uid);
    }
    for (const auto& [uid, recs] : users) {
        const int new_uid = uid_of.at(uid);
        for (const auto& r : recs) {
            res.trajectories.push_back({new_uid, r.point, r.time});
        }
    }
    sort_trajectories(res.trajectories);

    std::set<std::pair<int, int>> edge_set;
    for (const auto& [u, v] : graph.edges) {
        if (u == v) continue;
        auto iu = uid_of.find(u);
        auto iv = uid_of.find(v);
        if (iu == uid_of.end() || iv == uid_of.end()) continue;
        edge_set.emplace(std::min(iu->second, iv->second),
                         std::max(iu->second, iv->second));
    }
    res.edges.assign(edge_set.begin(), edge_set.end());
    return res;
}

void write_pipeline_report(const std::string& path, const PipelineResult& res) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot open for writing: " + path);
    out << "step\tusers\tcheckins\n";
    for (const auto& s : res.steps) {
        out << s.name << '\t' << s.users << '\t' << s.checkins << '\n';
    }
    out << "final_edges\t" << res.edges.size() << '\n';
    if (!out) throw FileError("write failed: " + path);
}

}  // namespace mobsim::ingest
