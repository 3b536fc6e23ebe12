#include "mobsim/tessellation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "mobsim/errors.hpp"

namespace mobsim {

namespace {

constexpr double kMetersPerDegree = 111320.0;

BoundingBox hull_of(const std::vector<Location>& locs) {
    BoundingBox b{90.0, 180.0, -90.0, -180.0};
    for (const auto& l : locs) {
        b.min_lat = std::min(b.min_lat, l.centroid.lat);
        b.max_lat = std::max(b.max_lat, l.centroid.lat);
        b.min_lng = std::min(b.min_lng, l.centroid.lng);
        b.max_lng = std::max(b.max_lng, l.centroid.lng);
    }
    return b;
}

FilterResult keep_locations(const WeightedTessellation& tess,
                            const std::vector<char>& keep) {
    FilterResult res;
    res.old_to_new.assign(tess.size(), -1);
    std::vector<Location> kept;
    for (std::size_t i = 0; i < tess.size(); ++i) {
        if (!keep[i]) continue;
        Location l = tess.locations()[i];
        l.id = static_cast<int>(kept.size());
        res.old_to_new[i] = l.id;
        res.new_to_old.push_back(static_cast<int>(i));
        kept.push_back(l);
    }
    if (kept.empty()) {
        throw EmptyResultError("no locations left after filtering");
    }
    std::optional<GridGeometry> grid = tess.grid();
    if (grid) {
        for (auto& cell : grid->cell_to_id) {
            cell = cell >= 0 ? res.old_to_new[cell] : -1;
        }
    }
    res.tessellation = WeightedTessellation(std::move(kept), tess.tile_side_m(),
                                            tess.bbox(), std::move(grid));
    return res;
}

}  // namespace

WeightedTessellation::WeightedTessellation(std::vector<Location> locations,
                                           double tile_side_m, BoundingBox bbox,
                                           std::optional<GridGeometry> grid)
    : locations_(std::move(locations)),
      tile_side_m_(tile_side_m),
      bbox_(bbox),
      grid_(std::move(grid)) {}

const Location& WeightedTessellation::location(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= locations_.size()) {
        throw IdOutOfRangeError("location id out of range: " + std::to_string(id));
    }
    return locations_[static_cast<std::size_t>(id)];
}

void WeightedTessellation::set_relevance(int id, double w) {
    if (id < 0 || static_cast<std::size_t>(id) >= locations_.size()) {
        throw IdOutOfRangeError("location id out of range: " + std::to_string(id));
    }
    locations_[static_cast<std::size_t>(id)].relevance = w;
}

std::optional<int> WeightedTessellation::locate(const GeoPoint& p) const {
    if (locations_.empty()) return std::nullopt;
    if (grid_) {
        const GridGeometry& g = *grid_;
        const double max_lat = g.min_lat + g.n_rows * g.d_lat;
        const double max_lng = g.min_lng + g.n_cols * g.d_lng;
        if (p.lat < g.min_lat || p.lat > max_lat || p.lng < g.min_lng ||
            p.lng > max_lng) {
            return std::nullopt;
        }
        int row = static_cast<int>((p.lat - g.min_lat) / g.d_lat);
        int col = static_cast<int>((p.lng - g.min_lng) / g.d_lng);
        // The last row/column owns its closing edge.
        row = std::min(row, g.n_rows - 1);
        col = std::min(col, g.n_cols - 1);
        const std::int32_t id = g.cell_to_id[static_cast<std::size_t>(row) *
                                                 g.n_cols +
                                             col];
        if (id < 0) return std::nullopt;
        return static_cast<int>(id);
    }
    // No grid: nearest centroid on a locally flat metric.
    const double coslat = std::cos(deg2rad(
        0.5 * (bbox_.min_lat + bbox_.max_lat)));
    double best = std::numeric_limits<double>::max();
    int best_id = -1;
    for (const auto& l : locations_) {
        const double dy = p.lat - l.centroid.lat;
        const double dx = (p.lng - l.centroid.lng) * coslat;
        const double d2 = dy * dy + dx * dx;
        if (d2 < best) {
            best = d2;
            best_id = l.id;
        }
    }
    return best_id;
}

WeightedTessellation build_squared_tessellation(const BoundingBox& bbox,
                                                double tile_side_m) {
    if (!(tile_side_m > 0.0)) {
        throw DegenerateBBoxError("tile side must be positive");
    }
    if (!(bbox.max_lat > bbox.min_lat) || !(bbox.max_lng > bbox.min_lng)) {
        throw DegenerateBBoxError("bounding box has no area");
    }
    GridGeometry g;
    g.min_lat = bbox.min_lat;
    g.min_lng = bbox.min_lng;
    g.d_lat = tile_side_m / kMetersPerDegree;
    const double mid_lat = 0.5 * (bbox.min_lat + bbox.max_lat);
    g.d_lng = tile_side_m / (kMetersPerDegree * std::cos(deg2rad(mid_lat)));
    g.n_rows = static_cast<int>(std::ceil(bbox.lat_span() / g.d_lat - 1e-9));
    g.n_cols = static_cast<int>(std::ceil(bbox.lng_span() / g.d_lng - 1e-9));
    g.n_rows = std::max(g.n_rows, 1);
    g.n_cols = std::max(g.n_cols, 1);

    std::vector<Location> locs;
    locs.reserve(static_cast<std::size_t>(g.n_rows) * g.n_cols);
    g.cell_to_id.resize(static_cast<std::size_t>(g.n_rows) * g.n_cols);
    for (int r = 0; r < g.n_rows; ++r) {
        for (int c = 0; c < g.n_cols; ++c) {
            Location l;
            l.id = static_cast<int>(locs.size());
            l.centroid.lat = g.min_lat + (r + 0.5) * g.d_lat;
            l.centroid.lng = g.min_lng + (c + 0.5) * g.d_lng;
            l.relevance = 0.0;
            g.cell_to_id[static_cast<std::size_t>(r) * g.n_cols + c] = l.id;
            locs.push_back(l);
        }
    }
    // The grid extent is the effective bbox; it can exceed the request when
    // the spans are not exact multiples of the tile side.
    BoundingBox effective = bbox;
    effective.max_lat = g.min_lat + g.n_rows * g.d_lat;
    effective.max_lng = g.min_lng + g.n_cols * g.d_lng;
    return WeightedTessellation(std::move(locs), tile_side_m, effective,
                                std::move(g));
}

AssignResult assign_relevance(const WeightedTessellation& tess,
                              std::span<const GeoPoint> points) {
    std::vector<double> counts(tess.size(), 0.0);
    std::size_t dropped = 0;
    for (const auto& p : points) {
        const auto id = tess.locate(p);
        if (!id) {
            ++dropped;
            continue;
        }
        counts[static_cast<std::size_t>(*id)] += 1.0;
    }
    std::vector<Location> locs = tess.locations();
    for (std::size_t i = 0; i < locs.size(); ++i) {
        locs[i].relevance = counts[i] >= 1.0 ? counts[i] : 0.1;
    }
    AssignResult res;
    res.tessellation = WeightedTessellation(std::move(locs), tess.tile_side_m(),
                                            tess.bbox(), tess.grid());
    res.dropped = dropped;
    return res;
}

FilterResult filter_relevant(const WeightedTessellation& tess) {
    std::vector<char> keep(tess.size(), 0);
    for (std::size_t i = 0; i < tess.size(); ++i) {
        keep[i] = tess.locations()[i].relevance >= 1.0;
    }
    return keep_locations(tess, keep);
}

FilterResult apply_exclusions(const WeightedTessellation& tess,
                              std::span<const int> excluded_ids) {
    std::vector<char> keep(tess.size(), 1);
    for (int id : excluded_ids) {
        if (id >= 0 && static_cast<std::size_t>(id) < tess.size()) {
            keep[static_cast<std::size_t>(id)] = 0;
        }
    }
    return keep_locations(tess, keep);
}

std::vector<double> sample_synthetic_relevance(std::size_t n, double beta,
                                               double lambda, Rng& rng) {
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(sample_truncated_power_law(rng, 1.0, kRelevanceSupportMax,
                                                 beta, lambda));
    }
    return out;
}

double DistanceMatrix::lookup(int i, int j) const {
    const auto n = static_cast<int>(tess_->size());
    if (i < 0 || j < 0 || i >= n || j >= n) {
        throw IdOutOfRangeError("distance lookup out of range");
    }
    if (i == j) return 0.0;
    const std::uint64_t key =
        (static_cast<std::uint64_t>(std::min(i, j)) << 32) |
        static_cast<std::uint32_t>(std::max(i, j));
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    const double d = haversine_km(tess_->location(i).centroid,
                                  tess_->location(j).centroid);
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.emplace(key, d).first->second;
}

std::size_t DistanceMatrix::cached_entries() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.size();
}

void write_tessellation(const std::string& path,
                        const WeightedTessellation& tess) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw FileError("cannot open for writing: " + tmp);
        out << "id,lat,lng,relevance\n";
        char buf[160];
        for (const auto& l : tess.locations()) {
            std::snprintf(buf, sizeof(buf), "%d,%.9f,%.9f,%.10g\n", l.id,
                          l.centroid.lat, l.centroid.lng, l.relevance);
            out << buf;
        }
        if (!out) throw FileError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw FileError("rename failed: " + path);
    }
}

WeightedTessellation read_tessellation(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open tessellation file: " + path);
    std::string line;
    if (!std::getline(in, line)) {
        throw FileError("tessellation file missing header: " + path);
    }
    std::vector<Location> locs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string id_s, lat_s, lng_s, rel_s;
        if (!std::getline(ss, id_s, ',') || !std::getline(ss, lat_s, ',') ||
            !std::getline(ss, lng_s, ',') || !std::getline(ss, rel_s)) {
            throw FileError("malformed tessellation row: " + line);
        }
        Location l;
        try {
            l.id = std::stoi(id_s);
            l.centroid.lat = std::stod(lat_s);
            l.centroid.lng = std::stod(lng_s);
            l.relevance = std::stod(rel_s);
        } catch (const std::exception&) {
            throw FileError("malformed tessellation row: " + line);
        }
        locs.push_back(l);
    }
    if (locs.empty()) throw EmptyResultError("tessellation file has no tiles");
    for (std::size_t i = 0; i < locs.size(); ++i) {
        if (locs[i].id != static_cast<int>(i)) {
            throw FileError("tessellation ids must be contiguous from 0");
        }
    }
    const BoundingBox bbox = hull_of(locs);
    return WeightedTessellation(std::move(locs), 0.0, bbox);
}

std::vector<int> read_exclusion_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open exclusion list: " + path);
    std::vector<int> ids;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ss(line);
        int id;
        if (ss >> id) ids.push_back(id);
    }
    return ids;
}

}  // namespace mobsim
