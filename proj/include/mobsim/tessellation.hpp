#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mobsim/geo.hpp"
#include "mobsim/random.hpp"

namespace mobsim {

struct Location {
    int id = 0;
    GeoPoint centroid;
    double relevance = 0.0;  // collective weight, count-like, >= 0
};

// Grid bookkeeping for tessellations built from a bounding box.  Cells map to
// location ids (-1 where a tile has been filtered out), so point lookup stays
// exact after filtering.
struct GridGeometry {
    double min_lat = 0.0;
    double min_lng = 0.0;
    double d_lat = 0.0;  // degrees per row
    double d_lng = 0.0;  // degrees per column
    int n_rows = 0;
    int n_cols = 0;
    std::vector<std::int32_t> cell_to_id;  // row-major, -1 = no location
};

// A weighted squared tessellation: ordered locations with contiguous ids.
// Tiles own the half-open interval [lower, upper) on both axes; the last
// row/column also owns its closing edge.
class WeightedTessellation {
  public:
    WeightedTessellation() = default;
    WeightedTessellation(std::vector<Location> locations, double tile_side_m,
                         BoundingBox bbox,
                         std::optional<GridGeometry> grid = std::nullopt);

    const std::vector<Location>& locations() const { return locations_; }
    const Location& location(int id) const;
    std::size_t size() const { return locations_.size(); }
    double tile_side_m() const { return tile_side_m_; }
    const BoundingBox& bbox() const { return bbox_; }
    const std::optional<GridGeometry>& grid() const { return grid_; }

    double relevance(int id) const { return location(id).relevance; }
    void set_relevance(int id, double w);

    // Tile owning the point.  Grid tessellations use exact cell lookup;
    // tessellations loaded from a plain file fall back to the nearest
    // centroid.  nullopt when the point falls outside the tessellation.
    std::optional<int> locate(const GeoPoint& p) const;

  private:
    std::vector<Location> locations_;
    double tile_side_m_ = 0.0;
    BoundingBox bbox_;
    std::optional<GridGeometry> grid_;
};

// Grid of square tiles covering the box.  Angular steps are fixed:
// d_lat = side / 111320 m-per-degree and d_lng = side / (111320 * cos(mid
// lat)).  The stored bbox is the grid extent, which may exceed the request
// when the spans are not exact multiples of the tile side.  All relevances
// start at 0.  Throws DegenerateBBoxError on an empty or inverted box.
WeightedTessellation build_squared_tessellation(const BoundingBox& bbox,
                                                double tile_side_m);

struct AssignResult {
    WeightedTessellation tessellation;
    std::size_t dropped = 0;  // points outside the tessellation
};

// Per-tile relevance = number of points in the tile, floored at 0.1 for
// empty tiles.
AssignResult assign_relevance(const WeightedTessellation& tess,
                              std::span<const GeoPoint> points);

struct FilterResult {
    WeightedTessellation tessellation;
    std::vector<int> old_to_new;  // -1 when dropped
    std::vector<int> new_to_old;
};

// Keeps locations with relevance >= 1 and re-indexes them contiguously.
// Throws EmptyResultError when nothing qualifies.
FilterResult filter_relevant(const WeightedTessellation& tess);

// Drops the listed tile ids (e.g. a water mask) and re-indexes.
FilterResult apply_exclusions(const WeightedTessellation& tess,
                              std::span<const int> excluded_ids);

// n independent relevance weights from p(w) ~ w^-beta * exp(-w / lambda) on
// [1, kRelevanceSupportMax].
std::vector<double> sample_synthetic_relevance(std::size_t n, double beta,
                                               double lambda, Rng& rng);

// Lazily cached pairwise centroid distances.  Concurrent lookups are safe
// and always agree: entries are immutable once inserted.
class DistanceMatrix {
  public:
    explicit DistanceMatrix(const WeightedTessellation& tess) : tess_(&tess) {}

    // Throws IdOutOfRangeError on bad ids.
    double lookup(int i, int j) const;
    std::size_t cached_entries() const;

  private:
    const WeightedTessellation* tess_;
    mutable std::unordered_map<std::uint64_t, double> cache_;
    mutable std::mutex mutex_;
};

// File format: CSV with header "id,lat,lng,relevance".
void write_tessellation(const std::string& path,
                        const WeightedTessellation& tess);
WeightedTessellation read_tessellation(const std::string& path);

// One tile id per line; '#' comments and blank lines ignored.
std::vector<int> read_exclusion_list(const std::string& path);

}  // namespace mobsim
