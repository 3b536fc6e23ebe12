#pragma once

#include <cmath>

namespace mobsim {

// Spherical earth radius used everywhere distances are computed.
inline constexpr double kEarthRadiusKm = 6371.0;

inline constexpr double kPi = 3.14159265358979323846;

struct GeoPoint {
    double lat = 0.0;  // degrees, [-90, 90]
    double lng = 0.0;  // degrees, [-180, 180)

    bool operator==(const GeoPoint&) const = default;
};

struct BoundingBox {
    double min_lat = 0.0;
    double min_lng = 0.0;
    double max_lat = 0.0;
    double max_lng = 0.0;

    bool contains(const GeoPoint& p) const {
        return p.lat >= min_lat && p.lat <= max_lat && p.lng >= min_lng &&
               p.lng <= max_lng;
    }
    double lat_span() const { return max_lat - min_lat; }
    double lng_span() const { return max_lng - min_lng; }
};

inline double deg2rad(double deg) { return deg * kPi / 180.0; }

// Great-circle distance between two points, in km.
inline double haversine_km(const GeoPoint& a, const GeoPoint& b) {
    const double lat1 = deg2rad(a.lat);
    const double lat2 = deg2rad(b.lat);
    const double dlat = lat2 - lat1;
    const double dlng = deg2rad(b.lng - a.lng);
    const double s1 = std::sin(dlat / 2.0);
    const double s2 = std::sin(dlng / 2.0);
    const double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace mobsim
