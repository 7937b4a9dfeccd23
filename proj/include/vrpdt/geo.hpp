#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace vrpdt {

inline constexpr double kEarthRadiusM = 6'371'000.0;

struct GeoPoint {
    double lat = 0.0;  // degrees
    double lon = 0.0;  // degrees

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline void check_coordinates(const GeoPoint& p) {
    if (!(p.lat >= -90.0 && p.lat <= 90.0) || !(p.lon >= -180.0 && p.lon <= 180.0)) {
        throw InvariantError("coordinate out of range: (" + std::to_string(p.lat) + ", " +
                             std::to_string(p.lon) + ")");
    }
}

/// Great-circle distance in meters on a sphere of radius 6 371 km.
inline double haversine_m(const GeoPoint& a, const GeoPoint& b) {
    check_coordinates(a);
    check_coordinates(b);
    if (a == b) return 0.0;
    constexpr double deg = std::numbers::pi / 180.0;
    const double dlat = (b.lat - a.lat) * deg;
    const double dlon = (b.lon - a.lon) * deg;
    const double s1 = std::sin(dlat / 2.0);
    const double s2 = std::sin(dlon / 2.0);
    double h = s1 * s1 + std::cos(a.lat * deg) * std::cos(b.lat * deg) * s2 * s2;
    if (h > 1.0) h = 1.0;
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

struct BoundingBox {
    GeoPoint south_west;
    GeoPoint north_east;

    double lat_span() const { return north_east.lat - south_west.lat; }
    double lon_span() const { return north_east.lon - south_west.lon; }
    bool degenerate() const { return !(lat_span() > 0.0) || !(lon_span() > 0.0); }
    GeoPoint centroid() const {
        return {(south_west.lat + north_east.lat) / 2.0, (south_west.lon + north_east.lon) / 2.0};
    }
    bool contains(const GeoPoint& p) const {
        return p.lat >= south_west.lat && p.lat <= north_east.lat && p.lon >= south_west.lon &&
               p.lon <= north_east.lon;
    }
};

/// Roughly the five boroughs of New York City.
inline constexpr BoundingBox kNycBox{{40.60, -74.05}, {40.85, -73.75}};

}  // namespace vrpdt
