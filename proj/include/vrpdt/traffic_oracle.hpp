#pragma once

// Synthetic ground-truth traffic. Stands in for measured road travel times:
// a seeded congestion field over zones and 15-minute bins, a calm regime in
// residential areas, and bounded per-arc noise that no predictor can see.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "calendar.hpp"
#include "errors.hpp"
#include "geo.hpp"
#include "random.hpp"
#include "trips.hpp"

namespace vrpdt {

/// Residential areas as a union of smooth blobs thresholded so that the
/// requested fraction of the region's area is residential.
class ResidentialMap {
public:
    ResidentialMap() = default;

    ResidentialMap(const BoundingBox& region, double fraction, std::uint64_t seed, int blobs = 14)
        : region_(region), fraction_(fraction) {
        if (region.degenerate()) throw InvariantError("residential map: degenerate region");
        if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvariantError("residential fraction must be in [0, 1]");
        Rng rng(hash_combine(seed, 0x5e5));
        for (int k = 0; k < blobs; ++k) {
            Blob b;
            b.lat = uniform_real(rng, region.south_west.lat, region.north_east.lat);
            b.lon = uniform_real(rng, region.south_west.lon, region.north_east.lon);
            b.radius = uniform_real(rng, 0.08, 0.22);  // in units of the region span
            b.weight = uniform_real(rng, 0.6, 1.0);
            blobs_.push_back(b);
        }
        if (fraction <= 0.0) {
            threshold_ = std::numeric_limits<double>::infinity();
        } else if (fraction >= 1.0) {
            threshold_ = -std::numeric_limits<double>::infinity();
        } else {
            constexpr int kGrid = 160;
            std::vector<double> scores;
            scores.reserve(kGrid * kGrid);
            for (int i = 0; i < kGrid; ++i) {
                for (int j = 0; j < kGrid; ++j) {
                    const GeoPoint p{region.south_west.lat + (i + 0.5) / kGrid * region.lat_span(),
                                     region.south_west.lon + (j + 0.5) / kGrid * region.lon_span()};
                    scores.push_back(score(p));
                }
            }
            const auto k = static_cast<std::size_t>(std::floor((1.0 - fraction) * double(scores.size())));
            std::nth_element(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(k), scores.end());
            threshold_ = scores[k];
        }
    }

    bool is_residential(const GeoPoint& p) const { return score(p) >= threshold_; }
    double fraction() const { return fraction_; }

private:
    struct Blob {
        double lat, lon, radius, weight;
    };

    double score(const GeoPoint& p) const {
        double s = 0.0;
        for (const Blob& b : blobs_) {
            const double dy = (p.lat - b.lat) / region_.lat_span();
            const double dx = (p.lon - b.lon) / region_.lon_span();
            s += b.weight * std::exp(-(dx * dx + dy * dy) / (b.radius * b.radius));
        }
        return s;
    }

    BoundingBox region_ = kNycBox;
    double fraction_ = 0.0;
    std::vector<Blob> blobs_;
    double threshold_ = std::numeric_limits<double>::infinity();
};

struct OracleParams {
    BoundingBox region = kNycBox;
    int zones_lat = 6;
    int zones_lon = 6;
    double free_speed = 13.0;       // m/s at multiplier 1
    double detour_factor = 1.3;
    double detour_jitter = 0.10;    // per-pair relative spread of the road distance
    double noise = 0.08;            // per-arc relative duration noise bound
    double zone_low = 0.70;         // zone slowdown factors drawn from [zone_low, zone_high]
    double zone_high = 1.20;
    double residential_level = 0.80;
    double residential_swing = 0.10;  // share of the city-wide slowdown felt in residential areas
    double residential_fraction = 0.6;
    std::uint64_t seed = 7;
};

class TrafficOracle {
public:
    static constexpr int kBins = 96;  // 15-minute bins
    static constexpr Seconds kBinSeconds = kDaySeconds / kBins;
    static constexpr double kMinMultiplier = 0.25;
    static constexpr double kMaxMultiplier = 1.5;

    explicit TrafficOracle(OracleParams params = {})
        : p_(params), residential_(params.region, params.residential_fraction, params.seed) {
        if (p_.region.degenerate()) throw InvariantError("oracle: degenerate region");
        Rng rng(hash_combine(p_.seed, 0x0ac1e));
        const int zones = p_.zones_lat * p_.zones_lon;
        field_.assign(static_cast<std::size_t>(zones) * 2 * kBins, 1.0);
        for (int z = 0; z < zones; ++z) {
            const double factor = uniform_real(rng, p_.zone_low, p_.zone_high);
            const double phase = uniform_real(rng, 0.0, 2.0 * std::numbers::pi);
            const double amp = uniform_real(rng, 0.0, 0.05);
            for (int day_type = 0; day_type < 2; ++day_type) {
                for (int b = 0; b < kBins; ++b) {
                    const double hours = (b + 0.5) * 24.0 / kBins;
                    const double city = day_type == 0 ? weekday_level(hours) : weekend_level(hours);
                    const double wiggle = amp * std::sin(2.0 * std::numbers::pi * 3.0 * b / kBins + phase);
                    // Zone factors scale the slowdown, not the free-flow speed.
                    const double m = 1.0 - (1.0 - city) * factor + wiggle;
                    field_[index(z, day_type, b)] = std::clamp(m, kMinMultiplier, kMaxMultiplier);
                }
            }
        }
        for (int day_type = 0; day_type < 2; ++day_type) {
            for (int b = 0; b < kBins; ++b) {
                const double hours = (b + 0.5) * 24.0 / kBins;
                const double city = day_type == 0 ? weekday_level(hours) : weekend_level(hours);
                residential_field_[static_cast<std::size_t>(day_type * kBins + b)] =
                    std::clamp(p_.residential_level * (1.0 - p_.residential_swing * (1.0 - city)), kMinMultiplier,
                               kMaxMultiplier);
            }
        }
    }

    /// City-wide weekday congestion multiplier at a time of day (hours).
    static double weekday_level(double h) {
        auto bump = [](double x, double mu, double sd) { return std::exp(-((x - mu) / sd) * ((x - mu) / sd)); };
        auto rise = [](double x, double at) { return 1.0 / (1.0 + std::exp(-(x - at) * 2.0)); };
        return 1.0 - 0.50 * bump(h, 8.25, 1.1) - 0.45 * bump(h, 17.5, 1.2) - 0.20 * rise(h, 9.0) * rise(-h, -19.0);
    }
    static double weekend_level(double h) { return 1.0 - 0.4 * (1.0 - weekday_level(h)); }

    const OracleParams& params() const { return p_; }
    const ResidentialMap& residential_map() const { return residential_; }
    int zone_of(const GeoPoint& g) const {
        auto cell = [](double x, double lo, double span, int cells) {
            return std::clamp(static_cast<int>(std::floor((x - lo) / span * cells)), 0, cells - 1);
        };
        return cell(g.lat, p_.region.south_west.lat, p_.region.lat_span(), p_.zones_lat) * p_.zones_lon +
               cell(g.lon, p_.region.south_west.lon, p_.region.lon_span(), p_.zones_lon);
    }

    /// Congestion multiplier experienced at one end of an arc.
    double point_multiplier(const GeoPoint& g, bool residential, const CalendarFeatures& cal) const {
        const int b = static_cast<int>((cal.seconds_of_day % kDaySeconds) / kBinSeconds);
        const int day_type = cal.work_day ? 0 : 1;
        if (residential) return residential_field_[static_cast<std::size_t>(day_type * kBins + b)];
        return field_[index(zone_of(g), day_type, b)];
    }

    TravelEstimate travel(const TravelQuery& q) const {
        return travel_with_haversine(q, haversine_m(q.origin, q.destination), residential_.is_residential(q.origin),
                                     residential_.is_residential(q.destination));
    }

    TravelEstimate travel_with_haversine(const TravelQuery& q, double haversine, bool origin_residential,
                                         bool dest_residential) const {
        if (haversine <= 0.0) return {0.0, 0.0};
        const std::uint64_t pair = hash_combine(hash_combine(p_.seed, key(q.origin)), key(q.destination));
        const double distance =
            haversine * p_.detour_factor * (1.0 + p_.detour_jitter * (2.0 * unit_from_hash(pair) - 1.0));
        const double mult = std::clamp(0.5 * (point_multiplier(q.origin, origin_residential, q.calendar) +
                                              point_multiplier(q.destination, dest_residential, q.calendar)),
                                       kMinMultiplier, kMaxMultiplier);
        const auto bin = static_cast<std::uint64_t>(q.calendar.seconds_of_day / kBinSeconds);
        const double jitter = p_.noise * (2.0 * unit_from_hash(hash_combine(pair, bin + 1)) - 1.0);
        return {distance / (p_.free_speed * mult) * (1.0 + jitter), distance};
    }

private:
    static std::uint64_t key(const GeoPoint& g) {
        // Quantized to about 1 cm so the noise is a function of the location.
        const auto a = static_cast<std::int64_t>(std::llround(g.lat * 1e7));
        const auto b = static_cast<std::int64_t>(std::llround(g.lon * 1e7));
        return splitmix64(static_cast<std::uint64_t>(a)) ^ (static_cast<std::uint64_t>(b) * 0x9e3779b97f4a7c15ULL);
    }

    std::size_t index(int zone, int day_type, int bin) const {
        return (static_cast<std::size_t>(zone) * 2 + static_cast<std::size_t>(day_type)) * kBins +
               static_cast<std::size_t>(bin);
    }

    OracleParams p_;
    ResidentialMap residential_;
    std::vector<double> field_;
    std::array<double, 2 * kBins> residential_field_{};
};

inline TravelEstimate oracle_travel(const TrafficOracle& oracle, const TravelQuery& q) { return oracle.travel(q); }

/// Draws `count` trips with uniform endpoints in `region` and uniform departure
/// times over the day of `calendar`'s horizon start. Trips longer than
/// `max_distance` (road meters) are rejected and redrawn.
inline std::vector<TripRecord> sample_trips(const TrafficOracle& oracle, const BoundingBox& region, std::size_t count,
                                            double max_distance, std::uint64_t seed,
                                            const Calendar& calendar = Calendar()) {
    if (count == 0) throw InvariantError("sample_trips: count must be > 0");
    if (region.degenerate()) throw InvariantError("sample_trips: degenerate region");
    Rng rng(hash_combine(seed, 0x7419));
    const Seconds day_offset = -calendar.seconds_of_day(0);
    std::vector<TripRecord> out;
    out.reserve(count);
    const std::size_t max_attempts = count * 50 + 1000;
    std::size_t attempts = 0;
    while (out.size() < count) {
        if (++attempts > max_attempts) {
            throw InvariantError("sample_trips: generation failure, too many trips exceed max_distance");
        }
        TripRecord t;
        TravelQuery& q = t.query;
        q.origin = {uniform_real(rng, region.south_west.lat, region.north_east.lat),
                    uniform_real(rng, region.south_west.lon, region.north_east.lon)};
        q.destination = {uniform_real(rng, region.south_west.lat, region.north_east.lat),
                         uniform_real(rng, region.south_west.lon, region.north_east.lon)};
        const Seconds tod = static_cast<Seconds>(uniform_index(rng, static_cast<std::size_t>(kDaySeconds)));
        q.calendar = calendar.features(day_offset + tod);
        q.depart_at = q.calendar.seconds_of_day;
        t.origin_residential = oracle.residential_map().is_residential(q.origin);
        t.destination_residential = oracle.residential_map().is_residential(q.destination);
        const TravelEstimate e = oracle.travel_with_haversine(q, haversine_m(q.origin, q.destination),
                                                              t.origin_residential, t.destination_residential);
        if (!(e.distance_m > 0.0) || e.distance_m > max_distance) continue;
        t.duration_s = e.duration_s;
        t.trip_miles = e.distance_m / kMetersPerMile;
        t.avg_speed = e.distance_m / e.duration_s;
        out.push_back(t);
    }
    return out;
}

}  // namespace vrpdt
