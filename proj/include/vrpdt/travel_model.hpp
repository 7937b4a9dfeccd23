#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "geo.hpp"
#include "instance.hpp"
#include "trips.hpp"

namespace vrpdt {

enum class ModelKind { static_haversine, parametric_profile, learned_table };

inline const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::static_haversine: return "static_haversine";
        case ModelKind::parametric_profile: return "parametric_profile";
        case ModelKind::learned_table: return "learned_table";
    }
    return "?";
}

/// Linear regression of trip duration over named trip-CSV features.
struct LinearPayload {
    std::vector<std::string> features;
    std::vector<double> mean;
    std::vector<double> scale;
    std::vector<double> coef;
    double intercept = 0.0;
    double max_speed = 40.0;  // floors the prediction at distance / max_speed
};

/// Mean speed per (origin zone, destination zone, time-of-day bin).
struct GridPayload {
    BoundingBox region = kNycBox;
    int zones_lat = 1;
    int zones_lon = 1;
    Seconds bin_seconds = 3600;
    std::vector<double> speed;  // [(zo * Z + zd) * bins + bin]

    int zones() const { return zones_lat * zones_lon; }
    int bins() const { return static_cast<int>(kDaySeconds / bin_seconds); }

    int zone_of(const GeoPoint& p) const {
        auto cell = [](double x, double lo, double span, int cells) {
            const int c = static_cast<int>(std::floor((x - lo) / span * cells));
            return std::clamp(c, 0, cells - 1);
        };
        return cell(p.lat, region.south_west.lat, region.lat_span(), zones_lat) * zones_lon +
               cell(p.lon, region.south_west.lon, region.lon_span(), zones_lon);
    }

    double at(int zo, int zd, int bin) const {
        return speed[(static_cast<std::size_t>(zo) * static_cast<std::size_t>(zones()) + static_cast<std::size_t>(zd)) *
                         static_cast<std::size_t>(bins()) +
                     static_cast<std::size_t>(bin)];
    }
};

struct LearnedPayload {
    enum class Kind { linear, grid } kind = Kind::grid;
    LinearPayload linear;
    GridPayload grid;
};

struct TravelModel {
    ModelKind kind = ModelKind::static_haversine;
    double detour_factor = 1.3;
    double static_speed = 10.0;  // m/s, static_haversine only
    double base_speed = 10.0;    // m/s, parametric_profile
    std::array<double, 24> speed_profile{};  // hourly multipliers of base_speed
    std::optional<LearnedPayload> learned;
    double avg_speed = 8.0;  // m/s, residential fallback

    static TravelModel static_haversine(double speed, double detour = 1.3) {
        TravelModel m;
        m.kind = ModelKind::static_haversine;
        m.static_speed = speed;
        m.detour_factor = detour;
        m.avg_speed = speed;
        return m;
    }

    static TravelModel profile(double base_speed, const std::array<double, 24>& multipliers, double detour = 1.3) {
        TravelModel m;
        m.kind = ModelKind::parametric_profile;
        m.base_speed = base_speed;
        m.speed_profile = multipliers;
        m.detour_factor = detour;
        m.avg_speed = base_speed;
        return m;
    }

    static TravelModel constant_profile(double speed, double detour = 1.3) {
        std::array<double, 24> ones;
        ones.fill(1.0);
        return profile(speed, ones, detour);
    }
};

inline void validate(const TravelModel& m) {
    if (!(m.detour_factor >= 1.0)) throw ModelError("detour_factor must be >= 1");
    if (!(m.avg_speed > 0.0)) throw ModelError("avg_speed must be > 0");
    switch (m.kind) {
        case ModelKind::static_haversine:
            if (!(m.static_speed > 0.0)) throw ModelError("static speed must be > 0");
            break;
        case ModelKind::parametric_profile:
            if (!(m.base_speed > 0.0)) throw ModelError("base_speed must be > 0");
            for (double x : m.speed_profile) {
                if (!(x > 0.0)) throw ModelError("speed multipliers must be > 0");
            }
            break;
        case ModelKind::learned_table: {
            if (!m.learned) throw ModelError("learned_table model without payload");
            const LearnedPayload& p = *m.learned;
            if (p.kind == LearnedPayload::Kind::grid) {
                const GridPayload& g = p.grid;
                if (g.zones_lat < 1 || g.zones_lon < 1) throw ModelError("grid: zone counts must be >= 1");
                if (g.bin_seconds <= 0 || kDaySeconds % g.bin_seconds != 0) {
                    throw ModelError("grid: bin_seconds must divide 86400");
                }
                if (g.region.degenerate()) throw ModelError("grid: degenerate region");
                const std::size_t expect = static_cast<std::size_t>(g.zones()) * static_cast<std::size_t>(g.zones()) *
                                           static_cast<std::size_t>(g.bins());
                if (g.speed.size() != expect) {
                    throw ModelError("grid: expected " + std::to_string(expect) + " speeds, got " +
                                     std::to_string(g.speed.size()));
                }
                for (double s : g.speed) {
                    if (!(s > 0.0)) throw ModelError("grid: speeds must be > 0");
                }
            } else {
                const LinearPayload& l = p.linear;
                const std::size_t k = l.features.size();
                if (k == 0 || l.mean.size() != k || l.scale.size() != k || l.coef.size() != k) {
                    throw ModelError("linear: features/mean/scale/coef length mismatch");
                }
                const auto& cols = trip_csv_columns();
                for (const auto& f : l.features) {
                    if (f == "duration_s" || std::find(cols.begin(), cols.end(), f) == cols.end()) {
                        throw ModelError("linear: unknown feature '" + f + "'");
                    }
                }
                for (double s : l.scale) {
                    if (!(s != 0.0)) throw ModelError("linear: zero feature scale");
                }
                if (!(l.max_speed > 0.0)) throw ModelError("linear: max_speed must be > 0");
            }
            break;
        }
    }
}

namespace detail {

inline double linear_duration(const TravelModel& m, const LinearPayload& l, const TravelQuery& q, double distance) {
    TripRecord row;
    row.query = q;
    row.query.calendar.seconds_of_day = q.calendar.seconds_of_day;
    row.avg_speed = m.avg_speed;
    row.trip_miles = distance / kMetersPerMile;
    const auto values = trip_row_values(row);
    const auto& cols = trip_csv_columns();
    double y = l.intercept;
    for (std::size_t k = 0; k < l.features.size(); ++k) {
        const auto idx = static_cast<std::size_t>(std::find(cols.begin(), cols.end(), l.features[k]) - cols.begin());
        y += l.coef[k] * (values[idx] - l.mean[k]) / l.scale[k];
    }
    return std::max(y, distance / l.max_speed);
}

}  // namespace detail

/// Prediction with the straight-line distance already known (the solver
/// precomputes it per node pair).
inline TravelEstimate predict_with_haversine(const TravelModel& m, const TravelQuery& q, double haversine) {
    if (haversine <= 0.0) return {0.0, 0.0};
    const double distance = haversine * m.detour_factor;
    switch (m.kind) {
        case ModelKind::static_haversine:
            return {distance / m.static_speed, distance};
        case ModelKind::parametric_profile: {
            const auto hour = static_cast<std::size_t>((q.calendar.seconds_of_day / 3600) % 24);
            return {distance / (m.base_speed * m.speed_profile[hour]), distance};
        }
        case ModelKind::learned_table: {
            if (!m.learned) throw ModelError("learned_table model without payload");
            const LearnedPayload& p = *m.learned;
            if (p.kind == LearnedPayload::Kind::grid) {
                const GridPayload& g = p.grid;
                const int bin = static_cast<int>((q.calendar.seconds_of_day % kDaySeconds) / g.bin_seconds);
                return {distance / g.at(g.zone_of(q.origin), g.zone_of(q.destination), bin), distance};
            }
            return {detail::linear_duration(m, p.linear, q, distance), distance};
        }
    }
    throw ModelError("unknown model kind");
}

inline TravelEstimate predict(const TravelModel& m, const TravelQuery& q) {
    return predict_with_haversine(m, q, haversine_m(q.origin, q.destination));
}

/// Tally of model evaluations made inside one evaluation context.
struct PredictionCounters {
    std::uint64_t predictor_calls = 0;
    std::uint64_t bypassed = 0;
};

/// Residential-area gate: arcs with both ends residential skip the model and
/// use distance / avg_speed.
inline TravelEstimate predict_ra_aware_with_haversine(const TravelModel& m, const TravelQuery& q, double haversine,
                                                      bool origin_residential, bool dest_residential,
                                                      PredictionCounters* counters = nullptr) {
    if (haversine <= 0.0) return {0.0, 0.0};
    if (origin_residential && dest_residential) {
        if (counters) ++counters->bypassed;
        const double distance = haversine * m.detour_factor;
        return {distance / m.avg_speed, distance};
    }
    if (counters) ++counters->predictor_calls;
    return predict_with_haversine(m, q, haversine);
}

inline TravelEstimate predict_ra_aware(const TravelModel& m, const TravelQuery& q, bool origin_residential,
                                       bool dest_residential, PredictionCounters* counters = nullptr) {
    return predict_ra_aware_with_haversine(m, q, haversine_m(q.origin, q.destination), origin_residential,
                                           dest_residential, counters);
}

/// Straight-line drone flight time in seconds; traffic does not apply.
inline double drone_time(const GeoPoint& a, const GeoPoint& b, const Instance& inst) {
    return haversine_m(a, b) / inst.fleet.drone_speed;
}

// ---------------------------------------------------------------------------
// Model file

inline constexpr const char* kModelFormat = "vrpdt-travel-model";
inline constexpr int kModelVersion = 1;

inline nlohmann::json model_to_json(const TravelModel& m) {
    using nlohmann::json;
    json doc = {{"format", kModelFormat},
                {"version", kModelVersion},
                {"kind", to_string(m.kind)},
                {"detour_factor", m.detour_factor},
                {"avg_speed", m.avg_speed}};
    switch (m.kind) {
        case ModelKind::static_haversine:
            doc["static"] = {{"speed", m.static_speed}};
            break;
        case ModelKind::parametric_profile:
            doc["profile"] = {{"base_speed", m.base_speed},
                              {"multipliers", std::vector<double>(m.speed_profile.begin(), m.speed_profile.end())}};
            break;
        case ModelKind::learned_table: {
            const LearnedPayload& p = *m.learned;
            if (p.kind == LearnedPayload::Kind::grid) {
                const GridPayload& g = p.grid;
                doc["learned"] = {{"kind", "grid"},
                                  {"region",
                                   {{"south", g.region.south_west.lat},
                                    {"west", g.region.south_west.lon},
                                    {"north", g.region.north_east.lat},
                                    {"east", g.region.north_east.lon}}},
                                  {"zones_lat", g.zones_lat},
                                  {"zones_lon", g.zones_lon},
                                  {"bin_seconds", g.bin_seconds},
                                  {"speed", g.speed}};
            } else {
                const LinearPayload& l = p.linear;
                doc["learned"] = {{"kind", "linear"},   {"features", l.features}, {"mean", l.mean},
                                  {"scale", l.scale},   {"coef", l.coef},         {"intercept", l.intercept},
                                  {"max_speed", l.max_speed}};
            }
            break;
        }
    }
    return doc;
}

inline TravelModel model_from_json(const nlohmann::json& doc) {
    using nlohmann::json;
    const std::string ctx = std::string("travel model (") + kModelFormat + " v" + std::to_string(kModelVersion) + ")";
    auto fail = [&](const std::string& what) -> ModelError { return ModelError(ctx + ": " + what); };
    try {
        if (!doc.is_object()) throw fail("expected an object");
        if (doc.value("format", std::string{}) != kModelFormat) throw fail("missing or wrong 'format' header");
        if (!doc.contains("version") || !doc["version"].is_number_integer()) throw fail("missing 'version'");
        const int version = doc["version"].get<int>();
        if (version != kModelVersion) {
            throw fail("unsupported version " + std::to_string(version));
        }
        TravelModel m;
        const std::string kind = doc.at("kind").get<std::string>();
        m.detour_factor = doc.at("detour_factor").get<double>();
        m.avg_speed = doc.at("avg_speed").get<double>();
        if (kind == "static_haversine") {
            m.kind = ModelKind::static_haversine;
            m.static_speed = doc.at("static").at("speed").get<double>();
        } else if (kind == "parametric_profile") {
            m.kind = ModelKind::parametric_profile;
            m.base_speed = doc.at("profile").at("base_speed").get<double>();
            const auto mult = doc.at("profile").at("multipliers").get<std::vector<double>>();
            if (mult.size() != 24) throw fail("profile needs 24 hourly multipliers");
            std::copy(mult.begin(), mult.end(), m.speed_profile.begin());
        } else if (kind == "learned_table") {
            m.kind = ModelKind::learned_table;
            const json& l = doc.at("learned");
            LearnedPayload p;
            const std::string lk = l.at("kind").get<std::string>();
            if (lk == "grid") {
                p.kind = LearnedPayload::Kind::grid;
                const json& r = l.at("region");
                p.grid.region = {{r.at("south").get<double>(), r.at("west").get<double>()},
                                 {r.at("north").get<double>(), r.at("east").get<double>()}};
                p.grid.zones_lat = l.at("zones_lat").get<int>();
                p.grid.zones_lon = l.at("zones_lon").get<int>();
                p.grid.bin_seconds = l.at("bin_seconds").get<Seconds>();
                p.grid.speed = l.at("speed").get<std::vector<double>>();
            } else if (lk == "linear") {
                p.kind = LearnedPayload::Kind::linear;
                p.linear.features = l.at("features").get<std::vector<std::string>>();
                p.linear.mean = l.at("mean").get<std::vector<double>>();
                p.linear.scale = l.at("scale").get<std::vector<double>>();
                p.linear.coef = l.at("coef").get<std::vector<double>>();
                p.linear.intercept = l.at("intercept").get<double>();
                if (l.contains("max_speed")) p.linear.max_speed = l.at("max_speed").get<double>();
            } else {
                throw fail("unknown learned kind '" + lk + "'");
            }
            m.learned = std::move(p);
        } else {
            throw fail("unknown kind '" + kind + "'");
        }
        validate(m);
        return m;
    } catch (const json::exception& e) {
        throw fail(e.what());
    } catch (const ModelError& e) {
        const std::string what = e.what();
        if (what.rfind(ctx, 0) == 0) throw;
        throw fail(what);
    }
}

struct ConformanceResult {
    std::size_t queries = 0;
    double max_relative_diff = 0.0;
};

/// Re-evaluates the conformance batch shipped with a model file. Each entry
/// holds trip-CSV columns with `duration_s` set to the trainer's prediction.
inline ConformanceResult check_conformance(const TravelModel& m, const nlohmann::json& batch) {
    ConformanceResult r;
    const auto& cols = trip_csv_columns();
    for (const auto& row : batch) {
        std::vector<double> v(cols.size(), 0.0);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (row.contains(cols[k])) v[k] = row[cols[k]].get<double>();
        }
        const TripRecord t = trip_from_values(v);
        const double mine = predict(m, t.query).duration_s;
        const double theirs = t.duration_s;
        const double denom = std::max(std::abs(theirs), 1e-12);
        r.max_relative_diff = std::max(r.max_relative_diff, std::abs(mine - theirs) / denom);
        ++r.queries;
    }
    return r;
}

/// Builds a conformance batch from trip rows: the same columns, with
/// `duration_s` replaced by this model's prediction.
inline nlohmann::json conformance_batch(const TravelModel& m, const std::vector<TripRecord>& trips) {
    nlohmann::json batch = nlohmann::json::array();
    const auto& cols = trip_csv_columns();
    for (TripRecord t : trips) {
        t.duration_s = predict(m, t.query).duration_s;
        const auto v = trip_row_values(t);
        nlohmann::json row;
        for (std::size_t k = 0; k < cols.size(); ++k) row[cols[k]] = v[k];
        batch.push_back(std::move(row));
    }
    return batch;
}

inline TravelModel parse_model(const std::string& text, const std::string& source = "model",
                               double conformance_tolerance = 1e-6) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelError(source + ": travel model (" + kModelFormat + " v" + std::to_string(kModelVersion) +
                         ") unreadable at " + detail::line_context(text, e.byte == 0 ? 0 : e.byte - 1) + ": " +
                         e.what());
    }
    TravelModel m = model_from_json(doc);
    if (doc.contains("conformance")) {
        const auto r = check_conformance(m, doc["conformance"]);
        if (r.max_relative_diff > conformance_tolerance) {
            throw ModelError(source + ": conformance batch disagrees (max relative diff " +
                             std::to_string(r.max_relative_diff) + ")");
        }
    }
    return m;
}

inline TravelModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str(), path);
}

inline void save_model(const TravelModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ModelError("cannot write model file '" + path + "'");
    out << model_to_json(m).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Fitting from trip samples

/// Fits a parametric profile: global detour factor, overall mean speed and
/// hourly multipliers (ratio-of-sums estimators), plus the residential
/// fallback speed from trips whose ends are both residential.
inline TravelModel fit_profile(const std::vector<TripRecord>& trips) {
    if (trips.empty()) throw ModelError("fit_profile: no trips");
    double detour_sum = 0.0;
    std::size_t detour_n = 0;
    double dist_all = 0.0, dur_all = 0.0, dist_res = 0.0, dur_res = 0.0;
    std::array<double, 24> dist_h{}, dur_h{};
    for (const TripRecord& t : trips) {
        const double h = haversine_m(t.query.origin, t.query.destination);
        const double d = t.distance_m();
        if (h > 0.0) {
            detour_sum += d / h;
            ++detour_n;
        }
        dist_all += d;
        dur_all += t.duration_s;
        const auto hour = static_cast<std::size_t>((t.query.calendar.seconds_of_day / 3600) % 24);
        dist_h[hour] += d;
        dur_h[hour] += t.duration_s;
        if (t.origin_residential && t.destination_residential) {
            dist_res += d;
            dur_res += t.duration_s;
        }
    }
    if (!(dur_all > 0.0)) throw ModelError("fit_profile: degenerate durations");
    const double base = dist_all / dur_all;
    std::array<double, 24> mult;
    for (std::size_t k = 0; k < 24; ++k) mult[k] = dur_h[k] > 0.0 ? (dist_h[k] / dur_h[k]) / base : 1.0;
    TravelModel m = TravelModel::profile(base, mult, detour_n ? std::max(1.0, detour_sum / double(detour_n)) : 1.3);
    m.avg_speed = dur_res > 0.0 ? dist_res / dur_res : base;
    return m;
}

/// Fits a zone x time-bin speed grid. Sparse cells fall back to the zone-pair
/// mean, then to the bin mean, then to the global mean.
inline TravelModel fit_grid(const std::vector<TripRecord>& trips, const BoundingBox& region, int zones_lat,
                            int zones_lon, Seconds bin_seconds, std::size_t min_cell = 3) {
    if (trips.empty()) throw ModelError("fit_grid: no trips");
    GridPayload g;
    g.region = region;
    g.zones_lat = zones_lat;
    g.zones_lon = zones_lon;
    g.bin_seconds = bin_seconds;
    const std::size_t Z = static_cast<std::size_t>(g.zones()), B = static_cast<std::size_t>(g.bins());
    std::vector<double> dist(Z * Z * B, 0.0), dur(Z * Z * B, 0.0);
    std::vector<std::size_t> cnt(Z * Z * B, 0);
    std::vector<double> pair_dist(Z * Z, 0.0), pair_dur(Z * Z, 0.0), bin_dist(B, 0.0), bin_dur(B, 0.0);
    double all_dist = 0.0, all_dur = 0.0, detour_sum = 0.0, dist_res = 0.0, dur_res = 0.0;
    std::size_t detour_n = 0;
    for (const TripRecord& t : trips) {
        const auto zo = static_cast<std::size_t>(g.zone_of(t.query.origin));
        const auto zd = static_cast<std::size_t>(g.zone_of(t.query.destination));
        const auto b = static_cast<std::size_t>((t.query.calendar.seconds_of_day % kDaySeconds) / bin_seconds);
        const std::size_t idx = (zo * Z + zd) * B + b;
        const double d = t.distance_m();
        dist[idx] += d;
        dur[idx] += t.duration_s;
        ++cnt[idx];
        pair_dist[zo * Z + zd] += d;
        pair_dur[zo * Z + zd] += t.duration_s;
        bin_dist[b] += d;
        bin_dur[b] += t.duration_s;
        all_dist += d;
        all_dur += t.duration_s;
        const double h = haversine_m(t.query.origin, t.query.destination);
        if (h > 0.0) {
            detour_sum += d / h;
            ++detour_n;
        }
        if (t.origin_residential && t.destination_residential) {
            dist_res += d;
            dur_res += t.duration_s;
        }
    }
    if (!(all_dur > 0.0)) throw ModelError("fit_grid: degenerate durations");
    const double global = all_dist / all_dur;
    g.speed.resize(Z * Z * B);
    for (std::size_t zo = 0; zo < Z; ++zo) {
        for (std::size_t zd = 0; zd < Z; ++zd) {
            for (std::size_t b = 0; b < B; ++b) {
                const std::size_t idx = (zo * Z + zd) * B + b;
                double s;
                if (cnt[idx] >= min_cell) {
                    s = dist[idx] / dur[idx];
                } else if (pair_dur[zo * Z + zd] > 0.0 && bin_dur[b] > 0.0) {
                    // Pair level scaled by the bin's deviation from the global mean.
                    s = (pair_dist[zo * Z + zd] / pair_dur[zo * Z + zd]) * (bin_dist[b] / bin_dur[b]) / global;
                } else if (bin_dur[b] > 0.0) {
                    s = bin_dist[b] / bin_dur[b];
                } else {
                    s = global;
                }
                g.speed[idx] = s;
            }
        }
    }
    TravelModel m;
    m.kind = ModelKind::learned_table;
    m.detour_factor = detour_n ? std::max(1.0, detour_sum / double(detour_n)) : 1.3;
    m.avg_speed = dur_res > 0.0 ? dist_res / dur_res : global;
    m.learned = LearnedPayload{LearnedPayload::Kind::grid, {}, std::move(g)};
    return m;
}

}  // namespace vrpdt
