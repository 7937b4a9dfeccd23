#pragma once

// Trip dataset rows and the trainer CSV format shared with the model trainer.

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "calendar.hpp"
#include "errors.hpp"
#include "geo.hpp"

namespace vrpdt {

inline constexpr double kMetersPerMile = 1609.344;

/// What the travel models see for one truck arc.
struct TravelQuery {
    GeoPoint origin;
    GeoPoint destination;
    Seconds depart_at = 0;  // from horizon start
    CalendarFeatures calendar;
    Weather weather;
};

struct TravelEstimate {
    double duration_s = 0.0;
    double distance_m = 0.0;

    friend bool operator==(const TravelEstimate&, const TravelEstimate&) = default;
};

struct TripRecord {
    TravelQuery query;  // depart_at holds the seconds of day
    double avg_speed = 0.0;   // m/s
    double trip_miles = 0.0;
    double duration_s = 0.0;
    // Not serialized; known only for synthetic trips.
    bool origin_residential = false;
    bool destination_residential = false;

    double distance_m() const { return trip_miles * kMetersPerMile; }
};

inline const std::vector<std::string>& trip_csv_columns() {
    static const std::vector<std::string> cols = {
        "pickup_lon", "pickup_lat", "dropoff_lon", "dropoff_lat", "depart_s", "day_of_week", "day_of_month",
        "hour", "weekend", "work_day", "peak_hour", "public_holiday", "temperature", "dew", "humid", "rain",
        "snow", "visible", "fog", "thunder", "tornado", "clear", "haze", "heavy_rain", "heavy_snow",
        "light_rain", "light_snow", "avg_speed", "trip_miles", "duration_s"};
    return cols;
}

/// Row values in `trip_csv_columns()` order.
inline std::vector<double> trip_row_values(const TripRecord& t) {
    const TravelQuery& q = t.query;
    const CalendarFeatures& c = q.calendar;
    std::vector<double> v = {q.origin.lon,
                             q.origin.lat,
                             q.destination.lon,
                             q.destination.lat,
                             static_cast<double>(c.seconds_of_day),
                             static_cast<double>(c.day_of_week),
                             static_cast<double>(c.day_of_month),
                             static_cast<double>(c.hour),
                             c.weekend ? 1.0 : 0.0,
                             c.work_day ? 1.0 : 0.0,
                             c.peak_hour ? 1.0 : 0.0,
                             c.public_holiday ? 1.0 : 0.0};
    for (double w : q.weather.values()) v.push_back(w);
    v.push_back(t.avg_speed);
    v.push_back(t.trip_miles);
    v.push_back(t.duration_s);
    return v;
}

inline TripRecord trip_from_values(const std::vector<double>& v) {
    TripRecord t;
    TravelQuery& q = t.query;
    q.origin = {v[1], v[0]};
    q.destination = {v[3], v[2]};
    CalendarFeatures& c = q.calendar;
    c.seconds_of_day = static_cast<Seconds>(v[4]);
    q.depart_at = c.seconds_of_day;
    c.day_of_week = static_cast<int>(v[5]);
    c.day_of_month = static_cast<int>(v[6]);
    c.hour = static_cast<int>(v[7]);
    c.weekend = v[8] != 0.0;
    c.work_day = v[9] != 0.0;
    c.peak_hour = v[10] != 0.0;
    c.public_holiday = v[11] != 0.0;
    Weather& w = q.weather;
    double* fields[] = {&w.temperature, &w.dew,  &w.humid,      &w.rain,       &w.snow,
                        &w.visible,     &w.fog,  &w.thunder,    &w.tornado,    &w.clear,
                        &w.haze,        &w.heavy_rain, &w.heavy_snow, &w.light_rain, &w.light_snow};
    for (std::size_t k = 0; k < 15; ++k) *fields[k] = v[12 + k];
    t.avg_speed = v[27];
    t.trip_miles = v[28];
    t.duration_s = v[29];
    return t;
}

inline void write_trips_csv(std::ostream& out, const std::vector<TripRecord>& trips) {
    const auto& cols = trip_csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    char buf[64];
    for (const TripRecord& t : trips) {
        const auto v = trip_row_values(t);
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", v[i]);
            out << (i ? "," : "") << buf;
        }
        out << '\n';
    }
}

inline std::vector<TripRecord> read_trips_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("trip CSV: empty input");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header != trip_csv_columns()) throw FormatError("trip CSV: header does not match the trip schema");
    std::vector<TripRecord> trips;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw FormatError("trip CSV line " + std::to_string(line_no) + ": bad number '" + cell + "'");
            }
        }
        if (v.size() != header.size()) {
            throw FormatError("trip CSV line " + std::to_string(line_no) + ": expected " +
                              std::to_string(header.size()) + " fields");
        }
        trips.push_back(trip_from_values(v));
    }
    return trips;
}

}  // namespace vrpdt
