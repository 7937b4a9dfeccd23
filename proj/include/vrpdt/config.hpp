#pragma once

// JSON overrides for every tunable constant of the harness. Keys mirror the
// struct fields; unknown keys are rejected.

#include <string>

#include <json.hpp>

#include "bench.hpp"

namespace vrpdt {

namespace detail {

template <class T>
void set_integer(const json& obj, const char* key, T& out, const std::string& where) {
    if (auto it = obj.find(key); it != obj.end()) out = static_cast<T>(get_integer(*it, where + "." + key));
}

inline void set_number(const json& obj, const char* key, double& out, const std::string& where) {
    if (auto it = obj.find(key); it != obj.end()) out = get_number(*it, where + "." + key);
}

inline void set_bool(const json& obj, const char* key, bool& out, const std::string& where) {
    if (auto it = obj.find(key); it != obj.end()) out = get_bool(*it, where + "." + key);
}

inline void apply_region(const json& j, BoundingBox& box, const std::string& where) {
    reject_unknown(j, where, {"south", "west", "north", "east"});
    set_number(j, "south", box.south_west.lat, where);
    set_number(j, "west", box.south_west.lon, where);
    set_number(j, "north", box.north_east.lat, where);
    set_number(j, "east", box.north_east.lon, where);
}

inline void apply_fleet(const json& j, Fleet& f, const std::string& where) {
    reject_unknown(j, where, {"trucks", "drones_per_truck", "Qd", "E", "T_max", "drone_speed", "truck_fallback_speed",
                              "launch_overhead", "retrieval_overhead"});
    set_integer(j, "trucks", f.trucks, where);
    set_integer(j, "drones_per_truck", f.drones_per_truck, where);
    set_integer(j, "Qd", f.drone_capacity, where);
    set_integer(j, "E", f.endurance, where);
    set_integer(j, "T_max", f.horizon, where);
    set_number(j, "drone_speed", f.drone_speed, where);
    set_number(j, "truck_fallback_speed", f.truck_fallback_speed, where);
    set_integer(j, "launch_overhead", f.launch_overhead, where);
    set_integer(j, "retrieval_overhead", f.retrieval_overhead, where);
}

inline void apply_costs(const json& j, CostParams& c, const std::string& where) {
    reject_unknown(j, where, {"c_w", "c_veh", "alpha", "MC", "FP", "FC", "p"});
    set_number(j, "c_w", c.wage_rate, where);
    set_number(j, "c_veh", c.vehicle_cost, where);
    set_number(j, "alpha", c.drone_factor, where);
    set_number(j, "MC", c.miles_converter, where);
    set_number(j, "FP", c.fuel_price, where);
    set_number(j, "FC", c.fuel_consumption, where);
    set_number(j, "p", c.penalty, where);
}

inline void apply_scenario(const json& j, ScenarioSpec& s, const std::string& where) {
    reject_unknown(j, where, {"n_customers", "region", "tw_density", "tw_width", "horizon_start", "seed",
                              "repetitions", "residential_fraction", "eligible_fraction", "capacity_slack",
                              "truck_capacity", "service_seconds", "fleet", "costs"});
    set_integer(j, "n_customers", s.n_customers, where);
    if (auto it = j.find("region"); it != j.end()) apply_region(*it, s.region, where + ".region");
    if (auto it = j.find("tw_density"); it != j.end() && !it->is_null()) {
        s.tw_density = get_number(*it, where + ".tw_density");
    }
    if (auto it = j.find("tw_width"); it != j.end() && !it->is_null()) {
        s.tw_width = get_integer(*it, where + ".tw_width");
    }
    if (auto it = j.find("horizon_start"); it != j.end()) {
        if (!it->is_string()) throw FormatError(where + ".horizon_start: expected a string");
        s.horizon_start = it->get<std::string>();
        Calendar::parse_datetime(s.horizon_start);
    }
    set_integer(j, "seed", s.seed, where);
    set_integer(j, "repetitions", s.repetitions, where);
    set_number(j, "residential_fraction", s.residential_fraction, where);
    set_number(j, "eligible_fraction", s.eligible_fraction, where);
    set_number(j, "capacity_slack", s.capacity_slack, where);
    if (auto it = j.find("truck_capacity"); it != j.end() && !it->is_null()) {
        s.truck_capacity = static_cast<int>(get_integer(*it, where + ".truck_capacity"));
    }
    set_integer(j, "service_seconds", s.service_seconds, where);
    if (auto it = j.find("fleet"); it != j.end()) apply_fleet(*it, s.fleet, where + ".fleet");
    if (auto it = j.find("costs"); it != j.end()) apply_costs(*it, s.costs, where + ".costs");
}

inline void apply_search(const json& j, SearchConfig& s, const std::string& where) {
    reject_unknown(j, where, {"max_iterations", "rng_seed", "neighborhood_order", "moves_per_shake", "sample_width",
                              "full_enumeration", "max_total_iterations", "time_budget"});
    set_integer(j, "max_iterations", s.max_iterations, where);
    set_integer(j, "rng_seed", s.rng_seed, where);
    if (auto it = j.find("neighborhood_order"); it != j.end()) {
        if (!it->is_array() || it->size() != static_cast<std::size_t>(kMoveCount)) {
            throw FormatError(where + ".neighborhood_order: expected 8 move ids");
        }
        for (std::size_t k = 0; k < it->size(); ++k) {
            s.neighborhood_order[k] = static_cast<int>(get_integer((*it)[k], where + ".neighborhood_order"));
        }
    }
    set_integer(j, "moves_per_shake", s.moves_per_shake, where);
    set_integer(j, "sample_width", s.sample_width, where);
    set_bool(j, "full_enumeration", s.full_enumeration, where);
    set_integer(j, "max_total_iterations", s.max_total_iterations, where);
    if (auto it = j.find("time_budget"); it != j.end()) {
        if (it->is_null()) {
            s.time_budget.reset();
        } else {
            s.time_budget = get_number(*it, where + ".time_budget");
        }
    }
}

inline void apply_oracle(const json& j, OracleParams& o, const std::string& where) {
    reject_unknown(j, where, {"zones_lat", "zones_lon", "free_speed", "detour_factor", "detour_jitter", "noise",
                              "zone_low", "zone_high", "residential_level", "residential_swing", "seed"});
    set_integer(j, "zones_lat", o.zones_lat, where);
    set_integer(j, "zones_lon", o.zones_lon, where);
    set_number(j, "free_speed", o.free_speed, where);
    set_number(j, "detour_factor", o.detour_factor, where);
    set_number(j, "detour_jitter", o.detour_jitter, where);
    set_number(j, "noise", o.noise, where);
    set_number(j, "zone_low", o.zone_low, where);
    set_number(j, "zone_high", o.zone_high, where);
    set_number(j, "residential_level", o.residential_level, where);
    set_number(j, "residential_swing", o.residential_swing, where);
    set_integer(j, "seed", o.seed, where);
}

}  // namespace detail

/// Applies a config document on top of `cfg`. Sections: scenario, search,
/// oracle, training {trips, max_distance, seed}.
inline void apply_config(const nlohmann::json& doc, BenchConfig& cfg) {
    using namespace detail;
    reject_unknown(doc, "config", {"scenario", "search", "oracle", "training"});
    if (auto it = doc.find("scenario"); it != doc.end()) apply_scenario(*it, cfg.scenario, "scenario");
    if (auto it = doc.find("search"); it != doc.end()) apply_search(*it, cfg.search, "search");
    if (auto it = doc.find("oracle"); it != doc.end()) apply_oracle(*it, cfg.oracle, "oracle");
    if (auto it = doc.find("training"); it != doc.end()) {
        reject_unknown(*it, "training", {"trips", "max_distance", "seed"});
        set_integer(*it, "trips", cfg.training_trips, "training");
        set_number(*it, "max_distance", cfg.max_trip_distance, "training");
        set_integer(*it, "seed", cfg.training_seed, "training");
    }
    validate(cfg.scenario);
    validate(cfg.search);
}

inline BenchConfig load_config(const std::string& path, BenchConfig base = {}) {
    apply_config(detail::parse_json_text(detail::read_file(path), path), base);
    return base;
}

}  // namespace vrpdt
