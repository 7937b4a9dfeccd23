#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "calendar.hpp"
#include "errors.hpp"
#include "geo.hpp"

namespace vrpdt {

/// Node 0 is the depot (both start and the implicit terminal n+1); customers are 1..n.
using NodeId = int;

inline constexpr NodeId kDepot = 0;

struct TimeWindow {
    Seconds open = 0;
    Seconds close = 0;

    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

struct Customer {
    NodeId id = 0;
    GeoPoint location;
    int demand = 1;  // parcels
    std::optional<TimeWindow> window;
    bool residential = false;
    Seconds service_seconds = 0;

    friend bool operator==(const Customer&, const Customer&) = default;
};

struct CostParams {
    double wage_rate = 0.005;           // c_w, currency per second
    double vehicle_cost = 0.0006;       // c_veh, currency per meter
    double drone_factor = 0.1;          // alpha
    double miles_converter = 0.000621371;  // MC, miles per meter
    double fuel_price = 3.5;            // FP
    double fuel_consumption = 0.45;     // FC
    double penalty = 1000.0;            // p, currency per violation unit

    friend bool operator==(const CostParams&, const CostParams&) = default;
};

struct Fleet {
    int trucks = 1;
    int drones_per_truck = 1;
    int truck_capacity = 100;  // Qt
    int drone_capacity = 2;    // Qd
    Seconds endurance = 1800;  // E
    Seconds horizon = 8 * 3600;  // T_max
    double drone_speed = 15.0;   // m/s
    double truck_fallback_speed = 10.0;  // m/s
    Seconds launch_overhead = 0;
    Seconds retrieval_overhead = 0;

    friend bool operator==(const Fleet&, const Fleet&) = default;
};

struct Instance {
    GeoPoint depot;
    bool depot_residential = false;
    std::vector<Customer> customers;  // customers[i - 1].id == i
    Fleet fleet;
    CostParams costs;
    Calendar calendar;

    int size() const { return static_cast<int>(customers.size()); }
    const Customer& customer(NodeId id) const { return customers[static_cast<std::size_t>(id - 1)]; }
    const GeoPoint& location(NodeId id) const { return id == kDepot ? depot : customer(id).location; }
    bool residential(NodeId id) const { return id == kDepot ? depot_residential : customer(id).residential; }
    int demand(NodeId id) const { return id == kDepot ? 0 : customer(id).demand; }
    bool drone_eligible(NodeId id) const {
        return id != kDepot && fleet.drones_per_truck > 0 && customer(id).demand <= fleet.drone_capacity;
    }

    friend bool operator==(const Instance& a, const Instance& b) {
        return a.depot == b.depot && a.depot_residential == b.depot_residential && a.customers == b.customers &&
               a.fleet == b.fleet && a.costs == b.costs && a.calendar.start() == b.calendar.start() &&
               a.calendar.holidays() == b.calendar.holidays();
    }
};

/// Throws InvariantError naming the first violated rule.
inline void validate(const Instance& inst) {
    auto fail = [](const std::string& what) { throw InvariantError(what); };
    const Fleet& f = inst.fleet;
    if (f.trucks < 1) fail("fleet.trucks must be >= 1");
    if (f.drones_per_truck < 0) fail("fleet.drones_per_truck must be >= 0");
    if (f.truck_capacity <= 0) fail("Qt must be > 0");
    if (f.drone_capacity <= 0) fail("Qd must be > 0");
    if (f.drone_capacity > f.truck_capacity) fail("Qd must be <= Qt");
    if (f.endurance <= 0) fail("E must be > 0");
    if (f.horizon <= 0) fail("T_max must be > 0");
    if (!(f.drone_speed > 0.0)) fail("drone_speed must be > 0");
    if (!(f.truck_fallback_speed > 0.0)) fail("truck_fallback_speed must be > 0");
    if (f.launch_overhead < 0 || f.retrieval_overhead < 0) fail("launch/retrieval overhead must be >= 0");

    const CostParams& c = inst.costs;
    if (!(c.wage_rate > 0.0)) fail("c_w must be > 0");
    if (!(c.vehicle_cost > 0.0)) fail("c_veh must be > 0");
    if (!(c.drone_factor > 0.0 && c.drone_factor < 1.0)) fail("alpha must be in (0, 1)");
    if (!(c.miles_converter > 0.0) || !(c.fuel_price > 0.0) || !(c.fuel_consumption > 0.0)) {
        fail("MC, FP and FC must be > 0");
    }
    if (!(c.penalty > 0.0)) fail("p must be > 0");

    check_coordinates(inst.depot);
    for (std::size_t i = 0; i < inst.customers.size(); ++i) {
        const Customer& cu = inst.customers[i];
        const std::string where = "customer " + std::to_string(cu.id);
        if (cu.id != static_cast<NodeId>(i + 1)) fail("customer ids must be 1..n in order; found " + where);
        check_coordinates(cu.location);
        if (cu.demand <= 0) fail(where + ": demand must be > 0");
        if (cu.service_seconds < 0) fail(where + ": service_seconds must be >= 0");
        if (cu.window) {
            if (cu.window->open >= cu.window->close) fail(where + ": window open must be < close");
            if (cu.window->open < 0 || cu.window->close > f.horizon) fail(where + ": window outside [0, T_max]");
        }
    }
}

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> known) {
    if (!obj.is_object()) throw FormatError(where + ": expected an object");
    for (const auto& item : obj.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return item.key() == k; })) {
            throw FormatError(where + ": unknown key '" + item.key() + "'");
        }
    }
}

inline const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw FormatError(where + ": missing key '" + key + "'");
    return *it;
}

inline double get_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw FormatError(where + ": expected a number");
    return v.get<double>();
}

inline long long get_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw FormatError(where + ": expected an integer");
    return v.get<long long>();
}

inline bool get_bool(const json& v, const std::string& where) {
    if (!v.is_boolean()) throw FormatError(where + ": expected true/false");
    return v.get<bool>();
}

inline std::string line_context(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(source + ": " + line_context(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace detail

inline Instance instance_from_json(const nlohmann::json& doc) {
    using namespace detail;
    reject_unknown(doc, "instance", {"depot", "customers", "fleet", "costs", "horizon_start", "holidays"});
    Instance inst;

    const json& depot = require(doc, "depot", "instance");
    reject_unknown(depot, "depot", {"lat", "lon", "residential"});
    inst.depot = {get_number(require(depot, "lat", "depot"), "depot.lat"),
                  get_number(require(depot, "lon", "depot"), "depot.lon")};
    if (depot.contains("residential")) inst.depot_residential = get_bool(depot["residential"], "depot.residential");

    const json& fleet = require(doc, "fleet", "instance");
    reject_unknown(fleet, "fleet",
                   {"trucks", "drones_per_truck", "Qt", "Qd", "E", "T_max", "drone_speed", "truck_fallback_speed",
                    "launch_overhead", "retrieval_overhead"});
    Fleet& f = inst.fleet;
    f.trucks = static_cast<int>(get_integer(require(fleet, "trucks", "fleet"), "fleet.trucks"));
    f.drones_per_truck =
        static_cast<int>(get_integer(require(fleet, "drones_per_truck", "fleet"), "fleet.drones_per_truck"));
    f.truck_capacity = static_cast<int>(get_integer(require(fleet, "Qt", "fleet"), "fleet.Qt"));
    f.drone_capacity = static_cast<int>(get_integer(require(fleet, "Qd", "fleet"), "fleet.Qd"));
    f.endurance = get_integer(require(fleet, "E", "fleet"), "fleet.E");
    f.horizon = get_integer(require(fleet, "T_max", "fleet"), "fleet.T_max");
    f.drone_speed = get_number(require(fleet, "drone_speed", "fleet"), "fleet.drone_speed");
    f.truck_fallback_speed = get_number(require(fleet, "truck_fallback_speed", "fleet"), "fleet.truck_fallback_speed");
    if (fleet.contains("launch_overhead")) f.launch_overhead = get_integer(fleet["launch_overhead"], "fleet.launch_overhead");
    if (fleet.contains("retrieval_overhead")) {
        f.retrieval_overhead = get_integer(fleet["retrieval_overhead"], "fleet.retrieval_overhead");
    }

    if (doc.contains("costs")) {
        const json& costs = doc["costs"];
        reject_unknown(costs, "costs", {"c_w", "c_veh", "alpha", "MC", "FP", "FC", "p"});
        CostParams& c = inst.costs;
        auto opt = [&](const char* key, double& out) {
            if (costs.contains(key)) out = get_number(costs[key], std::string("costs.") + key);
        };
        opt("c_w", c.wage_rate);
        opt("c_veh", c.vehicle_cost);
        opt("alpha", c.drone_factor);
        opt("MC", c.miles_converter);
        opt("FP", c.fuel_price);
        opt("FC", c.fuel_consumption);
        opt("p", c.penalty);
    }

    std::vector<std::chrono::sys_days> holidays;
    if (doc.contains("holidays")) {
        if (!doc["holidays"].is_array()) throw FormatError("holidays: expected an array of dates");
        for (const auto& h : doc["holidays"]) {
            if (!h.is_string()) throw FormatError("holidays: expected date strings");
            holidays.push_back(Calendar::parse_date(h.get<std::string>()));
        }
    }
    if (doc.contains("horizon_start")) {
        if (!doc["horizon_start"].is_string()) throw FormatError("horizon_start: expected a datetime string");
        inst.calendar = Calendar(Calendar::parse_datetime(doc["horizon_start"].get<std::string>()), holidays);
    } else {
        inst.calendar = Calendar(Calendar().start(), holidays);
    }

    const json& customers = require(doc, "customers", "instance");
    if (!customers.is_array()) throw FormatError("customers: expected an array");
    for (std::size_t i = 0; i < customers.size(); ++i) {
        const std::string where = "customers[" + std::to_string(i) + "]";
        const json& c = customers[i];
        reject_unknown(c, where, {"id", "lat", "lon", "demand", "window", "residential", "service_seconds"});
        Customer cu;
        cu.id = static_cast<NodeId>(get_integer(require(c, "id", where), where + ".id"));
        cu.location = {get_number(require(c, "lat", where), where + ".lat"),
                       get_number(require(c, "lon", where), where + ".lon")};
        cu.demand = static_cast<int>(get_integer(require(c, "demand", where), where + ".demand"));
        if (c.contains("window") && !c["window"].is_null()) {
            const json& w = c["window"];
            reject_unknown(w, where + ".window", {"open", "close"});
            cu.window = TimeWindow{get_integer(require(w, "open", where + ".window"), where + ".window.open"),
                                   get_integer(require(w, "close", where + ".window"), where + ".window.close")};
        }
        if (c.contains("residential")) cu.residential = get_bool(c["residential"], where + ".residential");
        if (c.contains("service_seconds")) cu.service_seconds = get_integer(c["service_seconds"], where + ".service_seconds");
        inst.customers.push_back(cu);
    }
    std::sort(inst.customers.begin(), inst.customers.end(),
              [](const Customer& a, const Customer& b) { return a.id < b.id; });

    validate(inst);
    return inst;
}

inline nlohmann::json instance_to_json(const Instance& inst) {
    using nlohmann::json;
    json doc;
    doc["depot"] = {{"lat", inst.depot.lat}, {"lon", inst.depot.lon}, {"residential", inst.depot_residential}};
    doc["horizon_start"] = Calendar::format_datetime(inst.calendar.start());
    if (!inst.calendar.holidays().empty()) {
        json hs = json::array();
        for (const auto& d : inst.calendar.holidays()) {
            hs.push_back(Calendar::format_datetime(std::chrono::sys_seconds{d}).substr(0, 10));
        }
        doc["holidays"] = hs;
    }
    const Fleet& f = inst.fleet;
    doc["fleet"] = {{"trucks", f.trucks},
                    {"drones_per_truck", f.drones_per_truck},
                    {"Qt", f.truck_capacity},
                    {"Qd", f.drone_capacity},
                    {"E", f.endurance},
                    {"T_max", f.horizon},
                    {"drone_speed", f.drone_speed},
                    {"truck_fallback_speed", f.truck_fallback_speed},
                    {"launch_overhead", f.launch_overhead},
                    {"retrieval_overhead", f.retrieval_overhead}};
    const CostParams& c = inst.costs;
    doc["costs"] = {{"c_w", c.wage_rate}, {"c_veh", c.vehicle_cost},   {"alpha", c.drone_factor},
                    {"MC", c.miles_converter}, {"FP", c.fuel_price}, {"FC", c.fuel_consumption},
                    {"p", c.penalty}};
    json cs = json::array();
    for (const Customer& cu : inst.customers) {
        json jc = {{"id", cu.id},
                   {"lat", cu.location.lat},
                   {"lon", cu.location.lon},
                   {"demand", cu.demand},
                   {"residential", cu.residential},
                   {"service_seconds", cu.service_seconds}};
        jc["window"] = cu.window ? json{{"open", cu.window->open}, {"close", cu.window->close}} : json(nullptr);
        cs.push_back(std::move(jc));
    }
    doc["customers"] = std::move(cs);
    return doc;
}

inline Instance parse_instance(const std::string& text, const std::string& source = "instance") {
    return instance_from_json(detail::parse_json_text(text, source));
}

inline Instance load_instance(const std::string& path) { return parse_instance(detail::read_file(path), path); }

inline void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path + "'");
    out << instance_to_json(inst).dump(2) << '\n';
}

}  // namespace vrpdt
