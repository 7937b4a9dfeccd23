#pragma once

// Fixtures and independent reference computations shared by the unit tests.

#include <cmath>
#include <numbers>
#include <vector>

#include <vrpdt/vrpdt.hpp>

namespace testing_support {

using namespace vrpdt;

/// Great-circle distance through the 3-D chord, independent of the haversine form.
inline double chord_distance_m(const GeoPoint& a, const GeoPoint& b) {
    constexpr double deg = std::numbers::pi / 180.0;
    auto xyz = [&](const GeoPoint& p) {
        return std::array<double, 3>{std::cos(p.lat * deg) * std::cos(p.lon * deg),
                                     std::cos(p.lat * deg) * std::sin(p.lon * deg), std::sin(p.lat * deg)};
    };
    const auto u = xyz(a), v = xyz(b);
    const double c = std::sqrt((u[0] - v[0]) * (u[0] - v[0]) + (u[1] - v[1]) * (u[1] - v[1]) +
                               (u[2] - v[2]) * (u[2] - v[2]));
    return 2.0 * 6'371'000.0 * std::asin(std::min(1.0, c / 2.0));
}

/// n customers scattered around lower Manhattan, demand 1, no windows.
inline Instance scattered_instance(int n, std::uint64_t seed, int trucks = 1, int drones = 1) {
    Rng rng(seed);
    Instance inst;
    inst.depot = {40.72, -73.98};
    inst.fleet.trucks = trucks;
    inst.fleet.drones_per_truck = drones;
    inst.fleet.truck_capacity = 1000;
    inst.fleet.drone_capacity = 2;
    inst.fleet.endurance = 3600;
    inst.fleet.horizon = 12 * 3600;
    for (int i = 1; i <= n; ++i) {
        Customer c;
        c.id = i;
        c.location = {uniform_real(rng, 40.68, 40.76), uniform_real(rng, -74.02, -73.94)};
        c.demand = 1;
        inst.customers.push_back(c);
    }
    return inst;
}

/// Explicit leg tables: truck and drone duration/distance per ordered node pair.
/// Truck legs are priced with the time-dependent cost, drone legs with alpha times it.
class TableArcs {
public:
    explicit TableArcs(const Instance& inst)
        : inst_(&inst), n_(static_cast<std::size_t>(inst.size()) + 1), tt_(n_ * n_), td_(n_ * n_), dt_(n_ * n_),
          dd_(n_ * n_) {}

    void set_truck(NodeId i, NodeId j, double t, double d) {
        tt_[idx(i, j)] = t;
        td_[idx(i, j)] = d;
    }
    void set_drone(NodeId i, NodeId j, double t, double d) {
        dt_[idx(i, j)] = t;
        dd_[idx(i, j)] = d;
    }
    void set_truck_sym(NodeId i, NodeId j, double t, double d) {
        set_truck(i, j, t, d);
        set_truck(j, i, t, d);
    }
    void set_drone_sym(NodeId i, NodeId j, double t, double d) {
        set_drone(i, j, t, d);
        set_drone(j, i, t, d);
    }

    LegEstimate truck_leg(NodeId i, NodeId j, Seconds) const {
        if (i == j) return {};
        const double t = tt_[idx(i, j)], d = td_[idx(i, j)];
        return {t, d, t * inst_->costs.wage_rate + d * inst_->costs.vehicle_cost};
    }
    LegEstimate drone_leg(NodeId i, NodeId j) const {
        if (i == j) return {};
        const double t = dt_[idx(i, j)], d = dd_[idx(i, j)];
        return {t, d, inst_->costs.drone_factor * (t * inst_->costs.wage_rate + d * inst_->costs.vehicle_cost)};
    }

private:
    std::size_t idx(NodeId i, NodeId j) const { return static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j); }
    const Instance* inst_;
    std::size_t n_;
    std::vector<double> tt_, td_, dt_, dd_;
};

/// Integer-second legs derived from geometry, so every duration is exact.
inline TableArcs integer_table(const Instance& inst, double truck_speed = 10.0, double drone_speed = 15.0) {
    TableArcs t(inst);
    for (NodeId i = 0; i <= inst.size(); ++i) {
        for (NodeId j = 0; j <= inst.size(); ++j) {
            if (i == j) continue;
            const double h = chord_distance_m(inst.location(i), inst.location(j));
            t.set_truck(i, j, std::round(1.3 * h / truck_speed), std::round(1.3 * h));
            t.set_drone(i, j, std::round(h / drone_speed), std::round(h));
        }
    }
    return t;
}

/// Random valid encoding: shuffled customers split into up to `trucks` routes,
/// random drone flags, then repaired.
inline Encoding random_encoding(const Instance& inst, Rng& rng, double flag_rate = 0.3) {
    std::vector<NodeId> ids;
    for (NodeId v = 1; v <= inst.size(); ++v) ids.push_back(v);
    shuffle(ids, rng);
    Encoding e;
    e.upper.push_back(kDepot);
    const int routes = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(inst.fleet.trucks)));
    for (std::size_t k = 0; k < ids.size(); ++k) {
        e.upper.push_back(ids[k]);
        if (k + 1 < ids.size() && uniform01(rng) < double(routes - 1) / double(ids.size())) e.upper.push_back(kDepot);
    }
    e.upper.push_back(kDepot);
    for (NodeId v : e.upper) e.lower.push_back(v != kDepot && uniform01(rng) < flag_rate ? 1 : 0);
    return repair(e, inst);
}

/// Sum of leg costs straight from the decoded plan, with no scheduling.
template <class Arcs>
double closed_form_cost(const DecodedPlan& plan, Arcs& arcs) {
    double z = 0.0;
    for (const Route& r : plan.routes) {
        NodeId prev = kDepot;
        for (NodeId v : r.visits) {
            z += arcs.truck_leg(prev, v, 0).cost;
            prev = v;
        }
        z += arcs.truck_leg(prev, kDepot, 0).cost;
        for (const Sortie& s : r.sorties) {
            z += arcs.drone_leg(s.launch, s.customer).cost + arcs.drone_leg(s.customer, s.rendezvous).cost;
        }
    }
    return z;
}

}  // namespace testing_support
