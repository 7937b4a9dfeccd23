#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <vector>

#include "encoding.hpp"
#include "instance.hpp"
#include "traffic_oracle.hpp"
#include "travel_model.hpp"

namespace vrpdt {

/// Travel time, road distance and money for one leg.
struct LegEstimate {
    double duration_s = 0.0;
    double distance_m = 0.0;
    double cost = 0.0;
};

/// Time-dependent truck cost: t * c_w + d * c_veh.
inline double dynamic_cost(const TravelEstimate& e, const CostParams& c) {
    return e.duration_s * c.wage_rate + e.distance_m * c.vehicle_cost;
}

struct ArcCost {
    double cost = 0.0;
    TravelEstimate estimate;
};

inline TravelQuery make_query(const Instance& inst, NodeId i, NodeId j, Seconds depart_at) {
    TravelQuery q;
    q.origin = inst.location(i);
    q.destination = inst.location(j);
    q.depart_at = depart_at;
    q.calendar = inst.calendar.features(depart_at);
    return q;
}

inline ArcCost arc_cost_dynamic(const Instance& inst, NodeId i, NodeId j, Seconds depart_at, const TravelModel& model,
                                bool ra_gate = false, PredictionCounters* counters = nullptr) {
    if (i == j) return {};
    const TravelQuery q = make_query(inst, i, j, depart_at);
    const TravelEstimate e = ra_gate ? predict_ra_aware(model, q, inst.residential(i), inst.residential(j), counters)
                                     : predict(model, q);
    if (!ra_gate && counters && e.distance_m > 0.0) ++counters->predictor_calls;
    return {dynamic_cost(e, inst.costs), e};
}

/// Static baseline: (d * MC) * FP * FC on straight-line distance.
inline double arc_cost_static(const Instance& inst, NodeId i, NodeId j) {
    if (i == j) return 0.0;
    const CostParams& c = inst.costs;
    return haversine_m(inst.location(i), inst.location(j)) * c.miles_converter * c.fuel_price * c.fuel_consumption;
}

/// alpha * (t' * c_w + d * c_veh) with straight-line flight.
inline double drone_leg_cost(const Instance& inst, NodeId i, NodeId j) {
    if (i == j) return 0.0;
    const GeoPoint& a = inst.location(i);
    const GeoPoint& b = inst.location(j);
    const CostParams& c = inst.costs;
    return c.drone_factor * (drone_time(a, b, inst) * c.wage_rate + haversine_m(a, b) * c.vehicle_cost);
}

/// Anything that prices truck and drone legs between instance nodes.
template <class A>
concept ArcSource = requires(A& a, NodeId i, NodeId j, Seconds t) {
    { a.truck_leg(i, j, t) } -> std::convertible_to<LegEstimate>;
    { a.drone_leg(i, j) } -> std::convertible_to<LegEstimate>;
};

namespace detail {

/// Straight-line distances and drone legs for all node pairs.
class NodeGeometry {
public:
    explicit NodeGeometry(const Instance& inst) : n_(static_cast<std::size_t>(inst.size()) + 1) {
        haversine_.resize(n_ * n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double d = haversine_m(inst.location(static_cast<NodeId>(i)), inst.location(static_cast<NodeId>(j)));
                haversine_[i * n_ + j] = d;
                haversine_[j * n_ + i] = d;
            }
        }
    }

    double haversine(NodeId i, NodeId j) const {
        return haversine_[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)];
    }

private:
    std::size_t n_;
    std::vector<double> haversine_;
};

inline LegEstimate dynamic_drone_leg(const Instance& inst, const NodeGeometry& geo, NodeId i, NodeId j) {
    const double d = geo.haversine(i, j);
    if (i == j || d <= 0.0) return {};
    const double t = d / inst.fleet.drone_speed;
    const CostParams& c = inst.costs;
    return {t, d, c.drone_factor * (t * c.wage_rate + d * c.vehicle_cost)};
}

}  // namespace detail

/// Truck legs from a travel model (optionally behind the residential gate),
/// priced with the time-dependent cost.
class PredictedArcs {
public:
    PredictedArcs(const Instance& inst, const TravelModel& model, bool ra_gate = false)
        : inst_(&inst), model_(&model), ra_gate_(ra_gate), geo_(inst), cursor_(inst.calendar) {}

    LegEstimate truck_leg(NodeId i, NodeId j, Seconds depart_at) {
        const double h = geo_.haversine(i, j);
        if (i == j || h <= 0.0) return {};
        TravelEstimate e;
        if (ra_gate_ && inst_->residential(i) && inst_->residential(j)) {
            // The gate needs neither the query nor the calendar.
            e = predict_ra_aware_with_haversine(*model_, TravelQuery{}, h, true, true, &counters_);
        } else {
            TravelQuery q;
            q.origin = inst_->location(i);
            q.destination = inst_->location(j);
            q.depart_at = depart_at;
            q.calendar = cursor_.features(depart_at);
            ++counters_.predictor_calls;
            e = predict_with_haversine(*model_, q, h);
        }
        return {e.duration_s, e.distance_m, dynamic_cost(e, inst_->costs)};
    }

    LegEstimate drone_leg(NodeId i, NodeId j) const { return detail::dynamic_drone_leg(*inst_, geo_, i, j); }

    const PredictionCounters& counters() const { return counters_; }
    void reset_counters() { counters_ = {}; }

private:
    const Instance* inst_;
    const TravelModel* model_;
    bool ra_gate_;
    detail::NodeGeometry geo_;
    FeatureCursor cursor_;
    PredictionCounters counters_;
};

/// Time-independent baseline: straight-line distance, fallback truck speed and
/// the fuel-based cost for both trucks and drones (drones scaled by alpha).
class StaticArcs {
public:
    explicit StaticArcs(const Instance& inst) : inst_(&inst), geo_(inst) {
        const CostParams& c = inst.costs;
        per_meter_ = c.miles_converter * c.fuel_price * c.fuel_consumption;
    }

    LegEstimate truck_leg(NodeId i, NodeId j, Seconds /*depart_at*/) const {
        const double d = geo_.haversine(i, j);
        if (i == j || d <= 0.0) return {};
        return {d / inst_->fleet.truck_fallback_speed, d, d * per_meter_};
    }

    LegEstimate drone_leg(NodeId i, NodeId j) const {
        const double d = geo_.haversine(i, j);
        if (i == j || d <= 0.0) return {};
        return {d / inst_->fleet.drone_speed, d, inst_->costs.drone_factor * d * per_meter_};
    }

    PredictionCounters counters() const { return {}; }

private:
    const Instance* inst_;
    detail::NodeGeometry geo_;
    double per_meter_ = 0.0;
};

/// Ground truth: oracle travel times and road distances, time-dependent cost.
class OracleArcs {
public:
    OracleArcs(const Instance& inst, const TrafficOracle& oracle)
        : inst_(&inst), oracle_(&oracle), geo_(inst), cursor_(inst.calendar) {
        residential_.reserve(static_cast<std::size_t>(inst.size()) + 1);
        for (NodeId v = 0; v <= inst.size(); ++v) {
            residential_.push_back(oracle.residential_map().is_residential(inst.location(v)) ? 1 : 0);
        }
    }

    LegEstimate truck_leg(NodeId i, NodeId j, Seconds depart_at) {
        const double h = geo_.haversine(i, j);
        if (i == j || h <= 0.0) return {};
        TravelQuery q;
        q.origin = inst_->location(i);
        q.destination = inst_->location(j);
        q.depart_at = depart_at;
        q.calendar = cursor_.features(depart_at);
        const TravelEstimate e = oracle_->travel_with_haversine(q, h, residential_[static_cast<std::size_t>(i)] != 0,
                                                                residential_[static_cast<std::size_t>(j)] != 0);
        return {e.duration_s, e.distance_m, dynamic_cost(e, inst_->costs)};
    }

    LegEstimate drone_leg(NodeId i, NodeId j) const { return detail::dynamic_drone_leg(*inst_, geo_, i, j); }

    PredictionCounters counters() const { return {}; }

private:
    const Instance* inst_;
    const TrafficOracle* oracle_;
    detail::NodeGeometry geo_;
    FeatureCursor cursor_;
    std::vector<char> residential_;
};

// ---------------------------------------------------------------------------
// Schedule

/// Legs are scheduled in whole seconds.
inline Seconds to_seconds(double duration) { return static_cast<Seconds>(std::llround(duration)); }

struct TruckStop {
    NodeId node = kDepot;
    Seconds arrival = 0;
    Seconds service_start = 0;
    Seconds departure = 0;
};

struct SortieTiming {
    Sortie sortie;
    Seconds launch = 0;
    Seconds customer_arrival = 0;   // a'_j
    Seconds customer_departure = 0;
    Seconds rendezvous_arrival = 0;  // drone reaches the meeting node
    Seconds flight = 0;              // t'_ij + t'_jk
};

struct LegRecord {
    NodeId from = kDepot;
    NodeId to = kDepot;
    Seconds depart_at = 0;
    bool drone = false;
    LegEstimate estimate;
};

struct RouteSchedule {
    int truck_id = 0;
    std::vector<TruckStop> stops;  // start depot, visits, terminal depot
    std::vector<SortieTiming> sorties;
    std::vector<LegRecord> legs;
    Seconds truck_completion = 0;  // a_{n+1}
    Seconds drone_completion = 0;  // drone back at the terminal depot, 0 if it rides the truck
    Seconds waiting = 0;
};

struct Schedule {
    std::vector<RouteSchedule> routes;
};

struct EvalReport {
    double z = 0.0;
    double endurance_penalty = 0.0;
    double truck_load_penalty = 0.0;
    double drone_load_penalty = 0.0;
    double duration_penalty = 0.0;
    double lateness_penalty = 0.0;
    double p_z = 0.0;
    bool feasible = true;

    // Raw excesses behind the penalty terms (seconds or parcels).
    Seconds endurance_excess = 0;
    long long truck_load_excess = 0;
    long long drone_load_excess = 0;
    Seconds duration_excess = 0;
    Seconds lateness = 0;
};

namespace detail {

template <bool kRecord, ArcSource Arcs>
EvalReport run_schedule(const DecodedPlan& plan, const Instance& inst, Arcs& arcs, Schedule* out) {
    EvalReport r;
    const Fleet& fleet = inst.fleet;
    double z = 0.0;
    if constexpr (kRecord) out->routes.clear();

    for (const Route& route : plan.routes) {
        RouteSchedule rs;
        rs.truck_id = route.truck_id;
        const std::size_t m = route.visits.size();
        auto node_at = [&](std::size_t p) { return (p == 0 || p == m + 1) ? kDepot : route.visits[p - 1]; };
        auto position_of = [&](NodeId v, bool terminal) -> std::size_t {
            if (v == kDepot) return terminal ? m + 1 : 0;
            for (std::size_t k = 0; k < m; ++k) {
                if (route.visits[k] == v) return k + 1;
            }
            return m + 1;
        };

        // Sortie launch/rendezvous truck positions; encode() guarantees they do not overlap.
        struct Pending {
            std::size_t launch, rendezvous;
            const Sortie* sortie;
        };
        std::vector<Pending> pending;
        pending.reserve(route.sorties.size());
        for (const Sortie& s : route.sorties) pending.push_back({position_of(s.launch, false), position_of(s.rendezvous, true), &s});

        long long load = 0;
        for (NodeId v : route.visits) load += inst.demand(v);

        Seconds clock = 0;  // truck arrival at the current position
        Seconds drone_back = -1;
        std::size_t drone_rendezvous = m + 2;
        std::size_t next_launch = 0;
        Seconds lateness = 0;

        for (std::size_t p = 0; p <= m + 1; ++p) {
            const NodeId v = node_at(p);
            const Seconds arrival = clock;
            Seconds start = arrival;
            Seconds ready = arrival;
            if (v != kDepot) {
                const Customer& c = inst.customer(v);
                if (c.window) {
                    start = std::max(arrival, c.window->open);
                    lateness += std::max<Seconds>(0, arrival - c.window->close);
                }
                ready = start + c.service_seconds;
            }
            if (drone_rendezvous == p) {
                ready = std::max(ready, drone_back) + fleet.retrieval_overhead;
                if (p == m + 1) rs.drone_completion = drone_back;
                drone_rendezvous = m + 2;
            }
            if constexpr (kRecord) rs.waiting += start - arrival;

            if (p == m + 1) {
                rs.truck_completion = arrival;
                if constexpr (kRecord) rs.stops.push_back({v, arrival, start, ready});
                break;
            }

            Seconds depart = ready;
            while (next_launch < pending.size() && pending[next_launch].launch < p) ++next_launch;
            for (std::size_t k = next_launch; k < pending.size() && pending[k].launch == p; ++k) {
                const Sortie& s = *pending[k].sortie;
                depart = ready + fleet.launch_overhead;
                const LegEstimate out_leg = arcs.drone_leg(v, s.customer);
                const LegEstimate back_leg = arcs.drone_leg(s.customer, s.rendezvous);
                const Seconds t1 = to_seconds(out_leg.duration_s);
                const Seconds t2 = to_seconds(back_leg.duration_s);
                const Customer& c = inst.customer(s.customer);
                const Seconds reach = depart + t1;
                Seconds serve = reach;
                if (c.window) {
                    serve = std::max(reach, c.window->open);
                    lateness += std::max<Seconds>(0, reach - c.window->close);
                }
                const Seconds leave = serve + c.service_seconds;
                drone_back = leave + t2;
                drone_rendezvous = pending[k].rendezvous;
                z += out_leg.cost;
                z += back_leg.cost;
                load += c.demand;
                r.endurance_excess += std::max<Seconds>(0, t1 + t2 - fleet.endurance);
                r.drone_load_excess += std::max(0, c.demand - fleet.drone_capacity);
                if constexpr (kRecord) {
                    rs.sorties.push_back({s, depart, reach, leave, drone_back, t1 + t2});
                    rs.legs.push_back({v, s.customer, depart, true, out_leg});
                    rs.legs.push_back({s.customer, s.rendezvous, leave, true, back_leg});
                    rs.waiting += serve - reach;
                }
            }
            if constexpr (kRecord) rs.stops.push_back({v, arrival, start, depart});

            const NodeId next = node_at(p + 1);
            const LegEstimate leg = arcs.truck_leg(v, next, depart);
            z += leg.cost;
            if constexpr (kRecord) rs.legs.push_back({v, next, depart, false, leg});
            clock = depart + to_seconds(leg.duration_s);
        }

        const Seconds completion = std::max(rs.truck_completion, rs.drone_completion);
        r.duration_excess += std::max<Seconds>(0, completion - fleet.horizon);
        r.truck_load_excess += std::max<long long>(0, load - fleet.truck_capacity);
        r.lateness += lateness;
        if constexpr (kRecord) out->routes.push_back(std::move(rs));
    }

    const double p = inst.costs.penalty;
    r.z = z;
    r.endurance_penalty = p * static_cast<double>(r.endurance_excess);
    r.truck_load_penalty = p * static_cast<double>(r.truck_load_excess);
    r.drone_load_penalty = p * static_cast<double>(r.drone_load_excess);
    r.duration_penalty = p * static_cast<double>(r.duration_excess);
    r.lateness_penalty = p * static_cast<double>(r.lateness);
    r.p_z = r.z + r.endurance_penalty + r.truck_load_penalty + r.drone_load_penalty + r.duration_penalty +
            r.lateness_penalty;
    r.feasible = r.endurance_excess == 0 && r.truck_load_excess == 0 && r.drone_load_excess == 0 &&
                 r.duration_excess == 0 && r.lateness == 0;
    return r;
}

}  // namespace detail

/// Forward simulation of every route from time 0 at the depot. Truck legs are
/// priced at the truck's actual departure; early arrivals wait for the window
/// to open; at a rendezvous the truck leaves once both it and the drone are there.
template <ArcSource Arcs>
Schedule propagate_schedule(const DecodedPlan& plan, const Instance& inst, Arcs& arcs) {
    Schedule s;
    detail::run_schedule<true>(plan, inst, arcs, &s);
    return s;
}

template <ArcSource Arcs>
EvalReport evaluate(const DecodedPlan& plan, const Instance& inst, Arcs& arcs, Schedule* schedule = nullptr) {
    if (schedule) return detail::run_schedule<true>(plan, inst, arcs, schedule);
    return detail::run_schedule<false>(plan, inst, arcs, nullptr);
}

template <ArcSource Arcs>
EvalReport evaluate(const Encoding& enc, const Instance& inst, Arcs& arcs) {
    return evaluate(decode(enc, inst), inst, arcs);
}

/// |C_method - C_actual| / C_actual where C_actual re-runs the schedule on
/// oracle travel times, so each arc is priced at its true departure time.
template <ArcSource Method, ArcSource Actual>
double discrepancy(const DecodedPlan& plan, const Instance& inst, Method& method, Actual& actual) {
    const double c_method = evaluate(plan, inst, method).z;
    const double c_actual = evaluate(plan, inst, actual).z;
    if (!(c_actual > 0.0)) throw InvariantError("discrepancy: actual cost is zero");
    return std::abs(c_method - c_actual) / c_actual;
}

template <ArcSource Method>
double discrepancy(const DecodedPlan& plan, const Instance& inst, Method& method, const TrafficOracle& oracle) {
    OracleArcs actual(inst, oracle);
    return discrepancy(plan, inst, method, actual);
}

}  // namespace vrpdt
