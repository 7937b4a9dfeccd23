#pragma once

// Initial solution: cost-aware nearest neighbor, intra-route 2-OPT, then a
// greedy pass turning truck visits into drone sorties.

#include <algorithm>
#include <vector>

#include "cost.hpp"
#include "encoding.hpp"
#include "instance.hpp"

namespace vrpdt {

struct NearestNeighborResult {
    Encoding encoding;
    std::vector<NodeId> overflow;  // customers no truck could take; appended to the last route

    bool feasible() const { return overflow.empty(); }
};

/// Each truck repeatedly extends to the unvisited customer with the cheapest
/// truck arc at its current departure time, as long as the load fits Qt and
/// the truck can still be back at the depot by T_max. Ties go to the lower id.
template <ArcSource Arcs>
NearestNeighborResult nearest_neighbor_init(const Instance& inst, Arcs& arcs) {
    const int n = inst.size();
    const Fleet& fleet = inst.fleet;
    if (fleet.trucks < 1) throw InvariantError("nearest neighbor: trucks must be >= 1");
    std::vector<char> visited(static_cast<std::size_t>(n) + 1, 0);
    std::vector<std::vector<NodeId>> routes;
    int remaining = n;

    for (int truck = 0; truck < fleet.trucks && remaining > 0; ++truck) {
        std::vector<NodeId> route;
        NodeId at = kDepot;
        Seconds clock = 0;
        int load = 0;
        while (remaining > 0) {
            NodeId best = -1;
            double best_cost = 0.0;
            Seconds best_ready = 0;
            for (NodeId j = 1; j <= n; ++j) {
                if (visited[static_cast<std::size_t>(j)]) continue;
                const Customer& c = inst.customer(j);
                if (load + c.demand > fleet.truck_capacity) continue;
                const LegEstimate leg = arcs.truck_leg(at, j, clock);
                const Seconds arrival = clock + to_seconds(leg.duration_s);
                const Seconds ready = (c.window ? std::max(arrival, c.window->open) : arrival) + c.service_seconds;
                const Seconds back = ready + to_seconds(arcs.truck_leg(j, kDepot, ready).duration_s);
                if (back > fleet.horizon) continue;
                if (best < 0 || leg.cost < best_cost) {
                    best = j;
                    best_cost = leg.cost;
                    best_ready = ready;
                }
            }
            if (best < 0) break;
            visited[static_cast<std::size_t>(best)] = 1;
            --remaining;
            route.push_back(best);
            load += inst.demand(best);
            at = best;
            clock = best_ready;
        }
        if (!route.empty()) routes.push_back(std::move(route));
    }

    NearestNeighborResult result;
    for (NodeId j = 1; j <= n; ++j) {
        if (!visited[static_cast<std::size_t>(j)]) result.overflow.push_back(j);
    }
    if (!result.overflow.empty()) {
        if (routes.empty()) routes.emplace_back();
        routes.back().insert(routes.back().end(), result.overflow.begin(), result.overflow.end());
    }

    Encoding& enc = result.encoding;
    enc.upper.push_back(kDepot);
    for (const auto& r : routes) {
        enc.upper.insert(enc.upper.end(), r.begin(), r.end());
        enc.upper.push_back(kDepot);
    }
    enc.lower.assign(enc.upper.size(), 0);
    return result;
}

template <ArcSource Arcs>
double penalized_cost(const Encoding& enc, const Instance& inst, Arcs& arcs) {
    return evaluate(decode(enc, inst), inst, arcs).p_z;
}

/// Reverses intra-route segments (first improvement) while p_z strictly decreases.
template <ArcSource Arcs>
Encoding two_opt(const Encoding& enc, const Instance& inst, Arcs& arcs) {
    Encoding cur = enc;
    double best = penalized_cost(cur, inst, arcs);
    bool improved = true;
    while (improved) {
        improved = false;
        std::size_t route_start = 1;
        while (route_start < cur.upper.size() && !improved) {
            std::size_t route_end = route_start;
            while (route_end < cur.upper.size() && cur.upper[route_end] != kDepot) ++route_end;
            for (std::size_t a = route_start; a + 1 < route_end && !improved; ++a) {
                for (std::size_t b = a + 1; b < route_end && !improved; ++b) {
                    Encoding cand = cur;
                    std::reverse(cand.upper.begin() + static_cast<std::ptrdiff_t>(a),
                                 cand.upper.begin() + static_cast<std::ptrdiff_t>(b) + 1);
                    std::reverse(cand.lower.begin() + static_cast<std::ptrdiff_t>(a),
                                 cand.lower.begin() + static_cast<std::ptrdiff_t>(b) + 1);
                    if (!is_valid(cand, inst)) continue;
                    const double pz = penalized_cost(cand, inst, arcs);
                    if (pz < best) {
                        cur = std::move(cand);
                        best = pz;
                        improved = true;
                    }
                }
            }
            route_start = route_end + 1;
        }
    }
    return cur;
}

/// One pass in route order: a truck-served, drone-eligible customer between
/// two truck-served nodes becomes a sortie from its predecessor to its
/// successor when the flight fits E and p_z strictly drops.
template <ArcSource Arcs>
Encoding findsortie(const Encoding& enc, const Instance& inst, Arcs& arcs) {
    Encoding cur = enc;
    double best = penalized_cost(cur, inst, arcs);
    for (std::size_t i = 1; i + 1 < cur.upper.size(); ++i) {
        const NodeId v = cur.upper[i];
        if (v == kDepot || cur.lower[i] != 0 || cur.lower[i - 1] != 0 || cur.lower[i + 1] != 0) continue;
        if (!inst.drone_eligible(v)) continue;
        const NodeId from = cur.upper[i - 1];
        const NodeId to = cur.upper[i + 1];
        const Seconds flight =
            to_seconds(arcs.drone_leg(from, v).duration_s) + to_seconds(arcs.drone_leg(v, to).duration_s);
        if (flight > inst.fleet.endurance) continue;
        Encoding cand = cur;
        cand.lower[i] = 1;
        const double pz = penalized_cost(cand, inst, arcs);
        if (pz < best) {
            cur = std::move(cand);
            best = pz;
        }
    }
    return cur;
}

struct ConstructionResult {
    Encoding nearest_neighbor;
    Encoding after_two_opt;
    Encoding encoding;  // final
    std::vector<NodeId> overflow;
};

template <ArcSource Arcs>
ConstructionResult construct(const Instance& inst, Arcs& arcs) {
    ConstructionResult r;
    NearestNeighborResult nn = nearest_neighbor_init(inst, arcs);
    r.nearest_neighbor = nn.encoding;
    r.overflow = std::move(nn.overflow);
    r.after_two_opt = two_opt(r.nearest_neighbor, inst, arcs);
    r.encoding = findsortie(r.after_two_opt, inst, arcs);
    return r;
}

}  // namespace vrpdt
