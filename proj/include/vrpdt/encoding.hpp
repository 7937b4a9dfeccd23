#pragma once

// Upper/lower vector solution representation.
//
// `upper` lists node ids route by route; a 0 opens and closes each route and
// consecutive routes share the 0 between them. `lower` carries one flag per
// position. Within a route a flag 1 preceded by a 0 marks a drone customer
// launched from the preceding node; further 1s in the same block are truck
// visits made while the drone is airborne; the first following 0 is where the
// drone rejoins the truck (the depot when the route ends first).

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "instance.hpp"

namespace vrpdt {

struct Encoding {
    std::vector<NodeId> upper;
    std::vector<std::uint8_t> lower;

    friend bool operator==(const Encoding&, const Encoding&) = default;
};

struct Sortie {
    NodeId launch = kDepot;      // 0 means the route's start depot
    NodeId customer = 0;
    NodeId rendezvous = kDepot;  // 0 means the route's terminal depot
    int drone_id = 0;

    friend bool operator==(const Sortie&, const Sortie&) = default;
};

struct Route {
    int truck_id = 0;
    std::vector<NodeId> visits;  // truck-served customers, depots excluded
    std::vector<Sortie> sorties;  // ordered by launch position

    friend bool operator==(const Route&, const Route&) = default;
};

struct DecodedPlan {
    std::vector<Route> routes;

    friend bool operator==(const DecodedPlan&, const DecodedPlan&) = default;
};

/// Shape rules that need no instance: matching lengths, depot delimiters with
/// flag 0, binary flags, no empty route, no repeated customer.
inline std::optional<EncodingError> find_structure_violation(const Encoding& enc) {
    const auto& up = enc.upper;
    const auto& lo = enc.lower;
    if (up.size() != lo.size()) return EncodingError(std::min(up.size(), lo.size()), "upper/lower length mismatch");
    if (up.empty() || up.front() != kDepot) return EncodingError(0, "encoding must start with depot 0");
    if (up.back() != kDepot) return EncodingError(up.size() - 1, "encoding must end with depot 0");
    NodeId max_id = 0;
    for (NodeId v : up) max_id = std::max(max_id, v);
    std::vector<char> seen(static_cast<std::size_t>(max_id) + 1, 0);
    for (std::size_t i = 0; i < up.size(); ++i) {
        if (lo[i] > 1) return EncodingError(i, "lower flag must be 0 or 1");
        if (up[i] == kDepot) {
            if (lo[i] != 0) return EncodingError(i, "depot position must carry flag 0");
            if (i > 0 && up[i - 1] == kDepot) return EncodingError(i, "empty route");
            continue;
        }
        if (up[i] < 0) return EncodingError(i, "negative node id");
        if (seen[static_cast<std::size_t>(up[i])]) {
            return EncodingError(i, "customer " + std::to_string(up[i]) + " repeated");
        }
        seen[static_cast<std::size_t>(up[i])] = 1;
    }
    return std::nullopt;
}

/// Returns a description of the first violated encoding rule, or nullopt when valid.
inline std::optional<EncodingError> find_encoding_violation(const Encoding& enc, const Instance& inst) {
    if (auto err = find_structure_violation(enc)) return err;
    const auto& up = enc.upper;
    const auto& lo = enc.lower;
    const int n = inst.size();
    std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
    int routes = 0;
    std::uint8_t prev_flag = 0;
    for (std::size_t i = 0; i < up.size(); ++i) {
        const NodeId v = up[i];
        if (v == kDepot) {
            if (i > 0) ++routes;
            prev_flag = 0;
            continue;
        }
        if (v > n) return EncodingError(i, "unknown customer id " + std::to_string(v));
        seen[static_cast<std::size_t>(v)] = 1;
        if (lo[i] == 1 && prev_flag == 0 && !inst.drone_eligible(v)) {
            return EncodingError(i, "customer " + std::to_string(v) + " is not drone-eligible");
        }
        prev_flag = lo[i];
    }
    for (NodeId v = 1; v <= n; ++v) {
        if (!seen[static_cast<std::size_t>(v)]) return EncodingError(up.size(), "customer " + std::to_string(v) + " missing");
    }
    if (routes > inst.fleet.trucks) {
        return EncodingError(up.size() - 1, std::to_string(routes) + " routes exceed " +
                                                std::to_string(inst.fleet.trucks) + " trucks");
    }
    return std::nullopt;
}

inline bool is_valid(const Encoding& enc, const Instance& inst) { return !find_encoding_violation(enc, inst); }

/// Applies the flag rules to a structurally sound encoding. Drone ids are
/// handed out round-robin over each truck's `drones_per_truck` drones.
inline DecodedPlan decode_structure(const Encoding& enc, int drones_per_truck = 1) {
    if (auto err = find_structure_violation(enc)) throw *err;
    DecodedPlan plan;
    const int drones = std::max(1, drones_per_truck);
    std::size_t i = 1;
    while (i < enc.upper.size()) {
        Route route;
        route.truck_id = static_cast<int>(plan.routes.size());
        NodeId prev_node = kDepot;
        std::uint8_t prev_flag = 0;
        std::optional<Sortie> open;
        auto close = [&](NodeId rendezvous) {
            open->rendezvous = rendezvous;
            open->drone_id = route.truck_id * drones + static_cast<int>(route.sorties.size()) % drones;
            route.sorties.push_back(*open);
            open.reset();
        };
        for (; enc.upper[i] != kDepot; ++i) {
            const NodeId v = enc.upper[i];
            const std::uint8_t flag = enc.lower[i];
            if (flag == 1 && prev_flag == 0) {
                open = Sortie{prev_node, v, kDepot, 0};
            } else {
                route.visits.push_back(v);
                if (flag == 0 && open) close(v);
                prev_node = v;
            }
            prev_flag = flag;
        }
        if (open) close(kDepot);
        plan.routes.push_back(std::move(route));
        ++i;
    }
    return plan;
}

inline DecodedPlan decode(const Encoding& enc, const Instance& inst) {
    if (auto err = find_encoding_violation(enc, inst)) throw *err;
    return decode_structure(enc, inst.fleet.drones_per_truck);
}

inline Encoding encode(const DecodedPlan& plan) {
    Encoding enc;
    enc.upper.push_back(kDepot);
    enc.lower.push_back(0);
    for (const Route& route : plan.routes) {
        const std::size_t m = route.visits.size();
        // Truck positions: 0 = start depot, k = visits[k-1], m+1 = terminal depot.
        auto position_of = [&](NodeId node, bool terminal) -> std::size_t {
            if (node == kDepot) return terminal ? m + 1 : 0;
            auto it = std::find(route.visits.begin(), route.visits.end(), node);
            if (it == route.visits.end()) {
                throw EncodingError(0, "truck " + std::to_string(route.truck_id) + ": sortie node " +
                                           std::to_string(node) + " absent from route");
            }
            return static_cast<std::size_t>(it - route.visits.begin()) + 1;
        };

        struct Span {
            std::size_t launch, rendezvous;
            NodeId customer;
        };
        std::vector<Span> spans;
        for (const Sortie& s : route.sorties) {
            if (std::find(route.visits.begin(), route.visits.end(), s.customer) != route.visits.end()) {
                throw EncodingError(0, "customer " + std::to_string(s.customer) + " is both truck and drone served");
            }
            const std::size_t a = position_of(s.launch, false);
            const std::size_t b = position_of(s.rendezvous, true);
            if (a >= b) {
                throw EncodingError(0, "sortie for customer " + std::to_string(s.customer) +
                                           " rendezvous does not follow launch");
            }
            spans.push_back({a, b, s.customer});
        }
        std::sort(spans.begin(), spans.end(), [](const Span& x, const Span& y) { return x.launch < y.launch; });
        for (std::size_t k = 1; k < spans.size(); ++k) {
            if (spans[k].launch < spans[k - 1].rendezvous) {
                throw EncodingError(0, "truck " + std::to_string(route.truck_id) + " has overlapping sorties");
            }
        }

        std::size_t next_span = 0;
        for (std::size_t p = 0; p <= m; ++p) {
            if (p > 0) {
                bool airborne = false;
                for (const Span& s : spans) airborne = airborne || (s.launch < p && p < s.rendezvous);
                enc.upper.push_back(route.visits[p - 1]);
                enc.lower.push_back(airborne ? 1 : 0);
            }
            if (next_span < spans.size() && spans[next_span].launch == p) {
                enc.upper.push_back(spans[next_span].customer);
                enc.lower.push_back(1);
                ++next_span;
            }
        }
        enc.upper.push_back(kDepot);
        enc.lower.push_back(0);
    }
    return enc;
}

/// Restores a valid encoding without reordering customers: normalizes 0
/// delimiters (no empty routes, at most one route per truck) and clears
/// drone flags that the instance cannot honor.
inline Encoding repair(const Encoding& enc, const Instance& inst) {
    const int n = inst.size();
    std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
    for (std::size_t i = 0; i < enc.upper.size(); ++i) {
        const NodeId v = enc.upper[i];
        if (v == kDepot) continue;
        if (v < 1 || v > n) throw EncodingError(i, "unrepairable: unknown customer id " + std::to_string(v));
        if (seen[static_cast<std::size_t>(v)]) {
            throw EncodingError(i, "unrepairable: customer " + std::to_string(v) + " duplicated");
        }
        seen[static_cast<std::size_t>(v)] = 1;
    }
    for (NodeId v = 1; v <= n; ++v) {
        if (!seen[static_cast<std::size_t>(v)]) {
            throw EncodingError(enc.upper.size(), "unrepairable: customer " + std::to_string(v) + " missing");
        }
    }

    Encoding out;
    out.upper.reserve(enc.upper.size() + 2);
    out.lower.reserve(enc.upper.size() + 2);
    out.upper.push_back(kDepot);
    out.lower.push_back(0);
    int delimiters_left = inst.fleet.trucks - 1;  // interior 0s still allowed
    for (std::size_t i = 0; i < enc.upper.size(); ++i) {
        const NodeId v = enc.upper[i];
        if (v == kDepot) {
            if (out.upper.back() == kDepot || delimiters_left == 0) continue;
            --delimiters_left;
            out.upper.push_back(kDepot);
            out.lower.push_back(0);
            continue;
        }
        out.upper.push_back(v);
        out.lower.push_back(i < enc.lower.size() && enc.lower[i] != 0 ? 1 : 0);
    }
    if (out.upper.back() != kDepot || out.upper.size() == 1) {
        out.upper.push_back(kDepot);
        out.lower.push_back(0);
    }
    // A trailing delimiter may have been kept right before the terminal one.
    while (out.upper.size() >= 3 && out.upper[out.upper.size() - 2] == kDepot) {
        out.upper.pop_back();
        out.lower.pop_back();
    }
    if (n == 0) {
        out.upper.assign(1, kDepot);
        out.lower.assign(1, 0);
        return out;
    }

    std::uint8_t prev_flag = 0;
    for (std::size_t i = 0; i < out.upper.size(); ++i) {
        if (out.upper[i] == kDepot) {
            prev_flag = 0;
            continue;
        }
        if (out.lower[i] == 1 && prev_flag == 0 && !inst.drone_eligible(out.upper[i])) out.lower[i] = 0;
        prev_flag = out.lower[i];
    }
    return out;
}

inline int route_count(const Encoding& enc) {
    return enc.upper.empty() ? 0 : static_cast<int>(std::count(enc.upper.begin(), enc.upper.end(), kDepot)) - 1;
}

}  // namespace vrpdt
