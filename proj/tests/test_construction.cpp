#include <gtest/gtest.h>

#include <algorithm>

#include "support.hpp"

using namespace vrpdt;
using testing_support::integer_table;
using testing_support::random_encoding;
using testing_support::scattered_instance;
using testing_support::TableArcs;

namespace {

/// Greedy by cost matrix, written without the scheduling machinery:
/// legs are time-independent and the horizon never binds.
std::vector<std::vector<NodeId>> greedy_oracle(const Instance& inst, TableArcs& arcs) {
    std::vector<std::vector<NodeId>> routes;
    std::vector<bool> used(static_cast<std::size_t>(inst.size()) + 1, false);
    int left = inst.size();
    for (int t = 0; t < inst.fleet.trucks && left > 0; ++t) {
        std::vector<NodeId> r;
        NodeId at = kDepot;
        int load = 0;
        for (;;) {
            NodeId pick = -1;
            for (NodeId j = 1; j <= inst.size(); ++j) {
                if (used[static_cast<std::size_t>(j)] || load + inst.demand(j) > inst.fleet.truck_capacity) continue;
                if (pick < 0 || arcs.truck_leg(at, j, 0).cost < arcs.truck_leg(at, pick, 0).cost) pick = j;
            }
            if (pick < 0) break;
            used[static_cast<std::size_t>(pick)] = true;
            --left;
            load += inst.demand(pick);
            r.push_back(pick);
            at = pick;
        }
        if (!r.empty()) routes.push_back(r);
    }
    return routes;
}

Encoding truck_only(const std::vector<std::vector<NodeId>>& routes) {
    Encoding e{{kDepot}, {}};
    for (const auto& r : routes) {
        e.upper.insert(e.upper.end(), r.begin(), r.end());
        e.upper.push_back(kDepot);
    }
    e.lower.assign(e.upper.size(), 0);
    return e;
}

GeoPoint offset(const GeoPoint& p, double north_m, double east_m) {
    const double deg = 180.0 / std::numbers::pi / 6'371'000.0;
    return {p.lat + north_m * deg, p.lon + east_m * deg / std::cos(p.lat * std::numbers::pi / 180.0)};
}

bool segments_cross(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c, const GeoPoint& d) {
    auto orient = [](const GeoPoint& p, const GeoPoint& q, const GeoPoint& r) {
        return (q.lon - p.lon) * (r.lat - p.lat) - (q.lat - p.lat) * (r.lon - p.lon);
    };
    return orient(a, b, c) * orient(a, b, d) < 0 && orient(c, d, a) * orient(c, d, b) < 0;
}

/// Customers 1 and 3 on the way north carry truck-only parcels; customer 2
/// sits off to the east.
Instance detour_instance() {
    Instance inst = scattered_instance(3, 1);
    inst.customers[0].demand = 3;
    inst.customers[2].demand = 3;
    inst.customers[0].location = offset(inst.depot, 1000, 0);
    inst.customers[1].location = offset(inst.depot, 1500, 4000);
    inst.customers[2].location = offset(inst.depot, 2000, 0);
    return inst;
}

}  // namespace

TEST(NearestNeighbor, SingleCustomer) {
    const Instance inst = scattered_instance(1, 1);
    StaticArcs arcs(inst);
    const NearestNeighborResult r = nearest_neighbor_init(inst, arcs);
    EXPECT_EQ(r.encoding, (Encoding{{0, 1, 0}, {0, 0, 0}}));
    EXPECT_TRUE(r.feasible());
}

TEST(NearestNeighbor, MatchesIndependentGreedy) {
    for (int k = 0; k < 60; ++k) {
        Instance inst = scattered_instance(5 + k % 8, static_cast<std::uint64_t>(k), 1 + k % 3);
        inst.fleet.truck_capacity = 2 + k % 4;
        inst.fleet.drone_capacity = 1;
        inst.fleet.horizon = 1'000'000;
        TableArcs arcs = integer_table(inst);
        const auto routes = greedy_oracle(inst, arcs);
        const NearestNeighborResult r = nearest_neighbor_init(inst, arcs);
        int covered = 0;
        for (const auto& route : routes) covered += static_cast<int>(route.size());
        if (covered == inst.size()) {
            EXPECT_EQ(r.encoding, truck_only(routes)) << "instance " << k;
            EXPECT_TRUE(r.feasible());
        } else {
            EXPECT_FALSE(r.feasible());
            EXPECT_EQ(static_cast<int>(r.overflow.size()), inst.size() - covered);
        }
    }
}

TEST(NearestNeighbor, TiesGoToLowerId) {
    Instance inst = scattered_instance(3, 2);
    TableArcs arcs(inst);
    for (NodeId i = 0; i <= 3; ++i) {
        for (NodeId j = 0; j <= 3; ++j) {
            if (i != j) arcs.set_truck(i, j, 100, 100);
        }
    }
    arcs.set_truck(0, 1, 200, 100);
    EXPECT_EQ(nearest_neighbor_init(inst, arcs).encoding.upper, (std::vector<NodeId>{0, 2, 1, 3, 0}));
}

TEST(NearestNeighbor, CapacityOpensNextTruck) {
    Instance inst = scattered_instance(4, 3, 2);
    inst.fleet.truck_capacity = 2;
    StaticArcs arcs(inst);
    const NearestNeighborResult r = nearest_neighbor_init(inst, arcs);
    EXPECT_EQ(route_count(r.encoding), 2);
    EXPECT_TRUE(r.feasible());
    EXPECT_TRUE(is_valid(r.encoding, inst));
}

TEST(NearestNeighbor, OverflowGoesToLastRoute) {
    Instance inst = scattered_instance(5, 4, 2);
    inst.fleet.truck_capacity = 2;
    StaticArcs arcs(inst);
    const NearestNeighborResult r = nearest_neighbor_init(inst, arcs);
    EXPECT_FALSE(r.feasible());
    ASSERT_EQ(r.overflow.size(), 1u);
    EXPECT_EQ(r.encoding.upper[r.encoding.upper.size() - 2], r.overflow[0]);
    EXPECT_TRUE(is_valid(r.encoding, inst));
    EXPECT_GT(evaluate(r.encoding, inst, arcs).truck_load_excess, 0);
}

TEST(NearestNeighbor, ProjectedReturnRespectsHorizon) {
    Instance inst = scattered_instance(2, 5);
    TableArcs arcs(inst);
    arcs.set_truck_sym(0, 1, 100, 10);
    arcs.set_truck_sym(0, 2, 4000, 10000);
    arcs.set_truck_sym(1, 2, 4000, 10000);
    inst.fleet.horizon = 5000;
    const NearestNeighborResult r = nearest_neighbor_init(inst, arcs);
    EXPECT_EQ(r.overflow, std::vector<NodeId>{2});
}

TEST(TwoOpt, UncrossesToTheEnumeratedOptimum) {
    // Depot and four customers on a circle, visited in a crossing order.
    Instance inst = scattered_instance(4, 6);
    const GeoPoint center = offset(inst.depot, 0, -1500);
    inst.depot = offset(center, 0, 1500);
    for (int k = 1; k <= 4; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 5.0;
        inst.customers[static_cast<std::size_t>(k - 1)].location =
            offset(center, 1500 * std::sin(a), 1500 * std::cos(a));
    }
    TableArcs arcs = integer_table(inst);
    const Encoding crossing{{0, 1, 3, 2, 4, 0}, {0, 0, 0, 0, 0, 0}};
    const Encoding out = two_opt(crossing, inst, arcs);

    std::vector<NodeId> perm{1, 2, 3, 4};
    double best = std::numeric_limits<double>::infinity();
    do {
        best = std::min(best, penalized_cost(truck_only({perm}), inst, arcs));
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(penalized_cost(out, inst, arcs), best, 1e-9);
    EXPECT_LT(best, penalized_cost(crossing, inst, arcs));

    for (std::size_t a = 0; a + 1 < out.upper.size(); ++a) {
        for (std::size_t b = a + 2; b + 1 < out.upper.size(); ++b) {
            if (a == 0 && b + 2 == out.upper.size()) continue;  // adjacent through the depot
            EXPECT_FALSE(segments_cross(inst.location(out.upper[a]), inst.location(out.upper[a + 1]),
                                        inst.location(out.upper[b]), inst.location(out.upper[b + 1])));
        }
    }
    EXPECT_EQ(two_opt(out, inst, arcs), out);
}

TEST(TwoOpt, NeverWorsensRandomEncodings) {
    Rng rng(7);
    for (int k = 0; k < 100; ++k) {
        const Instance inst = scattered_instance(3 + k % 9, static_cast<std::uint64_t>(k), 2);
        TableArcs arcs = integer_table(inst);
        const Encoding e = random_encoding(inst, rng, 0.0);
        const Encoding out = two_opt(e, inst, arcs);
        EXPECT_TRUE(is_valid(out, inst));
        EXPECT_LE(penalized_cost(out, inst, arcs), penalized_cost(e, inst, arcs));
        EXPECT_EQ(route_count(out), route_count(e));
    }
}

TEST(FindSortie, OffCorridorCustomerBecomesASortie) {
    Instance inst = detour_instance();
    inst.costs.drone_factor = 0.1;
    TableArcs arcs = integer_table(inst);
    const Encoding truck{{0, 1, 2, 3, 0}, {0, 0, 0, 0, 0}};
    const Encoding out = findsortie(truck, inst, arcs);
    const Encoding expected{{0, 1, 2, 3, 0}, {0, 0, 1, 0, 0}};
    EXPECT_EQ(out, expected);
    EXPECT_LT(penalized_cost(expected, inst, arcs), penalized_cost(truck, inst, arcs));
    const DecodedPlan plan = decode(out, inst);
    ASSERT_EQ(plan.routes[0].sorties.size(), 1u);
    EXPECT_EQ(plan.routes[0].sorties[0], (Sortie{1, 2, 3, 0}));
}

TEST(FindSortie, EnduranceGuard) {
    Instance inst = detour_instance();
    inst.fleet.endurance = 300;
    TableArcs arcs = integer_table(inst);
    const Encoding truck{{0, 1, 2, 3, 0}, {0, 0, 0, 0, 0}};
    EXPECT_EQ(findsortie(truck, inst, arcs), truck);
}

TEST(FindSortie, NoEligibleCustomersLeavesEncodingAlone) {
    Instance inst = detour_instance();
    for (Customer& c : inst.customers) c.demand = 3;
    TableArcs arcs = integer_table(inst);
    const Encoding truck{{0, 1, 2, 3, 0}, {0, 0, 0, 0, 0}};
    EXPECT_EQ(findsortie(truck, inst, arcs), truck);
}

TEST(Construct, PipelineIsMonotoneAndValid) {
    const TravelModel model = TravelModel::profile(9.0, [] {
        std::array<double, 24> m;
        for (std::size_t h = 0; h < 24; ++h) m[h] = 0.5 + 0.04 * double(h);
        return m;
    }());
    for (int k = 0; k < 100; ++k) {
        Instance inst = scattered_instance(4 + k % 12, static_cast<std::uint64_t>(k), 1 + k % 3);
        Rng rng(static_cast<std::uint64_t>(k));
        for (Customer& c : inst.customers) {
            c.demand = 1 + static_cast<int>(uniform_index(rng, 3));
            if (uniform01(rng) < 0.3) {
                const Seconds open = static_cast<Seconds>(uniform_index(rng, 6 * 3600));
                c.window = TimeWindow{open, open + 3600};
            }
        }
        PredictedArcs arcs(inst, model);
        const ConstructionResult r = construct(inst, arcs);
        const double nn = penalized_cost(r.nearest_neighbor, inst, arcs);
        const double opt = penalized_cost(r.after_two_opt, inst, arcs);
        const double fin = penalized_cost(r.encoding, inst, arcs);
        EXPECT_LE(opt, nn);
        EXPECT_LE(fin, opt);
        EXPECT_TRUE(is_valid(r.encoding, inst));
    }
}
