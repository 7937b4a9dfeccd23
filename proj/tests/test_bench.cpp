#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace vrpdt;

namespace {

BenchConfig small_config(int n, int reps) {
    BenchConfig cfg;
    cfg.scenario.n_customers = n;
    cfg.scenario.repetitions = reps;
    cfg.search.max_iterations = 3;
    cfg.search.max_total_iterations = 10;
    cfg.search.sample_width = 8;
    cfg.training_trips = 3000;
    return cfg;
}

RunResult row(SolverMode mode, int n, double d) {
    RunResult r;
    r.mode = mode;
    r.n = n;
    r.discrepancy = d;
    return r;
}

}  // namespace

TEST(Generate, FullDensityWindowsEveryone) {
    ScenarioSpec s;
    s.n_customers = 30;
    s.tw_density = 1.0;
    s.tw_width = 3600;
    const Instance inst = generate_instance(s);
    for (const Customer& c : inst.customers) {
        ASSERT_TRUE(c.window.has_value());
        EXPECT_EQ(c.window->close - c.window->open, 3600);
        EXPECT_GE(c.window->open, 0);
        EXPECT_LE(c.window->close, inst.fleet.horizon);
    }
}

TEST(Generate, QuarterDensityOfFortyIsTen) {
    ScenarioSpec s;
    s.n_customers = 40;
    s.tw_density = 0.25;
    const Instance inst = generate_instance(s);
    EXPECT_EQ(std::count_if(inst.customers.begin(), inst.customers.end(), [](const Customer& c) {
                  return c.window.has_value();
              }),
              10);
    EXPECT_EQ(windowed_count(10, 0.3), 3);
    EXPECT_EQ(windowed_count(7, 0.5), 3);
}

TEST(Generate, DeterministicAndSeedSensitive) {
    ScenarioSpec s;
    s.n_customers = 25;
    EXPECT_EQ(generate_instance(s), generate_instance(s));
    ScenarioSpec t = s;
    t.seed = 2;
    EXPECT_FALSE(generate_instance(s) == generate_instance(t));
}

TEST(Generate, LayoutAndDemandRules) {
    ScenarioSpec s;
    s.n_customers = 50;
    s.seed = 9;
    const Instance inst = generate_instance(s);
    EXPECT_EQ(inst.depot, s.region.centroid());
    int eligible = 0;
    for (const Customer& c : inst.customers) {
        EXPECT_TRUE(s.region.contains(c.location));
        EXPECT_GE(c.demand, 1);
        EXPECT_LE(c.demand, 3 * s.fleet.drone_capacity);
        EXPECT_LE(c.demand, inst.fleet.truck_capacity);
        eligible += inst.drone_eligible(c.id);
    }
    EXPECT_GT(eligible, 20);
    EXPECT_LT(eligible, 50);
    EXPECT_NO_THROW(validate(inst));
}

TEST(Generate, RejectsOutOfRangeParameters) {
    ScenarioSpec s;
    s.tw_density = 0.2;
    EXPECT_THROW(generate_instance(s), InvariantError);
    s = ScenarioSpec{};
    s.tw_width = 9000;
    EXPECT_THROW(generate_instance(s), InvariantError);
    s = ScenarioSpec{};
    s.region = BoundingBox{{40.7, -74.0}, {40.7, -73.9}};
    EXPECT_THROW(generate_instance(s), InvariantError);
}

TEST(Comparison, OneRepetitionGivesTwoPairedRows) {
    const BenchConfig cfg = small_config(6, 1);
    const TrafficOracle oracle(oracle_for(cfg));
    const TravelModel model = train_profile(oracle, cfg);
    std::vector<Instance> instances;
    const auto rows = run_comparison(cfg, model, oracle, false, &instances);
    ASSERT_EQ(rows.size(), 2u);
    ASSERT_EQ(instances.size(), 1u);
    EXPECT_EQ(rows[0].mode, SolverMode::dynamic);
    EXPECT_EQ(rows[1].mode, SolverMode::static_baseline);
    EXPECT_EQ(rows[0].scenario, rows[1].scenario);
    EXPECT_EQ(rows[0].seed, rows[1].seed);
    for (const RunResult& r : rows) {
        EXPECT_TRUE(r.error.empty()) << r.error;
        EXPECT_GE(r.discrepancy, 0.0);
        EXPECT_NEAR(r.discrepancy, std::abs(r.c_method - r.c_actual) / r.c_actual, 1e-12);
        EXPECT_EQ(r.n, 6);
    }
    EXPECT_GT(rows[0].predictor_calls, 0u);
    EXPECT_EQ(rows[1].predictor_calls, 0u);
}

TEST(Comparison, ReproducibleRowByRow) {
    const BenchConfig cfg = small_config(5, 2);
    const TrafficOracle oracle(oracle_for(cfg));
    const TravelModel model = train_profile(oracle, cfg);
    const auto a = run_comparison(cfg, model, oracle);
    const auto b = run_comparison(cfg, model, oracle);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].report.p_z, b[i].report.p_z);
        EXPECT_EQ(a[i].c_actual, b[i].c_actual);
        EXPECT_EQ(a[i].evals, b[i].evals);
    }
}

TEST(Cdf, SingleRow) {
    const CdfTable t = cdf_report({row(SolverMode::dynamic, 5, 0.2)});
    ASSERT_EQ(t.points.size(), 1u);
    EXPECT_EQ(t.points[0].x, 0.2);
    EXPECT_EQ(t.points[0].cdf, 1.0);
}

TEST(Cdf, EmptyInputRejected) { EXPECT_THROW(cdf_report({}), InvariantError); }

TEST(Cdf, ValidDistributionAndMeanMatchesRawRows) {
    Rng rng(3);
    std::vector<RunResult> rows;
    double sum[2] = {0, 0};
    double mx[2] = {0, 0};
    for (int k = 0; k < 80; ++k) {
        const int m = k % 2;
        const double d = uniform01(rng) * (m ? 0.5 : 0.1);
        rows.push_back(row(m ? SolverMode::static_baseline : SolverMode::dynamic, 10, d));
        sum[m] += d;
        mx[m] = std::max(mx[m], d);
    }
    RunResult failed = row(SolverMode::dynamic, 10, 99.0);
    failed.error = "boom";
    rows.push_back(failed);
    const CdfTable t = cdf_report(rows);
    EXPECT_NEAR(t.summary("dynamic").mean, sum[0] / 40, 1e-12);
    EXPECT_NEAR(t.summary("static").mean, sum[1] / 40, 1e-12);
    EXPECT_EQ(t.summary("static").max, mx[1]);
    EXPECT_EQ(t.summary("dynamic").count, 40u);
    for (const std::string mode : {"dynamic", "static"}) {
        double last_x = -1, last_c = 0;
        for (const CdfPoint& p : t.points) {
            if (p.mode != mode) continue;
            EXPECT_GE(p.x, last_x);
            EXPECT_GT(p.cdf, last_c);
            last_x = p.x;
            last_c = p.cdf;
        }
        EXPECT_EQ(last_c, 1.0);
    }
}

TEST(Scaling, FlatDiscrepancyMeansZeroGrowth) {
    std::vector<RunResult> rows;
    for (int n : {10, 20, 30}) {
        rows.push_back(row(SolverMode::dynamic, n, 0.1));
        rows.push_back(row(SolverMode::static_baseline, n, 0.3));
    }
    const ScalingTable t = scaling_table(rows);
    EXPECT_EQ(t.growth_pct.at("dynamic"), 0.0);
    EXPECT_EQ(t.growth_pct.at("static"), 0.0);
    EXPECT_EQ(t.rows.size(), 6u);
}

TEST(Scaling, GrowthRecomputedFromRawRows) {
    Rng rng(4);
    std::vector<RunResult> rows;
    std::map<std::pair<int, int>, std::pair<double, int>> acc;
    for (int n : {10, 20, 30, 40, 50}) {
        for (int rep = 0; rep < 5; ++rep) {
            for (int m = 0; m < 2; ++m) {
                const double d = 0.05 + uniform01(rng) * 0.2 + (m ? 0.002 * n : 0.0);
                rows.push_back(row(m ? SolverMode::static_baseline : SolverMode::dynamic, n, d));
                acc[{m, n}].first += d;
                acc[{m, n}].second += 1;
            }
        }
    }
    const ScalingTable t = scaling_table(rows);
    for (int m = 0; m < 2; ++m) {
        const double lo = acc[{m, 10}].first / acc[{m, 10}].second;
        const double hi = acc[{m, 50}].first / acc[{m, 50}].second;
        EXPECT_NEAR(t.growth_pct.at(m ? "static" : "dynamic"), 100.0 * (hi - lo) / lo, 1e-9);
        for (int n : {10, 20, 30, 40, 50}) {
            const auto& [sum, count] = acc[std::make_pair(m, n)];
            EXPECT_NEAR(t.mean(m ? "static" : "dynamic", n), sum / count, 1e-12);
        }
    }
}

TEST(Scaling, NeedsTwoSizes) {
    EXPECT_THROW(scaling_table({row(SolverMode::dynamic, 10, 0.1)}), InvariantError);
}

TEST(Ablation, NoResidentialCustomersGivesIdenticalArms) {
    BenchConfig cfg = small_config(6, 2);
    cfg.scenario.residential_fraction = 0.0;
    const TrafficOracle oracle(oracle_for(cfg));
    const TravelModel model = train_profile(oracle, cfg);
    std::vector<RunResult> raw;
    const AblationTable t = ablation_report(cfg, model, oracle, &raw);
    EXPECT_EQ(t.off.predictor_calls, t.on.predictor_calls);
    EXPECT_EQ(t.on.bypassed, 0u);
    EXPECT_EQ(t.off.mean_discrepancy, t.on.mean_discrepancy);
    EXPECT_EQ(t.call_reduction_pct, 0.0);
    ASSERT_EQ(raw.size(), 4u);
    EXPECT_EQ(raw[0].report.p_z, raw[1].report.p_z);
}

TEST(Ablation, AllResidentialNeverCallsThePredictor) {
    BenchConfig cfg = small_config(6, 2);
    cfg.scenario.residential_fraction = 1.0;
    const TrafficOracle oracle(oracle_for(cfg));
    const TravelModel model = train_profile(oracle, cfg);
    std::vector<RunResult> raw;
    const AblationTable t = ablation_report(cfg, model, oracle, &raw);
    EXPECT_EQ(t.on.predictor_calls, 0u);
    EXPECT_GT(t.on.bypassed, 0u);
    EXPECT_GT(t.off.predictor_calls, 0u);
    EXPECT_DOUBLE_EQ(t.call_reduction_pct, 100.0);
}

TEST(Ablation, ReductionRecomputedFromCounters) {
    BenchConfig cfg = small_config(8, 2);
    const TrafficOracle oracle(oracle_for(cfg));
    const TravelModel model = train_profile(oracle, cfg);
    std::vector<RunResult> raw;
    const AblationTable t = ablation_report(cfg, model, oracle, &raw);
    double off = 0, on = 0, d_off = 0, d_on = 0;
    for (const RunResult& r : raw) {
        (r.ra_gate ? on : off) += static_cast<double>(r.predictor_calls);
        (r.ra_gate ? d_on : d_off) += r.discrepancy;
    }
    EXPECT_NEAR(t.call_reduction_pct, 100.0 * (off - on) / off, 1e-9);
    EXPECT_NEAR(t.discrepancy_change_pct, 100.0 * (d_on - d_off) / d_off, 1e-9);
}

TEST(Output, ResultsCsvColumns) {
    RunResult r = row(SolverMode::static_baseline, 7, 0.25);
    r.scenario = "n7_s1";
    r.error = "bad, \"quoted\"";
    std::stringstream ss;
    write_results_csv(ss, {r});
    std::string header, line;
    std::getline(ss, header);
    std::getline(ss, line);
    EXPECT_EQ(header,
              "scenario,seed,n,mode,ra_gate,z,pen_endurance,pen_truck_load,pen_drone_load,pen_duration,pen_lateness,"
              "p_z,feasible,c_method,c_actual,discrepancy,wall_ms,predictor_calls,bypassed,evals,error");
    EXPECT_EQ(line.rfind("n7_s1,0,7,static,0,", 0), 0u) << line;
    EXPECT_NE(line.find("\"bad, \"\"quoted\"\"\""), std::string::npos) << line;
}

TEST(Output, SolutionJsonRoundTrip) {
    const Instance inst = testing_support::scattered_instance(4, 3);
    const Encoding e{{0, 1, 2, 3, 4, 0}, {0, 0, 1, 0, 0, 0}};
    StaticArcs arcs(inst);
    const auto doc = solution_to_json(e, inst, evaluate(e, inst, arcs));
    EXPECT_EQ(encoding_from_json(nlohmann::json::parse(doc.dump())), e);
}

TEST(Config, OverridesAndRejectsUnknownKeys) {
    BenchConfig cfg;
    apply_config(nlohmann::json::parse(R"({
        "scenario": {"n_customers": 12, "tw_density": 0.5, "fleet": {"trucks": 3}, "costs": {"p": 50}},
        "search": {"max_iterations": 7, "neighborhood_order": [8,7,6,5,4,3,2,1]},
        "oracle": {"seed": 99, "noise": 0.0},
        "training": {"trips": 500}
    })"),
                 cfg);
    EXPECT_EQ(cfg.scenario.n_customers, 12);
    EXPECT_EQ(cfg.scenario.tw_density, 0.5);
    EXPECT_EQ(cfg.scenario.fleet.trucks, 3);
    EXPECT_EQ(cfg.scenario.costs.penalty, 50.0);
    EXPECT_EQ(cfg.search.max_iterations, 7);
    EXPECT_EQ(cfg.search.neighborhood_order[0], 8);
    EXPECT_EQ(cfg.oracle.seed, 99u);
    EXPECT_EQ(cfg.training_trips, 500u);

    BenchConfig other;
    EXPECT_THROW(apply_config(nlohmann::json::parse(R"({"scenario": {"customers": 5}})"), other), FormatError);
    EXPECT_THROW(apply_config(nlohmann::json::parse(R"({"solver": {}})"), other), FormatError);
    EXPECT_THROW(apply_config(nlohmann::json::parse(R"({"scenario": {"tw_width": 60}})"), other), InvariantError);
    EXPECT_THROW(apply_config(nlohmann::json::parse(R"({"search": {"neighborhood_order": [1,1,2,3,4,5,6,7]}})"), other),
                 InvariantError);
}
