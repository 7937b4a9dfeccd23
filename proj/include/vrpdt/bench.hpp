#pragma once

// Experiment harness: seeded instance generation, paired dynamic/static
// solves scored against the traffic oracle, and the summary tables.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cost.hpp"
#include "instance.hpp"
#include "traffic_oracle.hpp"
#include "travel_model.hpp"
#include "vnd.hpp"

namespace vrpdt {

struct ScenarioSpec {
    int n_customers = 50;
    BoundingBox region = kNycBox;
    std::optional<double> tw_density;  // unset: drawn per instance from [0.25, 1]
    std::optional<Seconds> tw_width;   // unset: drawn per instance from [1800, 7200]
    std::string horizon_start = "2024-03-12T06:00:00";
    std::uint64_t seed = 1;
    int repetitions = 30;
    double residential_fraction = 0.6;
    double eligible_fraction = 0.7;  // share of customers with q <= Qd
    double capacity_slack = 1.2;     // Qt = ceil(slack * total demand / trucks) unless fixed
    std::optional<int> truck_capacity;
    Seconds service_seconds = 0;
    Fleet fleet = default_fleet();
    CostParams costs;

    static Fleet default_fleet() {
        Fleet f;
        f.trucks = 2;
        f.drones_per_truck = 1;
        f.drone_capacity = 2;
        f.endurance = 1800;
        f.horizon = 8 * 3600;
        return f;
    }
};

inline constexpr double kMinTwDensity = 0.25;
inline constexpr double kMaxTwDensity = 1.0;
inline constexpr Seconds kMinTwWidth = 1800;
inline constexpr Seconds kMaxTwWidth = 7200;

inline void validate(const ScenarioSpec& s) {
    if (s.n_customers < 1) throw InvariantError("scenario: n_customers must be >= 1");
    if (s.region.degenerate()) throw InvariantError("scenario: degenerate region");
    if (s.tw_density && !(*s.tw_density >= kMinTwDensity && *s.tw_density <= kMaxTwDensity)) {
        throw InvariantError("scenario: tw_density must be in [0.25, 1]");
    }
    if (s.tw_width && (*s.tw_width < kMinTwWidth || *s.tw_width > kMaxTwWidth)) {
        throw InvariantError("scenario: tw_width must be in [1800, 7200] seconds");
    }
    if (s.tw_width.value_or(kMaxTwWidth) >= s.fleet.horizon) throw InvariantError("scenario: T_max must exceed tw_width");
    if (s.repetitions < 1) throw InvariantError("scenario: repetitions must be >= 1");
    if (!(s.residential_fraction >= 0.0 && s.residential_fraction <= 1.0)) {
        throw InvariantError("scenario: residential_fraction must be in [0, 1]");
    }
    if (!(s.eligible_fraction >= 0.0 && s.eligible_fraction <= 1.0)) {
        throw InvariantError("scenario: eligible_fraction must be in [0, 1]");
    }
    if (!(s.capacity_slack >= 1.0)) throw InvariantError("scenario: capacity_slack must be >= 1");
    if (s.service_seconds < 0) throw InvariantError("scenario: service_seconds must be >= 0");
}

/// Number of windowed customers for a density.
inline int windowed_count(int n, double density) {
    return static_cast<int>(std::floor(static_cast<double>(n) * density + 1e-9));
}

/// Customers uniform in the region, depot at its centroid. `residential`
/// supplies the residential flags.
inline Instance generate_instance(const ScenarioSpec& spec, const ResidentialMap& residential) {
    validate(spec);
    Rng rng(hash_combine(spec.seed, 0x1257a));
    Instance inst;
    inst.calendar = Calendar(Calendar::parse_datetime(spec.horizon_start));
    inst.fleet = spec.fleet;
    inst.costs = spec.costs;
    inst.depot = spec.region.centroid();
    inst.depot_residential = residential.is_residential(inst.depot);

    const double density = spec.tw_density ? *spec.tw_density : uniform_real(rng, kMinTwDensity, kMaxTwDensity);
    const Seconds width = spec.tw_width ? *spec.tw_width
                                        : static_cast<Seconds>(uniform_int(rng, kMinTwWidth, kMaxTwWidth));
    const int n = spec.n_customers;
    const int qd = spec.fleet.drone_capacity;
    long long total = 0;
    for (int i = 1; i <= n; ++i) {
        Customer c;
        c.id = i;
        c.location = {uniform_real(rng, spec.region.south_west.lat, spec.region.north_east.lat),
                      uniform_real(rng, spec.region.south_west.lon, spec.region.north_east.lon)};
        const bool eligible = uniform01(rng) < spec.eligible_fraction;
        c.demand = eligible ? static_cast<int>(uniform_int(rng, 1, qd)) : static_cast<int>(uniform_int(rng, qd + 1, 3 * qd));
        c.residential = residential.is_residential(c.location);
        c.service_seconds = spec.service_seconds;
        total += c.demand;
        inst.customers.push_back(c);
    }

    std::vector<int> ids(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i + 1;
    shuffle(ids, rng);
    const int windowed = windowed_count(n, density);
    for (int k = 0; k < windowed; ++k) {
        const Seconds open = static_cast<Seconds>(uniform_int(rng, 0, spec.fleet.horizon - width));
        inst.customers[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)] - 1)].window = TimeWindow{open, open + width};
    }

    if (spec.truck_capacity) {
        inst.fleet.truck_capacity = *spec.truck_capacity;
    } else {
        const double per_truck = spec.capacity_slack * static_cast<double>(total) / spec.fleet.trucks;
        inst.fleet.truck_capacity = std::max({qd, 3 * qd, static_cast<int>(std::ceil(per_truck))});
    }
    validate(inst);
    return inst;
}

inline Instance generate_instance(const ScenarioSpec& spec) {
    return generate_instance(spec, ResidentialMap(spec.region, spec.residential_fraction, hash_combine(spec.seed, 0x3e5)));
}

// ---------------------------------------------------------------------------
// Runs

enum class SolverMode { dynamic, static_baseline };

inline const char* to_string(SolverMode m) { return m == SolverMode::dynamic ? "dynamic" : "static"; }

struct RunResult {
    std::string scenario;
    std::uint64_t seed = 0;
    int n = 0;
    SolverMode mode = SolverMode::dynamic;
    bool ra_gate = false;
    EvalReport report;  // under the method's own cost model
    double c_method = 0.0;
    double c_actual = 0.0;
    double discrepancy = 0.0;
    double wall_ms = 0.0;
    std::uint64_t predictor_calls = 0;
    std::uint64_t bypassed = 0;
    std::uint64_t evals = 0;
    std::string error;  // non-empty when the run failed
};

struct BenchConfig {
    ScenarioSpec scenario;
    SearchConfig search;
    OracleParams oracle;
    std::size_t training_trips = 20000;
    double max_trip_distance = 20000.0;  // road meters
    std::uint64_t training_seed = 11;
};

/// The dynamic mode's travel model: an hourly profile fitted to trips sampled
/// from the oracle on the scenario's first day.
inline TravelModel train_profile(const TrafficOracle& oracle, const BenchConfig& cfg) {
    const Calendar cal(Calendar::parse_datetime(cfg.scenario.horizon_start));
    return fit_profile(sample_trips(oracle, cfg.scenario.region, cfg.training_trips, cfg.max_trip_distance,
                                    cfg.training_seed, cal));
}

inline OracleParams oracle_for(const BenchConfig& cfg) {
    OracleParams p = cfg.oracle;
    p.region = cfg.scenario.region;
    p.residential_fraction = cfg.scenario.residential_fraction;
    return p;
}

struct SolvedRun {
    RunResult result;
    SearchResult search;
};

inline SolvedRun run_single(const Instance& inst, SolverMode mode, bool ra_gate, const TravelModel& model,
                            const TrafficOracle& oracle, const SearchConfig& search) {
    SolvedRun out;
    RunResult& r = out.result;
    r.n = inst.size();
    r.mode = mode;
    r.ra_gate = ra_gate;
    const auto t0 = std::chrono::steady_clock::now();
    OracleArcs actual(inst, oracle);
    auto finish = [&](auto& arcs) {
        out.search = solve(inst, arcs, search);
        const DecodedPlan plan = decode(out.search.best, inst);
        r.report = out.search.report;
        r.c_method = r.report.z;
        r.c_actual = evaluate(plan, inst, actual).z;
        if (!(r.c_actual > 0.0)) throw InvariantError("discrepancy: actual cost is zero");
        r.discrepancy = std::abs(r.c_method - r.c_actual) / r.c_actual;
        r.predictor_calls = out.search.trace.predictor_calls;
        r.bypassed = out.search.trace.bypassed;
        r.evals = out.search.trace.evals;
    };
    try {
        if (mode == SolverMode::dynamic) {
            PredictedArcs arcs(inst, model, ra_gate);
            finish(arcs);
        } else {
            StaticArcs arcs(inst);
            finish(arcs);
        }
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

inline std::string scenario_id(const ScenarioSpec& s) {
    return "n" + std::to_string(s.n_customers) + "_s" + std::to_string(s.seed);
}

/// Per repetition r the instance seed is scenario.seed + r; both modes solve
/// the same instance with the same search seed.
inline std::vector<RunResult> run_comparison(const BenchConfig& cfg, const TravelModel& model,
                                             const TrafficOracle& oracle, bool ra_gate = false,
                                             std::vector<Instance>* instances = nullptr) {
    std::vector<RunResult> rows;
    for (int rep = 0; rep < cfg.scenario.repetitions; ++rep) {
        ScenarioSpec spec = cfg.scenario;
        spec.seed = cfg.scenario.seed + static_cast<std::uint64_t>(rep);
        const Instance inst = generate_instance(spec, oracle.residential_map());
        if (instances) instances->push_back(inst);
        SearchConfig search = cfg.search;
        search.rng_seed = hash_combine(cfg.search.rng_seed, spec.seed);
        for (SolverMode mode : {SolverMode::dynamic, SolverMode::static_baseline}) {
            RunResult r = run_single(inst, mode, ra_gate, model, oracle, search).result;
            r.scenario = scenario_id(spec);
            r.seed = spec.seed;
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Tables

struct CdfPoint {
    std::string mode;
    double x = 0.0;
    double cdf = 0.0;
};

struct CdfSummary {
    std::string mode;
    std::size_t count = 0;
    double mean = 0.0;
    double max = 0.0;
};

struct CdfTable {
    std::vector<CdfPoint> points;
    std::vector<CdfSummary> summaries;

    const CdfSummary& summary(const std::string& mode) const {
        for (const auto& s : summaries) {
            if (s.mode == mode) return s;
        }
        throw InvariantError("cdf: no rows for mode " + mode);
    }
};

/// Empirical CDF of discrepancies per mode (failed runs are skipped).
inline CdfTable cdf_report(const std::vector<RunResult>& results) {
    std::map<std::string, std::vector<double>> by_mode;
    for (const RunResult& r : results) {
        if (r.error.empty()) by_mode[to_string(r.mode)].push_back(r.discrepancy);
    }
    if (by_mode.empty()) throw InvariantError("cdf: no results");
    CdfTable t;
    for (auto& [mode, xs] : by_mode) {
        std::sort(xs.begin(), xs.end());
        CdfSummary s{mode, xs.size(), 0.0, xs.back()};
        for (std::size_t i = 0; i < xs.size(); ++i) {
            t.points.push_back({mode, xs[i], static_cast<double>(i + 1) / static_cast<double>(xs.size())});
            s.mean += xs[i];
        }
        s.mean /= static_cast<double>(xs.size());
        t.summaries.push_back(s);
    }
    return t;
}

struct ScalingRow {
    std::string mode;
    int n = 0;
    std::size_t runs = 0;
    double mean_discrepancy = 0.0;
    double growth_pct = 0.0;  // relative to the smallest n of the same mode
};

struct ScalingTable {
    std::vector<ScalingRow> rows;
    std::map<std::string, double> growth_pct;  // smallest to largest n

    double mean(const std::string& mode, int n) const {
        for (const auto& r : rows) {
            if (r.mode == mode && r.n == n) return r.mean_discrepancy;
        }
        throw InvariantError("scaling: missing (" + mode + ", " + std::to_string(n) + ")");
    }
};

inline ScalingTable scaling_table(const std::vector<RunResult>& results) {
    std::map<std::string, std::map<int, std::pair<double, std::size_t>>> acc;
    for (const RunResult& r : results) {
        if (!r.error.empty()) continue;
        auto& cell = acc[to_string(r.mode)][r.n];
        cell.first += r.discrepancy;
        ++cell.second;
    }
    ScalingTable t;
    for (const auto& [mode, by_n] : acc) {
        if (by_n.size() < 2) throw InvariantError("scaling: need at least two customer counts");
        const double base = by_n.begin()->second.first / static_cast<double>(by_n.begin()->second.second);
        for (const auto& [n, cell] : by_n) {
            const double mean = cell.first / static_cast<double>(cell.second);
            t.rows.push_back({mode, n, cell.second, mean, base > 0.0 ? 100.0 * (mean - base) / base : 0.0});
        }
        t.growth_pct[mode] = t.rows.back().growth_pct;
    }
    return t;
}

inline ScalingTable scaling_report(const BenchConfig& cfg, const std::vector<int>& sizes, const TravelModel& model,
                                   const TrafficOracle& oracle, std::vector<RunResult>* raw = nullptr) {
    if (sizes.size() < 2) throw InvariantError("scaling: need at least two customer counts");
    std::vector<RunResult> all;
    for (int n : sizes) {
        BenchConfig c = cfg;
        c.scenario.n_customers = n;
        auto rows = run_comparison(c, model, oracle);
        all.insert(all.end(), rows.begin(), rows.end());
    }
    if (raw) *raw = all;
    return scaling_table(all);
}

struct AblationArm {
    bool ra_gate = false;
    std::size_t runs = 0;
    double mean_wall_ms = 0.0;
    std::uint64_t predictor_calls = 0;
    std::uint64_t bypassed = 0;
    std::uint64_t evals = 0;
    double mean_discrepancy = 0.0;
};

struct AblationTable {
    AblationArm off, on;
    double time_saving_pct = 0.0;       // (off - on) / off
    double call_reduction_pct = 0.0;    // (off - on) / off
    double discrepancy_change_pct = 0.0;  // (on - off) / off
};

inline AblationTable ablation_table(const std::vector<RunResult>& results) {
    AblationTable t;
    t.on.ra_gate = true;
    for (const RunResult& r : results) {
        if (!r.error.empty() || r.mode != SolverMode::dynamic) continue;
        AblationArm& a = r.ra_gate ? t.on : t.off;
        ++a.runs;
        a.mean_wall_ms += r.wall_ms;
        a.predictor_calls += r.predictor_calls;
        a.bypassed += r.bypassed;
        a.evals += r.evals;
        a.mean_discrepancy += r.discrepancy;
    }
    for (AblationArm* a : {&t.off, &t.on}) {
        if (a->runs == 0) throw InvariantError("ablation: an arm has no runs");
        a->mean_wall_ms /= static_cast<double>(a->runs);
        a->mean_discrepancy /= static_cast<double>(a->runs);
    }
    auto pct = [](double from, double to) { return from > 0.0 ? 100.0 * (from - to) / from : 0.0; };
    t.time_saving_pct = pct(t.off.mean_wall_ms, t.on.mean_wall_ms);
    t.call_reduction_pct = pct(static_cast<double>(t.off.predictor_calls), static_cast<double>(t.on.predictor_calls));
    t.discrepancy_change_pct = -pct(t.off.mean_discrepancy, t.on.mean_discrepancy);
    return t;
}

/// Dynamic mode with the residential gate off and on, same instances and seeds.
inline AblationTable ablation_report(const BenchConfig& cfg, const TravelModel& model, const TrafficOracle& oracle,
                                     std::vector<RunResult>* raw = nullptr) {
    std::vector<RunResult> rows;
    for (int rep = 0; rep < cfg.scenario.repetitions; ++rep) {
        ScenarioSpec spec = cfg.scenario;
        spec.seed = cfg.scenario.seed + static_cast<std::uint64_t>(rep);
        const Instance inst = generate_instance(spec, oracle.residential_map());
        SearchConfig search = cfg.search;
        search.rng_seed = hash_combine(cfg.search.rng_seed, spec.seed);
        for (bool gate : {false, true}) {
            RunResult r = run_single(inst, SolverMode::dynamic, gate, model, oracle, search).result;
            r.scenario = scenario_id(spec);
            r.seed = spec.seed;
            rows.push_back(std::move(r));
        }
    }
    if (raw) *raw = rows;
    return ablation_table(rows);
}

// ---------------------------------------------------------------------------
// Output

namespace detail {

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace detail

inline void write_results_csv(std::ostream& out, const std::vector<RunResult>& rows) {
    using detail::fmt;
    out << "scenario,seed,n,mode,ra_gate,z,pen_endurance,pen_truck_load,pen_drone_load,pen_duration,pen_lateness,p_z,"
           "feasible,c_method,c_actual,discrepancy,wall_ms,predictor_calls,bypassed,evals,error\n";
    for (const RunResult& r : rows) {
        const EvalReport& e = r.report;
        out << r.scenario << ',' << r.seed << ',' << r.n << ',' << to_string(r.mode) << ',' << (r.ra_gate ? 1 : 0) << ','
            << fmt(e.z) << ',' << fmt(e.endurance_penalty) << ',' << fmt(e.truck_load_penalty) << ','
            << fmt(e.drone_load_penalty) << ',' << fmt(e.duration_penalty) << ',' << fmt(e.lateness_penalty) << ','
            << fmt(e.p_z) << ',' << (e.feasible ? 1 : 0) << ',' << fmt(r.c_method) << ',' << fmt(r.c_actual) << ','
            << fmt(r.discrepancy) << ',' << fmt(r.wall_ms) << ',' << r.predictor_calls << ',' << r.bypassed << ','
            << r.evals << ',' << detail::csv_escape(r.error) << '\n';
    }
}

inline void write_cdf_csv(std::ostream& out, const CdfTable& t) {
    out << "mode,discrepancy,cdf\n";
    for (const CdfPoint& p : t.points) out << p.mode << ',' << detail::fmt(p.x) << ',' << detail::fmt(p.cdf) << '\n';
}

inline void write_scaling_csv(std::ostream& out, const ScalingTable& t) {
    out << "mode,n,runs,mean_discrepancy,growth_pct\n";
    for (const ScalingRow& r : t.rows) {
        out << r.mode << ',' << r.n << ',' << r.runs << ',' << detail::fmt(r.mean_discrepancy) << ','
            << detail::fmt(r.growth_pct) << '\n';
    }
}

inline void write_ablation_csv(std::ostream& out, const AblationTable& t) {
    using detail::fmt;
    out << "arm,runs,mean_wall_ms,predictor_calls,bypassed,evals,mean_discrepancy\n";
    for (const AblationArm* a : {&t.off, &t.on}) {
        out << (a->ra_gate ? "ra_on" : "ra_off") << ',' << a->runs << ',' << fmt(a->mean_wall_ms) << ','
            << a->predictor_calls << ',' << a->bypassed << ',' << a->evals << ',' << fmt(a->mean_discrepancy) << '\n';
    }
    out << "# time_saving_pct=" << fmt(t.time_saving_pct) << " call_reduction_pct=" << fmt(t.call_reduction_pct)
        << " discrepancy_change_pct=" << fmt(t.discrepancy_change_pct) << '\n';
}

/// Solution file: the two vectors, the decoded routes and the evaluation.
inline nlohmann::json solution_to_json(const Encoding& enc, const Instance& inst, const EvalReport& rep) {
    nlohmann::json doc;
    doc["upper"] = enc.upper;
    std::vector<int> lower(enc.lower.begin(), enc.lower.end());
    doc["lower"] = lower;
    nlohmann::json routes = nlohmann::json::array();
    for (const Route& r : decode(enc, inst).routes) {
        nlohmann::json sorties = nlohmann::json::array();
        for (const Sortie& s : r.sorties) {
            sorties.push_back({{"launch", s.launch}, {"customer", s.customer}, {"rendezvous", s.rendezvous},
                               {"drone", s.drone_id}});
        }
        routes.push_back({{"truck", r.truck_id}, {"visits", r.visits}, {"sorties", sorties}});
    }
    doc["routes"] = routes;
    doc["report"] = {{"z", rep.z},
                     {"pen_endurance", rep.endurance_penalty},
                     {"pen_truck_load", rep.truck_load_penalty},
                     {"pen_drone_load", rep.drone_load_penalty},
                     {"pen_duration", rep.duration_penalty},
                     {"pen_lateness", rep.lateness_penalty},
                     {"p_z", rep.p_z},
                     {"feasible", rep.feasible}};
    return doc;
}

inline Encoding encoding_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("upper") || !doc.contains("lower")) {
        throw FormatError("solution: expected an object with 'upper' and 'lower'");
    }
    Encoding e;
    try {
        e.upper = doc["upper"].get<std::vector<NodeId>>();
        for (int f : doc["lower"].get<std::vector<int>>()) {
            if (f != 0 && f != 1) throw FormatError("solution: lower flags must be 0 or 1");
            e.lower.push_back(static_cast<std::uint8_t>(f));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw FormatError(std::string("solution: ") + ex.what());
    }
    return e;
}

}  // namespace vrpdt
