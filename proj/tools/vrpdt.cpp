// Command-line front end: instance generation, single solves and the
// benchmark tables.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <vrpdt/vrpdt.hpp>

namespace fs = std::filesystem;
using namespace vrpdt;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> oracle_seed;
    std::optional<int> customers;
    std::optional<double> tw_density;
    std::optional<Seconds> tw_width;
    std::optional<int> reps;
    std::string model;
    std::string out = "out";
};

BenchConfig make_config(const Common& c) {
    BenchConfig cfg;
    if (!c.config.empty()) cfg = load_config(c.config);
    if (c.seed) cfg.scenario.seed = *c.seed;
    if (c.oracle_seed) cfg.oracle.seed = *c.oracle_seed;
    if (c.customers) cfg.scenario.n_customers = *c.customers;
    if (c.tw_density) cfg.scenario.tw_density = *c.tw_density;
    if (c.tw_width) cfg.scenario.tw_width = *c.tw_width;
    if (c.reps) cfg.scenario.repetitions = *c.reps;
    validate(cfg.scenario);
    return cfg;
}

TravelModel dynamic_model(const Common& c, const BenchConfig& cfg, const TrafficOracle& oracle) {
    if (!c.model.empty()) return load_model(c.model);
    return train_profile(oracle, cfg);
}

std::ofstream open_out(const fs::path& p) {
    fs::create_directories(p.parent_path());
    std::ofstream f(p);
    if (!f) throw FormatError("cannot write '" + p.string() + "'");
    return f;
}

void add_scenario_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "JSON file overriding default constants")->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "Scenario seed (repetition r uses seed + r)");
    cmd->add_option("--oracle-seed", c.oracle_seed, "Traffic oracle seed");
    cmd->add_option("--customers", c.customers, "Number of customers")->check(CLI::PositiveNumber);
    cmd->add_option("--tw-density", c.tw_density, "Fraction of windowed customers in [0.25, 1]");
    cmd->add_option("--tw-width", c.tw_width, "Window width in seconds in [1800, 7200]");
    cmd->add_option("--reps", c.reps, "Repetitions")->check(CLI::PositiveNumber);
    cmd->add_option("--model", c.model, "Travel model file for the dynamic mode")->check(CLI::ExistingFile);
    cmd->add_option("--out", c.out, "Output directory");
}

void print_report(const EvalReport& r) {
    std::printf("Z=%.6f p_z=%.6f feasible=%d\n", r.z, r.p_z, r.feasible ? 1 : 0);
    std::printf("penalties: endurance=%.3f truck_load=%.3f drone_load=%.3f duration=%.3f lateness=%.3f\n",
                r.endurance_penalty, r.truck_load_penalty, r.drone_load_penalty, r.duration_penalty,
                r.lateness_penalty);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Truck-drone routing under time-varying traffic"};
    app.require_subcommand(1);
    Common c;

    auto* gen = app.add_subcommand("gen", "Generate seeded instances into <out>/instances");
    add_scenario_flags(gen, c);

    std::string instance_path, mode = "dynamic", ra_gate = "off", solution_path;
    auto* solve_cmd = app.add_subcommand("solve", "Solve one instance");
    add_scenario_flags(solve_cmd, c);
    solve_cmd->add_option("--instance", instance_path, "Instance JSON")->required()->check(CLI::ExistingFile);
    solve_cmd->add_option("--mode", mode, "Cost model")->check(CLI::IsMember({"dynamic", "static"}));
    solve_cmd->add_option("--ra-gate", ra_gate, "Residential gate")->check(CLI::IsMember({"on", "off"}));
    solve_cmd->add_option("--dump-solution", solution_path, "Also write the solution JSON here");

    auto* compare = app.add_subcommand("compare", "Paired dynamic/static runs: results.csv, cdf.csv");
    add_scenario_flags(compare, c);
    compare->add_option("--ra-gate", ra_gate, "Residential gate for the dynamic mode")
        ->check(CLI::IsMember({"on", "off"}));

    std::vector<int> sizes = {10, 20, 30, 40, 50};
    auto* scale = app.add_subcommand("scale", "Discrepancy growth over customer counts: scaling.csv");
    add_scenario_flags(scale, c);
    scale->add_option("--sizes", sizes, "Customer counts")->delimiter(',');

    auto* ablate = app.add_subcommand("ablate", "Residential gate off vs on: ablation.csv");
    add_scenario_flags(ablate, c);

    std::size_t trip_count = 20000;
    auto* trips = app.add_subcommand("trips", "Sample oracle trips in the trainer CSV format");
    add_scenario_flags(trips, c);
    trips->add_option("--count", trip_count, "Number of trips")->check(CLI::PositiveNumber);

    auto* check = app.add_subcommand("check-model", "Load a model file and run its conformance batch");
    check->add_option("--model", c.model, "Model file")->required()->check(CLI::ExistingFile);

    std::string trips_path, fit_kind = "profile", model_out;
    auto* fit = app.add_subcommand("fit", "Fit a travel model from a trip CSV");
    fit->add_option("--trips", trips_path, "Trip CSV")->required()->check(CLI::ExistingFile);
    fit->add_option("--kind", fit_kind, "Model kind")->check(CLI::IsMember({"profile", "grid"}));
    fit->add_option("--out", model_out, "Model file to write")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const fs::path out(c.out);
        if (gen->parsed()) {
            const BenchConfig cfg = make_config(c);
            const TrafficOracle oracle(oracle_for(cfg));
            for (int rep = 0; rep < cfg.scenario.repetitions; ++rep) {
                ScenarioSpec spec = cfg.scenario;
                spec.seed += static_cast<std::uint64_t>(rep);
                const Instance inst = generate_instance(spec, oracle.residential_map());
                const fs::path p = out / "instances" / (scenario_id(spec) + ".json");
                fs::create_directories(p.parent_path());
                save_instance(inst, p.string());
                std::cout << p.string() << '\n';
            }
        } else if (solve_cmd->parsed()) {
            const BenchConfig cfg = make_config(c);
            const Instance inst = load_instance(instance_path);
            const TrafficOracle oracle(oracle_for(cfg));
            const TravelModel model = dynamic_model(c, cfg, oracle);
            SearchConfig search = cfg.search;
            if (c.seed) search.rng_seed = *c.seed;
            const SolverMode m = mode == "dynamic" ? SolverMode::dynamic : SolverMode::static_baseline;
            SolvedRun run = run_single(inst, m, ra_gate == "on", model, oracle, search);
            if (!run.result.error.empty()) throw InvariantError(run.result.error);
            print_report(run.result.report);
            std::printf("C_method=%.6f C_actual=%.6f discrepancy=%.6f predictor_calls=%llu bypassed=%llu\n",
                        run.result.c_method, run.result.c_actual, run.result.discrepancy,
                        static_cast<unsigned long long>(run.result.predictor_calls),
                        static_cast<unsigned long long>(run.result.bypassed));
            const std::string stem = fs::path(instance_path).stem().string() + "_" + mode;
            const auto doc = solution_to_json(run.search.best, inst, run.result.report);
            open_out(out / "solutions" / (stem + ".json")) << doc.dump(2) << '\n';
            auto trace = open_out(out / "solutions" / (stem + "_trace.csv"));
            write_trace_csv(trace, run.search.trace);
            if (!solution_path.empty()) open_out(fs::absolute(solution_path)) << doc.dump(2) << '\n';
        } else if (compare->parsed()) {
            const BenchConfig cfg = make_config(c);
            const TrafficOracle oracle(oracle_for(cfg));
            const TravelModel model = dynamic_model(c, cfg, oracle);
            std::vector<Instance> instances;
            const auto rows = run_comparison(cfg, model, oracle, ra_gate == "on", &instances);
            for (std::size_t i = 0; i < instances.size(); ++i) {
                fs::create_directories(out / "instances");
                save_instance(instances[i], (out / "instances" / (rows[2 * i].scenario + ".json")).string());
            }
            auto results = open_out(out / "results.csv");
            write_results_csv(results, rows);
            const CdfTable cdf = cdf_report(rows);
            auto f = open_out(out / "cdf.csv");
            write_cdf_csv(f, cdf);
            for (const auto& s : cdf.summaries) {
                std::printf("%-8s runs=%zu mean_discrepancy=%.6f max=%.6f\n", s.mode.c_str(), s.count, s.mean, s.max);
            }
        } else if (scale->parsed()) {
            const BenchConfig cfg = make_config(c);
            const TrafficOracle oracle(oracle_for(cfg));
            const TravelModel model = dynamic_model(c, cfg, oracle);
            std::vector<RunResult> raw;
            const ScalingTable t = scaling_report(cfg, sizes, model, oracle, &raw);
            auto results = open_out(out / "results.csv");
            write_results_csv(results, raw);
            auto f = open_out(out / "scaling.csv");
            write_scaling_csv(f, t);
            for (const auto& [m, g] : t.growth_pct) std::printf("%-8s growth=%.2f%%\n", m.c_str(), g);
        } else if (ablate->parsed()) {
            const BenchConfig cfg = make_config(c);
            const TrafficOracle oracle(oracle_for(cfg));
            const TravelModel model = dynamic_model(c, cfg, oracle);
            std::vector<RunResult> raw;
            const AblationTable t = ablation_report(cfg, model, oracle, &raw);
            auto results = open_out(out / "results.csv");
            write_results_csv(results, raw);
            auto f = open_out(out / "ablation.csv");
            write_ablation_csv(f, t);
            std::printf("call_reduction=%.2f%% time_saving=%.2f%% discrepancy_change=%.2f%%\n", t.call_reduction_pct,
                        t.time_saving_pct, t.discrepancy_change_pct);
        } else if (trips->parsed()) {
            BenchConfig cfg = make_config(c);
            cfg.training_trips = trip_count;
            const TrafficOracle oracle(oracle_for(cfg));
            const Calendar cal(Calendar::parse_datetime(cfg.scenario.horizon_start));
            const auto rows = sample_trips(oracle, cfg.scenario.region, cfg.training_trips, cfg.max_trip_distance,
                                           c.seed.value_or(cfg.training_seed), cal);
            auto f = open_out(out / "trips.csv");
            write_trips_csv(f, rows);
            std::cout << (out / "trips.csv").string() << '\n';
        } else if (check->parsed()) {
            const TravelModel m = load_model(c.model);
            const auto doc = nlohmann::json::parse(detail::read_file(c.model));
            std::printf("kind=%s detour=%.6f avg_speed=%.6f\n", to_string(m.kind), m.detour_factor, m.avg_speed);
            if (doc.contains("conformance")) {
                const ConformanceResult r = check_conformance(m, doc["conformance"]);
                std::printf("conformance queries=%zu max_relative_diff=%.3g\n", r.queries, r.max_relative_diff);
            }
        } else if (fit->parsed()) {
            std::ifstream in(trips_path);
            const auto rows = read_trips_csv(in);
            const TravelModel m = fit_kind == "profile" ? fit_profile(rows) : fit_grid(rows, kNycBox, 6, 6, 3600);
            auto doc = model_to_json(m);
            const std::vector<TripRecord> sample(rows.begin(), rows.begin() + std::min<std::ptrdiff_t>(rows.size(), 1000));
            doc["conformance"] = conformance_batch(m, sample);
            open_out(fs::absolute(model_out)) << doc.dump(2) << '\n';
            std::printf("fitted %s on %zu trips -> %s\n", to_string(m.kind), rows.size(), model_out.c_str());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
