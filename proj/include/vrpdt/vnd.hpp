#pragma once

// Shake / descend / shuffle loop around a variable neighborhood descent.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <vector>

#include "construction.hpp"
#include "cost.hpp"
#include "moves.hpp"

namespace vrpdt {

struct SearchConfig {
    int max_iterations = 50;  // outer iterations without improvement before stopping
    std::uint64_t rng_seed = 1;
    std::array<int, kMoveCount> neighborhood_order{1, 2, 3, 4, 5, 6, 7, 8};
    int moves_per_shake = 3;
    int sample_width = 0;           // candidates per neighborhood per pass; 0 means n
    bool full_enumeration = false;  // try every target instead of sampling
    int max_total_iterations = 1000;
    std::optional<double> time_budget;  // seconds
};

inline void validate(const SearchConfig& c) {
    if (c.max_iterations < 1) throw InvariantError("max_iterations must be >= 1");
    if (c.moves_per_shake < 0) throw InvariantError("moves_per_shake must be >= 0");
    if (c.sample_width < 0) throw InvariantError("sample_width must be >= 0");
    if (c.max_total_iterations < 1) throw InvariantError("max_total_iterations must be >= 1");
    std::array<int, kMoveCount> sorted = c.neighborhood_order;
    std::sort(sorted.begin(), sorted.end());
    for (int k = 0; k < kMoveCount; ++k) {
        if (sorted[static_cast<std::size_t>(k)] != k + 1) throw InvariantError("neighborhood_order must permute 1..8");
    }
}

struct TraceRow {
    int k = 0;        // outer iteration, 0 for the initial descent
    int move_id = 0;  // first neighborhood of the order used in this iteration
    double candidate_pz = 0.0;
    double best_pz = 0.0;
    bool accepted = false;
    std::uint64_t evals = 0;            // cumulative
    std::uint64_t predictor_calls = 0;  // cumulative
    double elapsed_ms = 0.0;
    int noop_moves = 0;  // shake moves that found no legal target

    /// Equality over recorded decisions; wall time is excluded.
    bool same_decisions(const TraceRow& o) const {
        return k == o.k && move_id == o.move_id && candidate_pz == o.candidate_pz && best_pz == o.best_pz &&
               accepted == o.accepted && evals == o.evals && predictor_calls == o.predictor_calls &&
               noop_moves == o.noop_moves;
    }
};

struct SearchTrace {
    std::vector<TraceRow> rows;
    std::uint64_t evals = 0;
    std::uint64_t predictor_calls = 0;
    std::uint64_t bypassed = 0;
    double wall_ms = 0.0;

    bool same_decisions(const SearchTrace& o) const {
        if (rows.size() != o.rows.size() || evals != o.evals || predictor_calls != o.predictor_calls) return false;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!rows[i].same_decisions(o.rows[i])) return false;
        }
        return true;
    }
};

inline void write_trace_csv(std::ostream& out, const SearchTrace& t) {
    out << "k,move_id,candidate_pz,best_pz,accepted,evals,predictor_calls,elapsed_ms\n";
    char buf[256];
    for (const TraceRow& r : t.rows) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.10g,%.10g,%d,%llu,%llu,%.3f\n", r.k, r.move_id, r.candidate_pz,
                      r.best_pz, r.accepted ? 1 : 0, static_cast<unsigned long long>(r.evals),
                      static_cast<unsigned long long>(r.predictor_calls), r.elapsed_ms);
        out << buf;
    }
}

struct SearchResult {
    Encoding best;
    EvalReport report;
    SearchTrace trace;
    ConstructionResult construction;
};

/// Applies `moves_per_shake` moves, each drawn uniformly from the order.
inline Encoding shake(const Encoding& enc, const SearchConfig& config, Rng& rng, const Instance& inst,
                      int* noop_moves = nullptr) {
    Encoding cur = enc;
    for (int j = 0; j < config.moves_per_shake; ++j) {
        const int move = config.neighborhood_order[uniform_index(rng, kMoveCount)];
        MoveResult r = apply_move(cur, move, rng, inst);
        if (!r.applied && noop_moves) ++*noop_moves;
        cur = std::move(r.encoding);
    }
    return cur;
}

namespace detail {

template <ArcSource Arcs>
PredictionCounters counters_of(const Arcs& arcs) {
    if constexpr (requires { arcs.counters(); }) {
        return arcs.counters();
    } else {
        return {};
    }
}

template <ArcSource Arcs>
class Evaluator {
public:
    Evaluator(const Instance& inst, Arcs& arcs) : inst_(&inst), arcs_(&arcs) {}

    EvalReport operator()(const Encoding& e) {
        ++evals_;
        return evaluate(decode(e, *inst_), *inst_, *arcs_);
    }

    std::uint64_t evals() const { return evals_; }
    Arcs& arcs() { return *arcs_; }

private:
    const Instance* inst_;
    Arcs* arcs_;
    std::uint64_t evals_ = 0;
};

}  // namespace detail

/// First-improvement descent through the neighborhoods in `order`, restarting
/// from the first after every strict improvement of p_z. Each neighborhood
/// samples `width` random targets, or all of them with full enumeration.
template <ArcSource Arcs>
Encoding vnd_descent(const Encoding& start, const std::array<int, kMoveCount>& order, const Instance& inst,
                     detail::Evaluator<Arcs>& eval, Rng& rng, int width, bool full_enumeration,
                     double* best_pz = nullptr) {
    Encoding cur = start;
    double cur_pz = eval(cur).p_z;
    std::size_t hood = 0;
    while (hood < order.size()) {
        const int move = order[hood];
        bool improved = false;
        if (full_enumeration) {
            for (const auto& [a, b] : move_targets(cur, move, inst)) {
                MoveResult r = apply_move_at(cur, move, a, b, inst);
                if (!r.applied) continue;
                const double pz = eval(r.encoding).p_z;
                if (pz < cur_pz) {
                    cur = std::move(r.encoding);
                    cur_pz = pz;
                    improved = true;
                    break;
                }
            }
        } else {
            for (int s = 0; s < width; ++s) {
                MoveResult r = apply_move(cur, move, rng, inst);
                if (!r.applied) continue;
                const double pz = eval(r.encoding).p_z;
                if (pz < cur_pz) {
                    cur = std::move(r.encoding);
                    cur_pz = pz;
                    improved = true;
                    break;
                }
            }
        }
        hood = improved ? 0 : hood + 1;
    }
    if (best_pz) *best_pz = cur_pz;
    return cur;
}

/// Construct, descend, then repeat: shake the best solution, descend, keep the
/// result if p_z strictly improves (resetting the stall counter), otherwise
/// reshuffle the neighborhood order. Stops after `max_iterations` consecutive
/// iterations without improvement, the total iteration cap, or the time budget.
template <ArcSource Arcs>
SearchResult solve(const Instance& inst, Arcs& arcs, const SearchConfig& config) {
    validate(config);
    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    auto elapsed_ms = [&] { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); };

    SearchResult res;
    Rng rng(hash_combine(config.rng_seed, 0x5ea7c4));
    const int width = config.sample_width > 0 ? config.sample_width : std::max(1, inst.size());
    std::array<int, kMoveCount> order = config.neighborhood_order;
    detail::Evaluator<Arcs> eval(inst, arcs);

    res.construction = construct(inst, arcs);
    double best_pz = 0.0;
    Encoding best = vnd_descent(res.construction.encoding, order, inst, eval, rng, width, config.full_enumeration,
                                &best_pz);
    auto record = [&](int k, int move_id, double candidate, bool accepted, int noops) {
        TraceRow row;
        row.k = k;
        row.move_id = move_id;
        row.candidate_pz = candidate;
        row.best_pz = best_pz;
        row.accepted = accepted;
        row.evals = eval.evals();
        row.predictor_calls = detail::counters_of(arcs).predictor_calls;
        row.elapsed_ms = elapsed_ms();
        row.noop_moves = noops;
        res.trace.rows.push_back(row);
    };
    record(0, 0, best_pz, true, 0);

    int stall = 0;
    for (int it = 1; it <= config.max_total_iterations && stall < config.max_iterations; ++it) {
        if (config.time_budget && elapsed_ms() > *config.time_budget * 1000.0) break;
        int noops = 0;
        const int first = order[0];
        const Encoding shaken = shake(best, config, rng, inst, &noops);
        double cand_pz = 0.0;
        Encoding cand = vnd_descent(shaken, order, inst, eval, rng, width, config.full_enumeration, &cand_pz);
        const bool accepted = cand_pz < best_pz;
        if (accepted) {
            best = std::move(cand);
            best_pz = cand_pz;
            stall = 0;
        } else {
            shuffle(order, rng);
            ++stall;
        }
        record(it, first, cand_pz, accepted, noops);
    }

    res.best = best;
    res.report = evaluate(decode(best, inst), inst, arcs);
    res.trace.evals = eval.evals();
    const PredictionCounters c = detail::counters_of(arcs);
    res.trace.predictor_calls = c.predictor_calls;
    res.trace.bypassed = c.bypassed;
    res.trace.wall_ms = elapsed_ms();
    return res;
}

}  // namespace vrpdt
