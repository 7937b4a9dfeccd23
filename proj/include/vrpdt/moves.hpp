#pragma once

// The eight neighborhood moves on the upper/lower encoding. Moves 1-6 come in
// "node" (upper only) and "whole" (upper and lower together) flavors.

#include <algorithm>
#include <array>
#include <string_view>
#include <vector>

#include "encoding.hpp"
#include "instance.hpp"
#include "random.hpp"

namespace vrpdt {

enum class Move : int {
    swap_node = 1,
    swap_whole = 2,
    insert_node = 3,
    insert_whole = 4,
    reverse_node = 5,
    reverse_whole = 6,
    remove_sortie = 7,
    add_sortie = 8,
};

inline constexpr int kMoveCount = 8;

inline std::string_view move_name(int id) {
    static constexpr std::array<std::string_view, kMoveCount> names{
        "swap_node", "swap_whole", "insert_node", "insert_whole",
        "reverse_node", "reverse_whole", "remove_sortie", "add_sortie"};
    if (id < 1 || id > kMoveCount) throw InvariantError("move id must be in 1..8");
    return names[static_cast<std::size_t>(id - 1)];
}

struct MoveResult {
    Encoding encoding;
    bool applied = false;  // false when the move had no legal target or changed nothing
};

namespace detail {

inline std::vector<std::size_t> customer_positions(const Encoding& e) {
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < e.upper.size(); ++i) {
        if (e.upper[i] != kDepot) pos.push_back(i);
    }
    return pos;
}

/// Positions of `e` for one concrete move; `a`/`b` are encoding indices.
inline Encoding apply_concrete(const Encoding& e, int move, std::size_t a, std::size_t b) {
    Encoding out = e;
    const bool whole = move % 2 == 0;
    const auto ia = static_cast<std::ptrdiff_t>(a);
    const auto ib = static_cast<std::ptrdiff_t>(b);
    switch (static_cast<Move>(move)) {
        case Move::swap_node:
        case Move::swap_whole:
            std::swap(out.upper[a], out.upper[b]);
            if (whole) std::swap(out.lower[a], out.lower[b]);
            break;
        case Move::insert_node:
        case Move::insert_whole: {
            // Take the customer at a and put it so that it lands at index b.
            const NodeId v = out.upper[a];
            out.upper.erase(out.upper.begin() + ia);
            out.upper.insert(out.upper.begin() + ib, v);
            if (whole) {
                const std::uint8_t f = out.lower[a];
                out.lower.erase(out.lower.begin() + ia);
                out.lower.insert(out.lower.begin() + ib, f);
            }
            break;
        }
        case Move::reverse_node:
        case Move::reverse_whole:
            std::reverse(out.upper.begin() + ia, out.upper.begin() + ib + 1);
            if (whole) std::reverse(out.lower.begin() + ia, out.lower.begin() + ib + 1);
            break;
        case Move::remove_sortie:
            out.lower[a] = 0;
            break;
        case Move::add_sortie:
            out.lower[a] = 1;
            break;
    }
    return out;
}

}  // namespace detail

/// Every concrete target of a move on `enc`, as (a, b) index pairs, in a fixed order.
inline std::vector<std::pair<std::size_t, std::size_t>> move_targets(const Encoding& enc, int move,
                                                                    const Instance& inst) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const auto pos = detail::customer_positions(enc);
    switch (static_cast<Move>(move)) {
        case Move::swap_node:
        case Move::swap_whole:
        case Move::reverse_node:
        case Move::reverse_whole:
            for (std::size_t x = 0; x < pos.size(); ++x) {
                for (std::size_t y = x + 1; y < pos.size(); ++y) out.emplace_back(pos[x], pos[y]);
            }
            break;
        case Move::insert_node:
        case Move::insert_whole:
            // After erasing index a the encoding has size-1 entries; landing
            // spots 1..size-2 keep the leading and trailing depots in place.
            for (std::size_t a : pos) {
                for (std::size_t b = 1; b + 1 < enc.upper.size(); ++b) {
                    if (b != a) out.emplace_back(a, b);
                }
            }
            break;
        case Move::remove_sortie:
            for (std::size_t a : pos) {
                if (enc.lower[a] == 1) out.emplace_back(a, a);
            }
            break;
        case Move::add_sortie:
            for (std::size_t a : pos) {
                if (enc.lower[a] == 0 && inst.drone_eligible(enc.upper[a])) out.emplace_back(a, a);
            }
            break;
        default:
            throw InvariantError("move id must be in 1..8");
    }
    return out;
}

/// Applies one concrete target and repairs the result.
inline MoveResult apply_move_at(const Encoding& enc, int move, std::size_t a, std::size_t b, const Instance& inst) {
    MoveResult r;
    r.encoding = repair(detail::apply_concrete(enc, move, a, b), inst);
    r.applied = !(r.encoding == enc);
    return r;
}

/// Applies move `move` (1..8) at a uniformly drawn target.
inline MoveResult apply_move(const Encoding& enc, int move, Rng& rng, const Instance& inst) {
    if (move < 1 || move > kMoveCount) throw InvariantError("move id must be in 1..8");
    const auto pos = detail::customer_positions(enc);
    std::size_t a = 0, b = 0;
    switch (static_cast<Move>(move)) {
        case Move::swap_node:
        case Move::swap_whole:
        case Move::reverse_node:
        case Move::reverse_whole: {
            if (pos.size() < 2) return {enc, false};
            const std::size_t x = uniform_index(rng, pos.size());
            std::size_t y = uniform_index(rng, pos.size() - 1);
            if (y >= x) ++y;
            a = std::min(pos[x], pos[y]);
            b = std::max(pos[x], pos[y]);
            break;
        }
        case Move::insert_node:
        case Move::insert_whole: {
            if (pos.empty() || enc.upper.size() < 4) return {enc, false};
            a = pos[uniform_index(rng, pos.size())];
            b = 1 + uniform_index(rng, enc.upper.size() - 3);  // 1..size-3
            if (b >= a) ++b;                                     // skip the no-op landing spot
            if (b > enc.upper.size() - 2) return {enc, false};
            break;
        }
        case Move::remove_sortie:
        case Move::add_sortie: {
            std::vector<std::size_t> cand;
            for (std::size_t i : pos) {
                if (move == static_cast<int>(Move::remove_sortie) ? enc.lower[i] == 1
                                                                 : enc.lower[i] == 0 && inst.drone_eligible(enc.upper[i])) {
                    cand.push_back(i);
                }
            }
            if (cand.empty()) return {enc, false};
            a = b = cand[uniform_index(rng, cand.size())];
            break;
        }
    }
    return apply_move_at(enc, move, a, b, inst);
}

}  // namespace vrpdt
