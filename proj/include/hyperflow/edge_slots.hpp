#pragma once

#include <array>
#include <cstdlib>

namespace hyperflow {

// A (truncated) tetrahedron has vertices 0..3 and six edges, one per vertex
// pair. All length/angle 6-vectors in this library use the fixed slot order
//
//   slot:  0     1     2     3     4     5
//   pair: {0,1} {0,2} {0,3} {1,2} {1,3} {2,3}
//
// so that slot s and slot 5 - s always hold opposite edges.

inline constexpr int kNumEdgeSlots = 6;

inline constexpr std::array<std::array<int, 2>, 6> kSlotVertices{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

// Slot index of the unordered pair {a, b}, a != b, both in 0..3.
constexpr int slot_of(int a, int b)
{
    if (a > b) {
        const int t = a;
        a = b;
        b = t;
    }
    // pairs with a == 0 come first, then {1,2},{1,3},{2,3}
    if (a == 0) return b - 1;
    if (a == 1) return b + 1;
    return 5;
}

constexpr int opposite_slot(int s) { return 5 - s; }

// Apply a vertex relabeling (a permutation of 0..3) to the six slots:
// result[slot_of(p[a], p[b])] = values[slot_of(a, b)].
template <class Vec>
Vec permute_slots(const Vec& values, const std::array<int, 4>& p)
{
    Vec out = values;
    for (int s = 0; s < kNumEdgeSlots; ++s) {
        const auto [a, b] = kSlotVertices[static_cast<std::size_t>(s)];
        out[slot_of(p[static_cast<std::size_t>(a)], p[static_cast<std::size_t>(b)])] = values[s];
    }
    return out;
}

}  // namespace hyperflow
