#pragma once

#include <cstdint>
#include <vector>

#include "rembo/rng.hpp"
#include "rembo/types.hpp"

namespace rembo {

/// Axis-aligned box [lower, upper] in R^d.
struct Box {
    Vector lower;
    Vector upper;

    static Box symmetric(int dim, double half_width);

    int dim() const { return static_cast<int>(lower.size()); }
    bool contains(const Vector& p) const;
    /// Maps a point of the unit cube onto the box.
    Vector from_unit(const Vector& u) const;
};

/// Random Latin hypercube of n points in the box; one point per stratum in
/// every coordinate.
PointSet latin_hypercube(int n, const Box& box, Rng& rng);

/// First n points of the Halton sequence in [0,1)^dim, shifted modulo 1 by a
/// seeded random vector (Cranley-Patterson rotation). Supports dim <= 64.
PointSet shifted_halton(int n, int dim, std::uint64_t seed);

/// Greedy maximin selection of k rows of `points`: start from the farthest
/// pair, then repeatedly add the row whose distance to the chosen set is
/// largest. Ties resolve to the lowest row index.
std::vector<int> greedy_maximin(const PointSet& points, int k);

/// Smallest Euclidean distance between two distinct rows.
double min_pairwise_distance(const PointSet& points);

}  // namespace rembo
