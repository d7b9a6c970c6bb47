#include "rembo/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rembo {

Box Box::symmetric(int dim, double half_width) {
    if (dim < 1 || !(half_width > 0.0) || !std::isfinite(half_width)) {
        throw std::invalid_argument("Box::symmetric: need dim >= 1 and a finite half width > 0");
    }
    return Box{Vector::Constant(dim, -half_width), Vector::Constant(dim, half_width)};
}

bool Box::contains(const Vector& p) const {
    if (p.size() != lower.size()) return false;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!(p[i] >= lower[i] && p[i] <= upper[i])) return false;
    }
    return true;
}

Vector Box::from_unit(const Vector& u) const {
    Vector p = lower.array() + u.array() * (upper - lower).array();
    // Guard against rounding past the upper face.
    return p.cwiseMax(lower).cwiseMin(upper);
}

PointSet latin_hypercube(int n, const Box& box, Rng& rng) {
    if (n < 1) throw std::invalid_argument("latin_hypercube: n must be >= 1");
    const int dim = box.dim();
    PointSet unit(n, dim);
    std::vector<int> strata(n);
    for (int j = 0; j < dim; ++j) {
        std::iota(strata.begin(), strata.end(), 0);
        // Fisher-Yates with our own generator keeps the permutation portable.
        for (int i = n - 1; i > 0; --i) {
            std::swap(strata[i], strata[rng.below(static_cast<std::size_t>(i) + 1)]);
        }
        for (int i = 0; i < n; ++i) {
            unit(i, j) = (strata[i] + rng.uniform()) / n;
        }
    }
    PointSet out(n, dim);
    for (int i = 0; i < n; ++i) out.row(i) = box.from_unit(unit.row(i).transpose()).transpose();
    return out;
}

namespace {

constexpr std::array<int, 64> kPrimes = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,
    59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131,
    137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

double radical_inverse(std::uint64_t i, int base) {
    double inv_base = 1.0 / base;
    double f = inv_base;
    double r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv_base;
    }
    return r;
}

}  // namespace

PointSet shifted_halton(int n, int dim, std::uint64_t seed) {
    if (n < 0 || dim < 1 || dim > static_cast<int>(kPrimes.size())) {
        throw std::invalid_argument("shifted_halton: dim must be in [1, 64]");
    }
    Rng rng(seed, 0x4a17);
    Vector shift(dim);
    for (int j = 0; j < dim; ++j) shift[j] = rng.uniform();
    PointSet out(n, dim);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < dim; ++j) {
            double v = radical_inverse(static_cast<std::uint64_t>(i) + 1, kPrimes[j]) + shift[j];
            out(i, j) = v >= 1.0 ? v - 1.0 : v;
        }
    }
    return out;
}

std::vector<int> greedy_maximin(const PointSet& points, int k) {
    const int n = static_cast<int>(points.rows());
    if (k < 1 || k > n) throw std::invalid_argument("greedy_maximin: need 1 <= k <= rows");
    if (k == n) {
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        return all;
    }
    std::vector<int> chosen;
    chosen.reserve(k);
    if (k == 1) return {0};

    int a = 0, b = 1;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double dist = (points.row(i) - points.row(j)).norm();
            if (dist > best) {
                best = dist;
                a = i;
                b = j;
            }
        }
    }
    chosen.push_back(a);
    chosen.push_back(b);

    std::vector<double> nearest(n);
    std::vector<bool> taken(n, false);
    taken[a] = taken[b] = true;
    for (int i = 0; i < n; ++i) {
        nearest[i] = std::min((points.row(i) - points.row(a)).norm(),
                              (points.row(i) - points.row(b)).norm());
    }
    while (static_cast<int>(chosen.size()) < k) {
        int pick = -1;
        double far = -1.0;
        for (int i = 0; i < n; ++i) {
            if (!taken[i] && nearest[i] > far) {
                far = nearest[i];
                pick = i;
            }
        }
        taken[pick] = true;
        chosen.push_back(pick);
        for (int i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], (points.row(i) - points.row(pick)).norm());
        }
    }
    return chosen;
}

double min_pairwise_distance(const PointSet& points) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < points.rows(); ++j) {
            best = std::min(best, (points.row(i) - points.row(j)).norm());
        }
    }
    return best;
}

}  // namespace rembo
