#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include <json.hpp>

#include "rembo/types.hpp"

namespace rembo {

/// Per-coordinate slack when deciding whether Ay already lies in [-1,1]^D.
inline constexpr double kInsideTolerance = 1e-12;
/// Back-projections shorter than this have no usable pivot direction.
inline constexpr double kDegenerateNorm = 1e-12;

class EmbeddingError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Random linear embedding y -> Ay of R^d into R^D, together with the
/// orthogonal projector onto Ran(A) and the gamma bound.
///
/// Immutable after construction. The d x d Gram matrix A^T A is factorized
/// exactly once, when the projector is built.
class Embedding {
public:
    /// Wraps an explicit matrix. Throws EmbeddingError when A^T A is not
    /// invertible to working precision.
    explicit Embedding(Matrix a, std::uint64_t seed = 0);

    int high_dim() const { return static_cast<int>(a_.rows()); }
    int low_dim() const { return static_cast<int>(a_.cols()); }
    std::uint64_t seed() const { return seed_; }

    const Matrix& matrix() const { return a_; }
    /// A (A^T A)^{-1} A^T, exactly symmetric.
    const Matrix& projector() const { return proj_; }
    /// Empty when some row of A is identically zero.
    std::optional<double> gamma() const { return gamma_; }

    HighPoint embed(const LowPoint& y) const { return a_ * y; }

private:
    Matrix a_;
    Matrix proj_;
    std::optional<double> gamma_;
    std::uint64_t seed_;
};

/// Draws A with i.i.d. N(0,1) entries (row-major order) from the stream keyed
/// by `seed`. A rank-deficient draw is replaced by the next stream, at most
/// a handful of times, before giving up.
Embedding sample_embedding(int high_dim, int low_dim, std::uint64_t seed);

/// Componentwise clamp onto X = [-1, 1]^D.
HighPoint convex_project(const HighPoint& p);

/// Orthogonal projection onto Ran(A). The result may leave X.
HighPoint back_project(const Embedding& e, const HighPoint& p);

struct WarpResult {
    HighPoint image;
    /// Ay was inside X and returned unchanged.
    bool interior = false;
    /// The back-projection vanished; `image` is that (zero) back-projection.
    bool degenerate = false;
};

/// Warping of a low-dimensional point:
///   Ay                                 if Ay lies in X,
///   z' + |p_X(Ay) - z'| z' / |z'|      otherwise,
/// where z = p_A(p_X(Ay)) and the pivot z' = z / max_i |z_i| is where the
/// segment [0, z] meets the boundary of X.
WarpResult warp_detailed(const Embedding& e, const LowPoint& y);
HighPoint warp(const Embedding& e, const LowPoint& y);

/// gamma with 1/gamma = min_j sum_i |A_ji|. Throws EmbeddingError if a row
/// of A is zero (that coordinate can never be spanned).
double gamma_bound(const Embedding& e);
/// Same bound for a bare matrix (rank is irrelevant to the formula).
double gamma_bound(const Matrix& a);

nlohmann::json to_json(const Embedding& e);
Embedding embedding_from_json(const nlohmann::json& j);

}  // namespace rembo
