#include "rembo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rembo/rng.hpp"

namespace rembo {

namespace {

constexpr int kMaxResample = 8;
// Reciprocal condition estimate of A^T A below which A counts as rank deficient.
constexpr double kMinGramConditioning = 1e-13;

std::optional<double> compute_gamma(const Matrix& a) {
    double min_row = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
        min_row = std::min(min_row, a.row(j).cwiseAbs().sum());
    }
    if (!(min_row > 0.0)) return std::nullopt;
    return 1.0 / min_row;
}

}  // namespace

Embedding::Embedding(Matrix a, std::uint64_t seed) : a_(std::move(a)), seed_(seed) {
    if (a_.rows() < 1 || a_.cols() < 1 || a_.cols() > a_.rows()) {
        throw EmbeddingError("Embedding: need 1 <= d <= D, got D=" + std::to_string(a_.rows()) +
                             " d=" + std::to_string(a_.cols()));
    }
    if (!a_.allFinite()) throw EmbeddingError("Embedding: non-finite entry in A");

    const Matrix gram = a_.transpose() * a_;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) {
        throw EmbeddingError("Embedding: A^T A is not positive definite (rank-deficient A)");
    }
    const Vector diag = Matrix(llt.matrixL()).diagonal();
    const double ratio = diag.minCoeff() / diag.maxCoeff();
    if (!(ratio * ratio > kMinGramConditioning)) {
        throw EmbeddingError("Embedding: A^T A is numerically singular (rank-deficient A)");
    }

    // proj = W^T W with W = L^{-1} A^T; fill the upper triangle and mirror it.
    const Matrix w = llt.matrixL().solve(a_.transpose());
    const Eigen::Index n = a_.rows();
    proj_.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            proj_(i, j) = w.col(i).dot(w.col(j));
            proj_(j, i) = proj_(i, j);
        }
    }
    gamma_ = compute_gamma(a_);
}

Embedding sample_embedding(int high_dim, int low_dim, std::uint64_t seed) {
    if (low_dim < 1 || low_dim > high_dim) {
        throw std::invalid_argument("sample_embedding: need 1 <= d <= D");
    }
    for (int attempt = 0; attempt < kMaxResample; ++attempt) {
        Rng rng(seed, static_cast<std::uint64_t>(attempt));
        Matrix a(high_dim, low_dim);
        for (int j = 0; j < high_dim; ++j) {
            for (int i = 0; i < low_dim; ++i) a(j, i) = rng.normal();
        }
        try {
            return Embedding(std::move(a), seed);
        } catch (const EmbeddingError&) {
            // fall through to the next stream
        }
    }
    throw EmbeddingError("sample_embedding: " + std::to_string(kMaxResample) +
                         " consecutive rank-deficient draws for seed " + std::to_string(seed));
}

HighPoint convex_project(const HighPoint& p) {
    return p.cwiseMax(-1.0).cwiseMin(1.0);
}

HighPoint back_project(const Embedding& e, const HighPoint& p) {
    return e.projector() * p;
}

WarpResult warp_detailed(const Embedding& e, const LowPoint& y) {
    WarpResult out;
    HighPoint ay = e.embed(y);
    if (ay.cwiseAbs().maxCoeff() <= 1.0 + kInsideTolerance) {
        out.image = std::move(ay);
        out.interior = true;
        return out;
    }
    const HighPoint clamped = convex_project(ay);
    HighPoint z = back_project(e, clamped);
    if (z.norm() <= kDegenerateNorm) {
        out.image = std::move(z);
        out.degenerate = true;
        return out;
    }
    const HighPoint pivot = z / z.cwiseAbs().maxCoeff();
    const double stretch = (clamped - pivot).norm();
    out.image = pivot + stretch * (pivot / pivot.norm());
    return out;
}

HighPoint warp(const Embedding& e, const LowPoint& y) {
    return warp_detailed(e, y).image;
}

double gamma_bound(const Embedding& e) {
    if (!e.gamma()) {
        throw EmbeddingError("gamma_bound: A has a zero row; that coordinate cannot be spanned");
    }
    return *e.gamma();
}

double gamma_bound(const Matrix& a) {
    const auto gamma = compute_gamma(a);
    if (!gamma) throw EmbeddingError("gamma_bound: A has a zero row; that coordinate cannot be spanned");
    return *gamma;
}

nlohmann::json to_json(const Embedding& e) {
    const Matrix& a = e.matrix();
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(a.size()));
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
        for (Eigen::Index i = 0; i < a.cols(); ++i) flat.push_back(a(j, i));
    }
    return {{"D", e.high_dim()}, {"d", e.low_dim()}, {"seed", e.seed()}, {"A", flat}};
}

Embedding embedding_from_json(const nlohmann::json& j) {
    const int high = j.at("D").get<int>();
    const int low = j.at("d").get<int>();
    const auto flat = j.at("A").get<std::vector<double>>();
    if (high < 1 || low < 1 || flat.size() != static_cast<std::size_t>(high) * low) {
        throw EmbeddingError("embedding_from_json: A has the wrong number of entries");
    }
    Matrix a(high, low);
    for (int r = 0; r < high; ++r) {
        for (int c = 0; c < low; ++c) a(r, c) = flat[static_cast<std::size_t>(r) * low + c];
    }
    return Embedding(std::move(a), j.value("seed", std::uint64_t{0}));
}

}  // namespace rembo
