#include "rembo/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rembo/rng.hpp"

namespace rembo {

namespace {

constexpr double kAlpha[4] = {1.0, 1.2, 3.0, 3.2};
constexpr double kA[4][6] = {{10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
                             {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
                             {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
                             {17.0, 8.0, 0.05, 10.0, 0.1, 14.0}};
constexpr double kP[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                             {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                             {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                             {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};

constexpr int kHartmannDim = 6;
constexpr double kGapTolerance = 1e-9;

int core_dim(CoreFunction) { return kHartmannDim; }

}  // namespace

double hartmann6(std::span<const double> u) {
    if (u.size() != kHartmannDim) throw ObjectiveError("hartmann6: expects 6 inputs");
    for (double v : u) {
        if (!(v >= 0.0 && v <= 1.0)) throw ObjectiveError("hartmann6: input outside [0,1]^6");
    }
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
        double inner = 0.0;
        for (int j = 0; j < kHartmannDim; ++j) {
            const double diff = u[j] - kP[i][j];
            inner += kA[i][j] * diff * diff;
        }
        total += kAlpha[i] * std::exp(-inner);
    }
    return -total;
}

ObjectiveInstance::ObjectiveInstance(CoreFunction core, int high_dim, std::vector<int> axes,
                                     std::uint64_t seed)
    : core_(core), high_dim_(high_dim), axes_(std::move(axes)), seed_(seed) {
    if (static_cast<int>(axes_.size()) != core_dim(core)) {
        throw ObjectiveError("ObjectiveInstance: need exactly " + std::to_string(core_dim(core)) +
                             " axes");
    }
    if (high_dim_ < core_dim(core)) {
        throw ObjectiveError("ObjectiveInstance: D=" + std::to_string(high_dim_) +
                             " is below the effective dimension " + std::to_string(core_dim(core)));
    }
    std::vector<int> sorted = axes_;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 0 || sorted.back() >= high_dim_ ||
        std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ObjectiveError("ObjectiveInstance: axes must be distinct indices in [0, D)");
    }
    argmin_ = HighPoint::Zero(high_dim_);
    for (int k = 0; k < kHartmannDim; ++k) argmin_[axes_[k]] = 2.0 * kHartmann6Argmin[k] - 1.0;
    // Evaluate through operator() so the gap at the lifted argmin is exactly 0.
    f_min_ = (*this)(argmin_);
}

double ObjectiveInstance::operator()(const HighPoint& x) const {
    if (x.size() != high_dim_) throw ObjectiveError("objective: point has the wrong dimension");
    double u[kHartmannDim];
    for (int k = 0; k < kHartmannDim; ++k) u[k] = (x[axes_[k]] + 1.0) / 2.0;
    return hartmann6(u);
}

ObjectiveInstance embed_objective(CoreFunction core, int high_dim, std::uint64_t axes_seed) {
    const int de = core_dim(core);
    if (high_dim < de) {
        throw ObjectiveError("embed_objective: D=" + std::to_string(high_dim) +
                             " must be at least " + std::to_string(de));
    }
    // Partial Fisher-Yates: the first d_e entries are a uniform random subset.
    std::vector<int> pool(high_dim);
    std::iota(pool.begin(), pool.end(), 0);
    Rng rng(axes_seed, 0xa7e5);
    for (int k = 0; k < de; ++k) {
        const std::size_t pick = k + rng.below(static_cast<std::size_t>(high_dim - k));
        std::swap(pool[k], pool[pick]);
    }
    pool.resize(de);
    return ObjectiveInstance(core, high_dim, std::move(pool), axes_seed);
}

double optimality_gap(const ObjectiveInstance& instance, double best_observed) {
    const double gap = best_observed - instance.f_min();
    if (gap >= 0.0) return gap;
    if (gap >= -kGapTolerance) return 0.0;
    throw ObjectiveError("optimality_gap: observed value " + std::to_string(best_observed) +
                         " lies below the known minimum " + std::to_string(instance.f_min()));
}

nlohmann::json to_json(const ObjectiveInstance& instance) {
    return {{"core", "hartmann6"},
            {"D", instance.high_dim()},
            {"axes", instance.axes()},
            {"seed", instance.seed()}};
}

ObjectiveInstance objective_from_json(const nlohmann::json& j) {
    if (j.at("core").get<std::string>() != "hartmann6") {
        throw ObjectiveError("objective_from_json: unknown core '" + j.at("core").get<std::string>() +
                             "'");
    }
    return ObjectiveInstance(CoreFunction::Hartmann6, j.at("D").get<int>(),
                             j.at("axes").get<std::vector<int>>(),
                             j.value("seed", std::uint64_t{0}));
}

}  // namespace rembo
