#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "rembo/types.hpp"

namespace rembo {

class ObjectiveError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Six-dimensional Hartmann function on [0,1]^6 (four-term exponential sum).
/// Throws ObjectiveError outside the unit cube.
double hartmann6(std::span<const double> u);

/// Known minimizer of hartmann6, refined to double precision.
inline constexpr double kHartmann6Argmin[6] = {0.20168950909365746, 0.15001069354111374,
                                               0.4768739729250998,  0.2753324275220782,
                                               0.3116516172395686,  0.6573005345536702};

enum class CoreFunction { Hartmann6 };

/// A D-dimensional function on X = [-1,1]^D that reads only `axes()`.
/// Coordinate axes()[k] feeds core input k through u = (x + 1) / 2.
class ObjectiveInstance {
public:
    ObjectiveInstance(CoreFunction core, int high_dim, std::vector<int> axes, std::uint64_t seed);

    double operator()(const HighPoint& x) const;

    CoreFunction core() const { return core_; }
    int high_dim() const { return high_dim_; }
    int effective_dim() const { return static_cast<int>(axes_.size()); }
    const std::vector<int>& axes() const { return axes_; }
    std::uint64_t seed() const { return seed_; }

    /// The core minimizer lifted into X (non-axes coordinates set to 0).
    const HighPoint& argmin() const { return argmin_; }
    /// Value at argmin(); the reference for optimality gaps.
    double f_min() const { return f_min_; }

private:
    CoreFunction core_;
    int high_dim_;
    std::vector<int> axes_;
    std::uint64_t seed_;
    HighPoint argmin_;
    double f_min_;
};

/// Picks d_e distinct coordinates of R^D uniformly at random from `axes_seed`.
/// Throws ObjectiveError when D < d_e.
ObjectiveInstance embed_objective(CoreFunction core, int high_dim, std::uint64_t axes_seed);

/// best_observed - f_min. Values below f_min by at most 1e-9 clamp to 0;
/// anything lower throws ObjectiveError (f_min must be wrong).
double optimality_gap(const ObjectiveInstance& instance, double best_observed);

nlohmann::json to_json(const ObjectiveInstance& instance);
ObjectiveInstance objective_from_json(const nlohmann::json& j);

}  // namespace rembo
