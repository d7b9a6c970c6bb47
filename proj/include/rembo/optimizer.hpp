#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rembo/geometry.hpp"
#include "rembo/kernels.hpp"
#include "rembo/objectives.hpp"
#include "rembo/sampling.hpp"
#include "rembo/types.hpp"

namespace rembo {

class DesignError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Half-width rule for the search box Y = [-w, w]^d.
struct YBox {
    enum class Rule { SqrtD, Gamma, Fixed };
    Rule rule = Rule::SqrtD;
    double value = 0.0;  ///< only for Rule::Fixed

    /// "sqrt_d", "gamma" or a positive real.
    static YBox parse(std::string_view text);
    std::string to_string() const;
    double resolve(const Embedding& e) const;
};

struct RunSeeds {
    std::uint64_t embedding = 0;
    std::uint64_t objective = 0;
    std::uint64_t design = 0;
    std::uint64_t acquisition = 0;
};

struct RunConfig {
    int high_dim = 25;
    int low_dim = 6;
    DistanceMode mode = DistanceMode::PsiDist;
    KernelFamily family = KernelFamily::Matern52;
    /// Total objective evaluations, initial design included.
    int budget = 250;
    /// 0 means 10 d.
    int n_init = 0;
    YBox y_box;
    RunSeeds seeds;
    double nugget_rel = 1e-8;
    /// EI evaluations per iteration; 0 means 2000 d.
    int ei_budget = 0;
    /// Redraw initial-design points whose p_X images coincide (kY / kX only).
    bool filter_duplicates = true;
    int mle_starts = 10;
    int mle_evals_per_start = 200;

    int resolved_n_init() const { return n_init > 0 ? n_init : 10 * low_dim; }
    int resolved_ei_budget() const { return ei_budget > 0 ? ei_budget : 2000 * low_dim; }
    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;
};

nlohmann::json to_json(const RunConfig& config);

/// Sup-norm distance under which two points of X count as the same point.
inline constexpr double kDuplicateTolerance = 1e-9;

/// Space-filling initial design in [-w, w]^d, w = config.y_box.resolve(e).
///   kY, kX: Latin hypercube of n_init points; points whose p_X(Ay) repeats an
///           earlier image are redrawn uniformly (at most 100 n_init redraws).
///   kPsi:   Latin hypercube of 5 n_init points, warped, then greedy maximin
///           selection of n_init points in the warped metric.
PointSet initial_design(const RunConfig& config, const Embedding& e);

struct Evaluation {
    int iteration = 0;
    LowPoint y;
    /// The point handed to the objective, p_X(Ay).
    HighPoint x;
    double value = 0.0;
    double best_so_far = 0.0;
};

struct FitRecord {
    int iteration = 0;
    double variance = 0.0;
    double lengthscale = 0.0;
    double nugget = 0.0;
    double log_likelihood = 0.0;
    double ei = 0.0;
    int ei_evals = 0;
};

struct RunRecord {
    RunConfig config;
    nlohmann::json embedding;
    nlohmann::json objective;
    double y_box = 0.0;
    double f_min = 0.0;
    std::vector<Evaluation> evaluations;
    std::vector<FitRecord> fits;
    double final_gap = 0.0;
    double wall_ms = 0.0;
    bool ok = true;
    std::string error;

    /// Pairs (i, j), i < j, of evaluations whose x coincide in sup norm.
    std::vector<std::pair<int, int>> duplicate_pairs(double tol = kDuplicateTolerance) const;
};

/// One REMBO trajectory on Hartmann6 embedded in R^D: design, then
/// (budget - n_init) rounds of fit -> maximize EI -> evaluate g(y) =
/// f(p_X(Ay)). Deterministic in the config. A GP failure stops the loop and
/// returns the partial record with ok = false.
RunRecord run(const RunConfig& config);

nlohmann::json to_json(const RunRecord& record);
/// One row per evaluation: iteration, y_1..y_d, x_1..x_D, value, best_so_far.
void write_csv(const RunRecord& record, std::ostream& out);

}  // namespace rembo
