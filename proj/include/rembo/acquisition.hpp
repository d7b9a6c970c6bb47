#pragma once

#include <cstdint>

#include "rembo/gp.hpp"
#include "rembo/sampling.hpp"
#include "rembo/types.hpp"

namespace rembo {

/// Closed-form Expected Improvement for minimization,
///   EI = (f_min - mean) Phi(u) + sd phi(u),  u = (f_min - mean) / sd,
/// with the sd = 0 limit max(f_min - mean, 0).
double expected_improvement(double mean, double sd, double f_min);

/// EI of every candidate row against the model's incumbent. OpenMP over rows.
Vector expected_improvement_batch(const GpModel& model, const PointSet& candidates);
Vector expected_improvement_batch_serial(const GpModel& model, const PointSet& candidates);

struct AcqResult {
    LowPoint y_star;
    double ei_value = 0.0;
    /// EI evaluations spent; never exceeds the budget.
    int n_evals = 0;
};

/// Maximizes EI over `box` with a fixed number of EI evaluations:
/// floor(0.8 budget) shifted-Halton candidates, then box-bounded coordinate
/// descent from the best five candidates, each with at most 100 evaluations
/// of the remainder. Deterministic in (model, box, budget, seed); ties go to
/// the lowest candidate index.
AcqResult maximize_ei(const GpModel& model, const Box& box, int budget, std::uint64_t seed);

}  // namespace rembo
