#include "rembo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace rembo {

namespace {

constexpr int kPolishStarts = 5;
constexpr int kPolishEvalsPerStart = 100;
constexpr double kSampleFraction = 0.8;
// Initial coordinate step as a fraction of the box width.
constexpr double kInitialStep = 0.05;
constexpr double kMinStep = 1e-7;

double normal_pdf(double u) {
    return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double u) {
    return 0.5 * std::erfc(-u / std::numbers::sqrt2);
}

// Coordinate descent (ascent on EI) with shrinking steps, clamped to the box.
struct Polished {
    LowPoint y;
    double ei;
    int evals;
};

Polished polish(const GpModel& model, const Box& box, LowPoint y, double ei, double f_min,
                int budget) {
    const int dim = box.dim();
    Vector step = kInitialStep * (box.upper - box.lower);
    int used = 0;
    while (used < budget && step.maxCoeff() > kMinStep) {
        bool improved = false;
        for (int j = 0; j < dim && used < budget; ++j) {
            for (double dir : {1.0, -1.0}) {
                if (used >= budget) break;
                LowPoint trial = y;
                trial[j] = std::clamp(y[j] + dir * step[j], box.lower[j], box.upper[j]);
                if (trial[j] == y[j]) continue;
                const Prediction p = model.predict(trial);
                const double value = expected_improvement(p.mean, p.sd, f_min);
                ++used;
                if (value > ei) {
                    y = std::move(trial);
                    ei = value;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return {std::move(y), ei, used};
}

}  // namespace

double expected_improvement(double mean, double sd, double f_min) {
    const double gain = f_min - mean;
    if (!(sd > 0.0)) return std::max(gain, 0.0);
    const double u = gain / sd;
    const double ei = gain * normal_cdf(u) + sd * normal_pdf(u);
    return std::max(ei, 0.0);
}

Vector expected_improvement_batch_serial(const GpModel& model, const PointSet& candidates) {
    const double f_min = model.best_observation();
    Vector out(candidates.rows());
    for (Eigen::Index i = 0; i < candidates.rows(); ++i) {
        const Prediction p = model.predict(candidates.row(i).transpose());
        out[i] = expected_improvement(p.mean, p.sd, f_min);
    }
    return out;
}

Vector expected_improvement_batch(const GpModel& model, const PointSet& candidates) {
    const double f_min = model.best_observation();
    Vector out(candidates.rows());
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < candidates.rows(); ++i) {
        const Prediction p = model.predict(candidates.row(i).transpose());
        out[i] = expected_improvement(p.mean, p.sd, f_min);
    }
    return out;
}

AcqResult maximize_ei(const GpModel& model, const Box& box, int budget, std::uint64_t seed) {
    if (budget < 1) throw std::invalid_argument("maximize_ei: budget must be >= 1");
    if (box.dim() != model.embedding().low_dim()) {
        throw std::invalid_argument("maximize_ei: box dimension does not match the model");
    }
    const int n_samples =
        std::max(1, static_cast<int>(std::floor(kSampleFraction * static_cast<double>(budget))));
    PointSet candidates = shifted_halton(n_samples, box.dim(), seed);
    for (int i = 0; i < n_samples; ++i) {
        candidates.row(i) = box.from_unit(candidates.row(i).transpose()).transpose();
    }
    const Vector ei = expected_improvement_batch(model, candidates);

    // Stable ordering by decreasing EI, lowest index first among ties.
    std::vector<int> order(n_samples);
    std::iota(order.begin(), order.end(), 0);
    const int n_starts = std::min(kPolishStarts, n_samples);
    std::partial_sort(order.begin(), order.begin() + n_starts, order.end(),
                      [&](int a, int b) { return ei[a] > ei[b] || (ei[a] == ei[b] && a < b); });

    AcqResult best{candidates.row(order[0]).transpose(), ei[order[0]], n_samples};
    const int remaining = budget - n_samples;
    const double f_min = model.best_observation();
    for (int s = 0; s < n_starts && remaining > 0; ++s) {
        // Spread the remainder evenly; early starts absorb the rounding.
        const int share = std::min(kPolishEvalsPerStart,
                                   remaining / n_starts + (s < remaining % n_starts ? 1 : 0));
        if (share == 0) continue;
        const int idx = order[s];
        Polished p = polish(model, box, candidates.row(idx).transpose(), ei[idx], f_min, share);
        best.n_evals += p.evals;
        if (p.ei > best.ei_value) {
            best.y_star = std::move(p.y);
            best.ei_value = p.ei;
        }
    }
    return best;
}

}  // namespace rembo
