#include "rembo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <string>

#include "rembo/rng.hpp"

namespace rembo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

// MLE search box, relative to the data-driven scales.
constexpr double kLengthscaleLo = 1e-2;
constexpr double kLengthscaleHi = 10.0;
constexpr double kVarianceLo = 1e-3;
constexpr double kVarianceHi = 1e3;

bool factorize(const Matrix& k, Eigen::LLT<Matrix>& llt) {
    llt.compute(k);
    if (llt.info() != Eigen::Success) return false;
    const auto diag = llt.matrixLLT().diagonal();
    return (diag.array() > 0.0).all() && diag.allFinite();
}

double gaussian_log_density(const Eigen::LLT<Matrix>& llt, const Vector& z) {
    const Vector v = llt.matrixL().solve(z);
    const double log_det_half = llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * v.squaredNorm() - log_det_half - static_cast<double>(z.size()) * kHalfLog2Pi;
}

// Log likelihood with the variance profiled out: K = s2 (R + rel I) gives
// s2_hat = z^T (R + rel I)^{-1} z / n, clamped to the variance bounds.
struct ProfiledLikelihood {
    const KernelSpec& base;
    const Matrix& distances;
    const Vector& z;
    double nugget_rel;
    double var_lo;
    double var_hi;
    int evals = 0;

    struct Value {
        double log_likelihood = kNegInf;
        double variance = 1.0;
    };

    Value operator()(double log_lengthscale) {
        ++evals;
        KernelSpec unit = base;
        unit.variance = 1.0;
        unit.lengthscale = std::exp(log_lengthscale);
        Eigen::LLT<Matrix> llt;
        if (!factorize(covariance_from_distances(unit, distances, nugget_rel), llt)) return {};
        const Vector v = llt.matrixL().solve(z);
        const double q = v.squaredNorm();
        const double n = static_cast<double>(z.size());
        const double s2 = std::clamp(q / n, var_lo, var_hi);
        const double log_det_half = llt.matrixLLT().diagonal().array().log().sum();
        const double ll = -0.5 * q / s2 - 0.5 * n * std::log(s2) - log_det_half - n * kHalfLog2Pi;
        if (!std::isfinite(ll)) return {};
        return {ll, s2};
    }
};

struct SearchPoint {
    double log_lengthscale;
    ProfiledLikelihood::Value value;
};

// Bounded pattern search in one dimension with halving steps.
SearchPoint polish(ProfiledLikelihood& objective, double start, double lo, double hi, int budget) {
    SearchPoint best{start, objective(start)};
    int used = 1;
    double step = 0.5;
    while (used < budget && step > 1e-4) {
        bool moved = false;
        for (double dir : {1.0, -1.0}) {
            if (used >= budget) break;
            const double trial = std::clamp(best.log_lengthscale + dir * step, lo, hi);
            if (trial == best.log_lengthscale) continue;
            auto value = objective(trial);
            ++used;
            if (value.log_likelihood > best.value.log_likelihood) {
                best = {trial, value};
                moved = true;
                break;
            }
        }
        if (!moved) step *= 0.5;
    }
    return best;
}

}  // namespace

void Dataset::validate() const {
    if (zs.size() < 1) throw std::invalid_argument("Dataset: need at least one observation");
    if (ys.rows() != zs.size()) {
        throw std::invalid_argument("Dataset: ys has " + std::to_string(ys.rows()) +
                                    " rows but zs has " + std::to_string(zs.size()) + " entries");
    }
    if (!ys.allFinite() || !zs.allFinite()) {
        throw std::invalid_argument("Dataset: non-finite values");
    }
}

GpModel GpModel::condition(Dataset data, const KernelSpec& spec,
                           std::shared_ptr<const Embedding> embedding, double nugget,
                           double offset) {
    data.validate();
    spec.validate();
    if (!embedding) throw std::invalid_argument("GpModel::condition: null embedding");
    if (data.ys.cols() != embedding->low_dim()) {
        throw std::invalid_argument("GpModel::condition: points do not match the embedding dimension");
    }
    if (!(nugget >= 0.0)) throw std::invalid_argument("GpModel::condition: nugget must be >= 0");

    GpModel model;
    model.images_ = kernel_images(spec.mode, *embedding, data.ys);
    const Matrix k = covariance_from_distances(spec, pairwise_distances(model.images_), nugget);
    Eigen::LLT<Matrix> llt;
    if (!factorize(k, llt)) {
        throw GpFitError("GpModel::condition: covariance matrix is not positive definite (nugget " +
                         std::to_string(nugget) + ")");
    }
    const Vector centered = data.zs.array() - offset;
    model.chol_ = llt.matrixL();
    model.alpha_ = llt.solve(centered);
    model.log_likelihood_ = gaussian_log_density(llt, centered);
    model.data_ = std::move(data);
    model.spec_ = spec;
    model.embedding_ = std::move(embedding);
    model.nugget_ = nugget;
    model.offset_ = offset;
    return model;
}

Prediction GpModel::predict_image(const Vector& image) const {
    const Eigen::Index n = images_.rows();
    Vector k(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k[i] = spec_.variance * correlation(spec_, (images_.row(i).transpose() - image).norm());
    }
    Prediction p;
    p.mean = offset_ + k.dot(alpha_);
    const Vector v = chol_.triangularView<Eigen::Lower>().solve(k);
    p.sd = std::sqrt(std::max(0.0, spec_.variance - v.squaredNorm()));
    return p;
}

Prediction GpModel::predict(const LowPoint& y) const {
    if (y.size() != embedding_->low_dim()) {
        throw std::invalid_argument("GpModel::predict: point has the wrong dimension");
    }
    return predict_image(kernel_image(spec_.mode, *embedding_, y));
}

nlohmann::json GpModel::summary() const {
    return {{"kernel", to_json(spec_)},
            {"nugget", nugget_},
            {"offset", offset_},
            {"log_likelihood", log_likelihood_},
            {"n", data_.size()}};
}

double median_pairwise_distance(const Matrix& distances) {
    std::vector<double> values;
    const Eigen::Index n = distances.rows();
    values.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) values.push_back(distances(i, j));
    }
    if (values.empty()) return 1.0;
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    double median = *mid;
    if (values.size() % 2 == 0) {
        median = 0.5 * (median + *std::max_element(values.begin(), mid));
    }
    return median > 0.0 ? median : 1.0;
}

double log_marginal_likelihood(const Dataset& data, const KernelSpec& spec, const Embedding& e,
                               double nugget) {
    data.validate();
    spec.validate();
    const Matrix k = covariance_matrix(spec, e, data.ys, nugget);
    Eigen::LLT<Matrix> llt;
    if (!factorize(k, llt)) return kNegInf;
    return gaussian_log_density(llt, data.zs);
}

GpModel fit(const Dataset& data, const KernelSpec& spec_template,
            std::shared_ptr<const Embedding> embedding, const FitOptions& options) {
    data.validate();
    if (data.size() < 2) throw std::invalid_argument("fit: need at least two observations");
    if (!embedding) throw std::invalid_argument("fit: null embedding");

    const Matrix distances =
        pairwise_distances(kernel_images(spec_template.mode, *embedding, data.ys));
    const double median = median_pairwise_distance(distances);
    const double n = static_cast<double>(data.size());
    const double offset = options.center ? data.zs.mean() : 0.0;
    const Vector z = data.zs.array() - offset;
    double sample_var = data.size() > 1 ? (z.array() - z.mean()).square().sum() / (n - 1.0) : 0.0;
    if (!(sample_var > 0.0)) sample_var = 1.0;

    const double lo = std::log(kLengthscaleLo * median);
    const double hi = std::log(kLengthscaleHi * median);

    std::vector<double> starts{std::log(median)};
    Rng rng(options.seed, 0x6d6c65);
    const int extra = std::max(0, options.n_starts - 1);
    // One-dimensional Latin hypercube over the log-lengthscale range.
    std::vector<int> strata(extra);
    for (int i = 0; i < extra; ++i) strata[i] = i;
    for (int i = extra - 1; i > 0; --i) {
        std::swap(strata[i], strata[rng.below(static_cast<std::size_t>(i) + 1)]);
    }
    for (int i = 0; i < extra; ++i) {
        starts.push_back(lo + (hi - lo) * (strata[i] + rng.uniform()) / extra);
    }

    std::vector<double> ladder{options.nugget_rel};
    for (double rel : kNuggetLadder) {
        if (rel > ladder.back()) ladder.push_back(rel);
    }

    for (std::size_t rung = 0; rung < ladder.size(); ++rung) {
        ProfiledLikelihood objective{spec_template, distances, z, ladder[rung],
                                     kVarianceLo * sample_var, kVarianceHi * sample_var};
        SearchPoint best{starts.front(), {}};
        for (double start : starts) {
            SearchPoint found = polish(objective, start, lo, hi, options.evals_per_start);
            if (found.value.log_likelihood > best.value.log_likelihood) best = found;
        }
        if (std::isfinite(best.value.log_likelihood)) {
            KernelSpec spec = spec_template;
            spec.variance = best.value.variance;
            spec.lengthscale = std::exp(best.log_lengthscale);
            try {
                return GpModel::condition(data, spec, embedding, ladder[rung] * spec.variance, offset);
            } catch (const GpFitError&) {
                // escalate below
            }
        }
        if (rung + 1 < ladder.size()) {
            std::cerr << "warning: GP fit failed with relative nugget " << ladder[rung]
                      << ", retrying with " << ladder[rung + 1] << '\n';
        }
    }
    throw GpFitError("fit: covariance matrix not factorizable even with relative nugget " +
                     std::to_string(ladder.back()) + " (n=" + std::to_string(data.size()) +
                     ", coincident kernel images?)");
}

std::vector<Prediction> predict_batch_serial(const GpModel& model, const PointSet& ys) {
    std::vector<Prediction> out(static_cast<std::size_t>(ys.rows()));
    for (Eigen::Index i = 0; i < ys.rows(); ++i) out[i] = model.predict(ys.row(i).transpose());
    return out;
}

std::vector<Prediction> predict_batch(const GpModel& model, const PointSet& ys) {
    std::vector<Prediction> out(static_cast<std::size_t>(ys.rows()));
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < ys.rows(); ++i) out[i] = model.predict(ys.row(i).transpose());
    return out;
}

}  // namespace rembo
