#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "rembo/geometry.hpp"
#include "rembo/kernels.hpp"
#include "rembo/types.hpp"

namespace rembo {

class GpFitError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Design points (one per row of `ys`) and their observations g(y_i).
struct Dataset {
    PointSet ys;
    Vector zs;

    int size() const { return static_cast<int>(zs.size()); }
    /// Throws std::invalid_argument on empty data, mismatched lengths or
    /// non-finite values.
    void validate() const;
};

struct Prediction {
    double mean = 0.0;
    double sd = 0.0;
};

/// Maximum-likelihood settings. Nuggets are relative to the process variance.
struct FitOptions {
    double nugget_rel = 1e-8;
    int n_starts = 10;
    int evals_per_start = 200;
    /// Subtract the sample mean of zs before fitting and add it back when
    /// predicting. Off means a literal zero prior mean.
    bool center = true;
    std::uint64_t seed = 0;
};

/// Relative nugget ladder used when a factorization fails.
inline constexpr double kNuggetLadder[] = {1e-8, 1e-6, 1e-4};

/// Zero-mean GP conditioned on a dataset. Immutable; predict() is safe to
/// call from several threads.
class GpModel {
public:
    /// Conditions with fixed hyperparameters. `nugget` is absolute and `offset`
    /// is the constant prior mean. Throws GpFitError if K is not factorizable.
    static GpModel condition(Dataset data, const KernelSpec& spec,
                             std::shared_ptr<const Embedding> embedding, double nugget,
                             double offset = 0.0);

    Prediction predict(const LowPoint& y) const;
    /// Same as predict() but for a point whose kernel image is already known.
    Prediction predict_image(const Vector& image) const;

    const Dataset& data() const { return data_; }
    const KernelSpec& spec() const { return spec_; }
    const Embedding& embedding() const { return *embedding_; }
    const PointSet& images() const { return images_; }
    /// Lower Cholesky factor of K (nugget included).
    const Matrix& chol() const { return chol_; }
    const Vector& alpha() const { return alpha_; }
    double nugget() const { return nugget_; }
    double offset() const { return offset_; }
    /// Log marginal likelihood of the (offset-removed) observations.
    double log_likelihood() const { return log_likelihood_; }
    /// Smallest observation, the incumbent for Expected Improvement.
    double best_observation() const { return data_.zs.minCoeff(); }

    nlohmann::json summary() const;

private:
    GpModel() = default;

    Dataset data_;
    KernelSpec spec_;
    std::shared_ptr<const Embedding> embedding_;
    PointSet images_;
    Matrix chol_;
    Vector alpha_;
    double nugget_ = 0.0;
    double offset_ = 0.0;
    double log_likelihood_ = 0.0;
};

/// Fits variance and lengthscale by maximum likelihood (family and mode come
/// from `spec_template`), escalating the nugget along kNuggetLadder when no
/// candidate can be factorized. Requires n >= 2.
GpModel fit(const Dataset& data, const KernelSpec& spec_template,
            std::shared_ptr<const Embedding> embedding, const FitOptions& options = {});

/// Gaussian log density of zs under N(0, K + nugget I), evaluated through the
/// Cholesky factor. Returns -infinity when K + nugget I is not positive definite.
double log_marginal_likelihood(const Dataset& data, const KernelSpec& spec, const Embedding& e,
                               double nugget);

/// Predictions for every row of `ys`. OpenMP over rows.
std::vector<Prediction> predict_batch(const GpModel& model, const PointSet& ys);
std::vector<Prediction> predict_batch_serial(const GpModel& model, const PointSet& ys);

/// Median of the off-diagonal entries of a distance matrix; 1 when all are 0.
double median_pairwise_distance(const Matrix& distances);

}  // namespace rembo
