#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "rembo/geometry.hpp"
#include "rembo/types.hpp"

namespace rembo {

enum class KernelFamily { SquaredExponential, Matern52 };

/// Where distances between two points of Y are measured.
enum class DistanceMode {
    YDist,    ///< |y - y'| in R^d                     (k_Y)
    XDist,    ///< |p_X(Ay) - p_X(Ay')| in R^D         (k_X)
    PsiDist,  ///< |Psi(y) - Psi(y')| in R^D           (k_Psi)
};

/// Stationary isotropic kernel: variance * correlation(distance / lengthscale).
struct KernelSpec {
    KernelFamily family = KernelFamily::Matern52;
    double variance = 1.0;
    double lengthscale = 1.0;
    DistanceMode mode = DistanceMode::PsiDist;

    /// Throws std::invalid_argument unless variance and lengthscale are
    /// finite and positive.
    void validate() const;
};

std::string to_string(KernelFamily family);
std::string to_string(DistanceMode mode);
/// Accepts "kY", "kX", "kPsi" (and the enum spellings).
DistanceMode parse_distance_mode(std::string_view name);
KernelFamily parse_kernel_family(std::string_view name);

nlohmann::json to_json(const KernelSpec& spec);
KernelSpec kernel_spec_from_json(const nlohmann::json& j);

/// Correlation at distance r >= 0: exactly 1 at r = 0, strictly decreasing.
///   SE:          exp(-r^2 / (2 l^2))
///   Matern 5/2:  (1 + s + s^2/3) exp(-s),  s = sqrt(5) r / l
double correlation(const KernelSpec& spec, double r);

/// The point whose Euclidean distances define the kernel: y itself,
/// p_X(Ay), or Psi(y).
Vector kernel_image(DistanceMode mode, const Embedding& e, const LowPoint& y);

/// Images of every row of `ys`, one per row. OpenMP over rows.
PointSet kernel_images(DistanceMode mode, const Embedding& e, const PointSet& ys);
PointSet kernel_images_serial(DistanceMode mode, const Embedding& e, const PointSet& ys);

double effective_distance(const KernelSpec& spec, const Embedding& e, const LowPoint& y1,
                          const LowPoint& y2);

/// Symmetric matrix of Euclidean distances between rows. Only the upper
/// triangle is computed; the lower one is mirrored, so the result equals its
/// transpose exactly. OpenMP over rows.
Matrix pairwise_distances(const PointSet& images);
Matrix pairwise_distances_serial(const PointSet& images);

/// variance * correlation(D_ij) + nugget * [i == j], from a distance matrix.
Matrix covariance_from_distances(const KernelSpec& spec, const Matrix& distances, double nugget);
Matrix covariance_from_distances_serial(const KernelSpec& spec, const Matrix& distances,
                                        double nugget);

/// K_ij = variance * correlation(effective_distance(y_i, y_j)) + nugget [i == j].
Matrix covariance_matrix(const KernelSpec& spec, const Embedding& e, const PointSet& ys,
                         double nugget);
Matrix covariance_matrix_serial(const KernelSpec& spec, const Embedding& e, const PointSet& ys,
                                double nugget);

}  // namespace rembo
