#include "rembo/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace rembo {

namespace {
const double kSqrt5 = std::sqrt(5.0);
}

void KernelSpec::validate() const {
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        throw std::invalid_argument("KernelSpec: variance must be finite and > 0");
    }
    if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
        throw std::invalid_argument("KernelSpec: lengthscale must be finite and > 0");
    }
}

std::string to_string(KernelFamily family) {
    return family == KernelFamily::SquaredExponential ? "SquaredExponential" : "Matern52";
}

std::string to_string(DistanceMode mode) {
    switch (mode) {
        case DistanceMode::YDist: return "kY";
        case DistanceMode::XDist: return "kX";
        case DistanceMode::PsiDist: return "kPsi";
    }
    return "?";
}

DistanceMode parse_distance_mode(std::string_view name) {
    if (name == "kY" || name == "YDist") return DistanceMode::YDist;
    if (name == "kX" || name == "XDist") return DistanceMode::XDist;
    if (name == "kPsi" || name == "PsiDist") return DistanceMode::PsiDist;
    throw std::invalid_argument("unknown kernel mode '" + std::string(name) +
                                "' (expected kY, kX or kPsi)");
}

KernelFamily parse_kernel_family(std::string_view name) {
    if (name == "SquaredExponential" || name == "se") return KernelFamily::SquaredExponential;
    if (name == "Matern52" || name == "matern52") return KernelFamily::Matern52;
    throw std::invalid_argument("unknown kernel family '" + std::string(name) + "'");
}

nlohmann::json to_json(const KernelSpec& spec) {
    return {{"family", to_string(spec.family)},
            {"variance", spec.variance},
            {"lengthscale", spec.lengthscale},
            {"mode", to_string(spec.mode)}};
}

KernelSpec kernel_spec_from_json(const nlohmann::json& j) {
    KernelSpec spec;
    spec.family = parse_kernel_family(j.at("family").get<std::string>());
    spec.variance = j.at("variance").get<double>();
    spec.lengthscale = j.at("lengthscale").get<double>();
    spec.mode = parse_distance_mode(j.at("mode").get<std::string>());
    spec.validate();
    return spec;
}

double correlation(const KernelSpec& spec, double r) {
    if (spec.family == KernelFamily::SquaredExponential) {
        const double t = r / spec.lengthscale;
        return std::exp(-0.5 * t * t);
    }
    const double s = kSqrt5 * r / spec.lengthscale;
    return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

Vector kernel_image(DistanceMode mode, const Embedding& e, const LowPoint& y) {
    switch (mode) {
        case DistanceMode::YDist: return y;
        case DistanceMode::XDist: return convex_project(e.embed(y));
        case DistanceMode::PsiDist: return warp(e, y);
    }
    throw std::logic_error("kernel_image: bad mode");
}

PointSet kernel_images_serial(DistanceMode mode, const Embedding& e, const PointSet& ys) {
    const Eigen::Index n = ys.rows();
    const Eigen::Index width = mode == DistanceMode::YDist ? ys.cols() : e.high_dim();
    PointSet out(n, width);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.row(i) = kernel_image(mode, e, ys.row(i).transpose()).transpose();
    }
    return out;
}

PointSet kernel_images(DistanceMode mode, const Embedding& e, const PointSet& ys) {
    const Eigen::Index n = ys.rows();
    const Eigen::Index width = mode == DistanceMode::YDist ? ys.cols() : e.high_dim();
    PointSet out(n, width);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
        out.row(i) = kernel_image(mode, e, ys.row(i).transpose()).transpose();
    }
    return out;
}

double effective_distance(const KernelSpec& spec, const Embedding& e, const LowPoint& y1,
                          const LowPoint& y2) {
    return (kernel_image(spec.mode, e, y1) - kernel_image(spec.mode, e, y2)).norm();
}

Matrix pairwise_distances_serial(const PointSet& images) {
    const Eigen::Index n = images.rows();
    Matrix dist(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            dist(i, j) = (images.row(i) - images.row(j)).norm();
            dist(j, i) = dist(i, j);
        }
    }
    return dist;
}

Matrix pairwise_distances(const PointSet& images) {
    const Eigen::Index n = images.rows();
    Matrix dist(n, n);
#pragma omp parallel for schedule(dynamic, 8)
    for (Eigen::Index i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            dist(i, j) = (images.row(i) - images.row(j)).norm();
            dist(j, i) = dist(i, j);
        }
    }
    return dist;
}

Matrix covariance_from_distances_serial(const KernelSpec& spec, const Matrix& distances,
                                        double nugget) {
    const Eigen::Index n = distances.rows();
    Matrix k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = spec.variance * correlation(spec, 0.0) + nugget;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            k(i, j) = spec.variance * correlation(spec, distances(i, j));
            k(j, i) = k(i, j);
        }
    }
    return k;
}

Matrix covariance_from_distances(const KernelSpec& spec, const Matrix& distances, double nugget) {
    const Eigen::Index n = distances.rows();
    Matrix k(n, n);
#pragma omp parallel for schedule(dynamic, 8)
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = spec.variance * correlation(spec, 0.0) + nugget;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            k(i, j) = spec.variance * correlation(spec, distances(i, j));
            k(j, i) = k(i, j);
        }
    }
    return k;
}

Matrix covariance_matrix(const KernelSpec& spec, const Embedding& e, const PointSet& ys,
                         double nugget) {
    spec.validate();
    if (ys.rows() < 1) throw std::invalid_argument("covariance_matrix: need at least one point");
    return covariance_from_distances(spec, pairwise_distances(kernel_images(spec.mode, e, ys)),
                                     nugget);
}

Matrix covariance_matrix_serial(const KernelSpec& spec, const Embedding& e, const PointSet& ys,
                                double nugget) {
    spec.validate();
    if (ys.rows() < 1) throw std::invalid_argument("covariance_matrix: need at least one point");
    return covariance_from_distances_serial(
        spec, pairwise_distances_serial(kernel_images_serial(spec.mode, e, ys)), nugget);
}

}  // namespace rembo
