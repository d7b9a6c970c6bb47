#pragma once

#include <Eigen/Dense>

namespace rembo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point of the low-dimensional search domain Y (length d).
using LowPoint = Eigen::VectorXd;
/// A point of the ambient space R^D (length D).
using HighPoint = Eigen::VectorXd;

/// Batches of points are stored one point per row.
using PointSet = Eigen::MatrixXd;

}  // namespace rembo
