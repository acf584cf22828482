// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace fisherspike {

/// scale * X X^T as a full symmetric matrix.
Eigen::MatrixXd scaled_gram(const Eigen::MatrixXd& x, double scale);

/// Eigenvalues of A B^{-1} for symmetric A and symmetric positive definite
/// B, descending. Uses B = L L^T and the symmetric problem L^{-1} A L^{-T};
/// throws kSingular when B cannot be factored.
Eigen::VectorXd generalized_eigenvalues_desc(const Eigen::MatrixXd& a,
                                             const Eigen::MatrixXd& b);

/// Symmetric square root and inverse square root through the spectral
/// decomposition. Throws kSingular for non-positive eigenvalues in the
/// inverse variant.
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& a);
Eigen::MatrixXd symmetric_inverse_sqrt(const Eigen::MatrixXd& a);

}  // namespace fisherspike
