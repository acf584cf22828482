// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fisherspike/linalg.hpp"

#include <cmath>

#include "fisherspike/error.hpp"

namespace fisherspike {

Eigen::MatrixXd scaled_gram(const Eigen::MatrixXd& x, double scale) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(x.rows(), x.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(x, scale);
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

Eigen::VectorXd generalized_eigenvalues_desc(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "generalized eigenproblem needs equal square matrices");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingular, "Cholesky factorization of the denominator failed");
  }
  const auto diag = llt.matrixLLT().diagonal();
  if (!(diag.minCoeff() > 1e-12 * diag.maxCoeff())) {
    throw Error(ErrorCode::kSingular, "denominator matrix is numerically singular");
  }
  const auto lower = llt.matrixL();
  Eigen::MatrixXd c = lower.solve(a);
  c = lower.solve(c.transpose().eval());
  c = 0.5 * (c + c.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingular, "symmetric eigensolver did not converge");
  }
  return eig.eigenvalues().reverse();
}

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

Eigen::MatrixXd symmetric_inverse_sqrt(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  const Eigen::VectorXd& values = eig.eigenvalues();
  if (!(values.minCoeff() > 1e-14 * std::abs(values.maxCoeff()))) {
    throw Error(ErrorCode::kSingular, "matrix is not positive definite");
  }
  const Eigen::VectorXd inv_root = values.cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * inv_root.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace fisherspike
