#pragma once

#include <Eigen/Dense>
#include <utility>

#include "agp/errors.hpp"

namespace agp {

// Dense row-major storage throughout; the center matrices this library
// works with are small by construction.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Jitter added to a projected matrix before any factorization that needs
/// strict positive definiteness.
inline constexpr double kPsdJitter = 1e-10;

/// Symmetry tolerance accepted by project_psd and sym_eig.
inline constexpr double kSymmetryTol = 1e-9;

bool is_symmetric(const Matrix& a, double tol = kSymmetryTol);

/// Moore-Penrose pseudo-inverse of a square matrix via SVD. Singular values
/// below rel_tol * (largest singular value) are treated as zero.
Matrix svd_pinv(const Matrix& a, double rel_tol = 1e-12);

/// Solves a * x = b for symmetric positive definite a. Throws NotSpdError
/// when the factorization fails.
Vector cholesky_solve(const Matrix& a, const Vector& b);

/// Frobenius-nearest symmetric PSD matrix: eigendecompose, clamp negative
/// eigenvalues to zero, recompose.
Matrix project_psd(const Matrix& a);

/// Eigendecomposition of a symmetric matrix. Returns eigenvalues in
/// ascending order and the matching orthonormal eigenvectors as columns.
std::pair<Vector, Matrix> sym_eig(const Matrix& a);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& a);

}  // namespace agp
