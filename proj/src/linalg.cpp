#include "agp/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace agp {

namespace {

void require_finite(const Matrix& a, const char* who) {
    if (!a.allFinite()) {
        throw std::invalid_argument(std::string(who) + ": non-finite entries");
    }
}

void require_square(const Matrix& a, const char* who) {
    if (a.rows() != a.cols() || a.rows() < 1) {
        throw std::invalid_argument(std::string(who) + ": expected a square matrix, got " +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
}

void require_symmetric(const Matrix& a, const char* who) {
    require_square(a, who);
    require_finite(a, who);
    if (!is_symmetric(a)) {
        throw std::invalid_argument(std::string(who) + ": matrix is not symmetric");
    }
}

}  // namespace

bool is_symmetric(const Matrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    return (a - Matrix(a.transpose())).cwiseAbs().maxCoeff() <= tol;
}

Matrix svd_pinv(const Matrix& a, double rel_tol) {
    require_square(a, "svd_pinv");
    require_finite(a, "svd_pinv");
    if (!(rel_tol > 0.0)) {
        throw std::invalid_argument("svd_pinv: rel_tol must be positive");
    }

    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double cutoff = rel_tol * sv(0);

    Vector inv_sv = Vector::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff && sv(i) > 0.0) inv_sv(i) = 1.0 / sv(i);
    }
    return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

Vector cholesky_solve(const Matrix& a, const Vector& b) {
    require_square(a, "cholesky_solve");
    require_finite(a, "cholesky_solve");
    if (a.rows() != b.size()) {
        throw std::invalid_argument("cholesky_solve: dimension mismatch");
    }
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) {
        throw NotSpdError("cholesky_solve: factorization failed, matrix is not SPD");
    }
    return llt.solve(b);
}

Matrix project_psd(const Matrix& a) {
    require_symmetric(a, "project_psd");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("project_psd: eigendecomposition failed");
    }
    Vector lambda = eig.eigenvalues();
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) < 0.0) lambda(i) = 0.0;
    }
    Matrix out = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
    // Recomposition leaves rounding-level asymmetry; return an exactly
    // symmetric result.
    return 0.5 * (out + Matrix(out.transpose()));
}

std::pair<Vector, Matrix> sym_eig(const Matrix& a) {
    require_symmetric(a, "sym_eig");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("sym_eig: eigendecomposition failed");
    }
    return {eig.eigenvalues(), eig.eigenvectors()};
}

double min_eigenvalue(const Matrix& a) {
    return sym_eig(a).first(0);
}

}  // namespace agp
