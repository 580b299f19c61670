#include "epholo/matrix_core.hpp"

#include <cmath>
#include <string>

namespace epholo {

bool all_finite(const ComplexMat& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const Complex& v = m(i, j);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        }
    }
    return true;
}

void require_finite(const ComplexMat& m, const char* context) {
    if (!all_finite(m)) {
        throw NonFinite(std::string(context) + ": matrix contains NaN or Inf entries");
    }
}

ComplexMat adjoint(const ComplexMat& m) {
    return m.adjoint();
}

ComplexMat commutator(const ComplexMat& a, const ComplexMat& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw DimensionMismatch("commutator: operands must be square matrices of equal dimension");
    }
    return a * b - b * a;
}

double frobenius_distance(const ComplexMat& a, const ComplexMat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch("frobenius_distance: shape mismatch");
    }
    return (a - b).norm();
}

namespace {

// Right eigenvector of a 2x2 matrix for a known eigenvalue, unit-normalized.
// The two candidate rows of (m - lambda*I) give two analytic candidates; the
// larger one is numerically safe. Falls back to a basis vector for (near-)diagonal m.
ComplexVec eigenvector_for(const ComplexMat& m, Complex lambda) {
    const Complex a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    ComplexVec v1(2), v2(2);
    v1 << b, lambda - a;
    v2 << lambda - d, c;
    const double n1 = v1.norm();
    const double n2 = v2.norm();
    const double scale = m.norm();
    if (n1 <= 1e-14 * scale && n2 <= 1e-14 * scale) {
        ComplexVec e = ComplexVec::Zero(2);
        e(std::abs(a - lambda) <= std::abs(d - lambda) ? 0 : 1) = 1.0;
        return e;
    }
    ComplexVec v = (n1 >= n2) ? v1 : v2;
    return v / v.norm();
}

}  // namespace

EigDecomp2 eig2(const ComplexMat& m, double ep_threshold) {
    if (m.rows() != 2 || m.cols() != 2) {
        throw DimensionMismatch("eig2: expected a 2x2 matrix");
    }
    require_finite(m, "eig2");

    const Complex half_trace = 0.5 * (m(0, 0) + m(1, 1));
    const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    Complex root = std::sqrt(half_trace * half_trace - det);
    // Add the root constructively so the large eigenvalue never cancels.
    if (std::real(std::conj(half_trace) * root) < 0.0) root = -root;
    const Complex lambda1 = half_trace + root;
    const Complex lambda2 = (std::abs(lambda1) > 0.0) ? det / lambda1 : half_trace - root;

    const double gap = std::abs(lambda1 - lambda2);
    if (gap < ep_threshold) {
        throw NearDegenerate("eig2: eigenvalue gap " + std::to_string(gap) +
                             " below exceptional-point threshold");
    }

    ComplexMat vectors(2, 2);
    vectors.col(0) = eigenvector_for(m, lambda1);
    vectors.col(1) = eigenvector_for(m, lambda2);
    return EigDecomp2{lambda1, lambda2, vectors, gap};
}

bool is_positive_definite(const ComplexMat& m, double atol, double rtol) {
    if (m.rows() != m.cols()) {
        throw DimensionMismatch("is_positive_definite: matrix must be square");
    }
    require_finite(m, "is_positive_definite");
    const double herm_tol = atol + rtol * m.norm();
    if ((m - m.adjoint()).norm() > herm_tol) {
        throw NotHermitian("is_positive_definite: matrix is not Hermitian within tolerance");
    }
    if (m.rows() == 2) {
        const double tr = std::real(m(0, 0) + m(1, 1));
        const double det = std::real(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
        return tr > 0.0 && det > 0.0;
    }
    Eigen::SelfAdjointEigenSolver<ComplexMat> solver(0.5 * (m + m.adjoint()));
    return solver.eigenvalues().minCoeff() > 0.0;
}

}  // namespace epholo
