// matrix_core.hpp -- dense small complex-matrix arithmetic shared by every module.

#pragma once

#include <Eigen/Dense>
#include <complex>

#include "epholo/errors.hpp"

namespace epholo {

using Complex = std::complex<double>;
using ComplexMat = Eigen::MatrixXcd;
using ComplexVec = Eigen::VectorXcd;

// Eigenvalue gaps below this are treated as an exceptional point: the eigenbasis
// is numerically meaningless there and decompositions are refused.
inline constexpr double kEpThreshold = 1e-8;

// Default absolute/relative parts of every comparison tolerance: atol + rtol * ||.||_F.
inline constexpr double kAtol = 1e-10;
inline constexpr double kRtol = 1e-10;

inline double tolerance_for(const ComplexMat& m, double atol = kAtol, double rtol = kRtol) {
    return atol + rtol * m.norm();
}

bool all_finite(const ComplexMat& m);

// Throws NonFinite if any entry is NaN or Inf.
void require_finite(const ComplexMat& m, const char* context);

// Conjugate transpose.
ComplexMat adjoint(const ComplexMat& m);

// a*b - b*a. Throws DimensionMismatch on unequal or non-square operands.
ComplexMat commutator(const ComplexMat& a, const ComplexMat& b);

// Frobenius norm of (a - b).
double frobenius_distance(const ComplexMat& a, const ComplexMat& b);

struct EigDecomp2 {
    Complex lambda1;
    Complex lambda2;
    ComplexMat vectors;  // unit right eigenvectors as columns, matching (lambda1, lambda2)
    double condition;    // |lambda1 - lambda2|
};

// Analytic 2x2 eigendecomposition via the trace/determinant quadratic, with the
// sign of the root chosen to avoid cancellation. Throws NearDegenerate when the
// eigenvalue gap falls below ep_threshold.
EigDecomp2 eig2(const ComplexMat& m, double ep_threshold = kEpThreshold);

// True iff m (Hermitian within atol + rtol*||m||) has strictly positive spectrum.
// Throws NotHermitian when the symmetry check fails.
bool is_positive_definite(const ComplexMat& m, double atol = kAtol, double rtol = kRtol);

}  // namespace epholo
