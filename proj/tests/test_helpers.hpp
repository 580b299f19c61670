// Shared test utilities: seeded random generators and independent finite
// difference / integration oracles. These deliberately do not reuse the
// library's own numerical helpers.

#pragma once

#include <complex>
#include <random>

#include "epholo/matrix_core.hpp"

namespace epholo_test {

using epholo::Complex;
using epholo::ComplexMat;
using epholo::ComplexVec;

inline ComplexMat random_matrix(std::mt19937& gen, int n = 2) {
    std::normal_distribution<double> dist(0.0, 1.0);
    ComplexMat m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            m(i, j) = Complex(dist(gen), dist(gen));
        }
    }
    return m;
}

inline ComplexVec random_vector(std::mt19937& gen, int n = 2) {
    std::normal_distribution<double> dist(0.0, 1.0);
    ComplexVec v(n);
    for (int i = 0; i < n; ++i) v(i) = Complex(dist(gen), dist(gen));
    return v;
}

// Independent five-point central derivative used as the test-side oracle.
template <typename F>
ComplexMat oracle_derivative(F f, double x, double h = 1e-5) {
    const ComplexMat fp1 = f(x + h);
    const ComplexMat fm1 = f(x - h);
    const ComplexMat fp2 = f(x + 2.0 * h);
    const ComplexMat fm2 = f(x - 2.0 * h);
    return (fm2 - fp2 + 8.0 * (fp1 - fm1)) / (12.0 * h);
}

// Independent fixed-step midpoint integrator for dM/dt = f(M, t).
template <typename F>
ComplexMat oracle_integrate(F f, ComplexMat m0, double t0, double t1, int steps) {
    const double h = (t1 - t0) / steps;
    ComplexMat m = m0;
    for (int k = 0; k < steps; ++k) {
        const double t = t0 + k * h;
        const ComplexMat mid = m + (0.5 * h) * f(m, t);
        m += h * f(mid, t + 0.5 * h);
    }
    return m;
}

}  // namespace epholo_test
