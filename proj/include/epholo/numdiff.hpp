// numdiff.hpp -- small central-difference helpers for matrix-valued functions.

#pragma once

#include "epholo/matrix_core.hpp"

namespace epholo {

inline constexpr double kFdStep = 1e-5;

// Five-point central first derivative, O(h^4). The wider stencil keeps the
// truncation error negligible even close to the generator singularities.
template <typename F>
ComplexMat central_derivative(F&& f, double x, double h = kFdStep) {
    ComplexMat out =
        (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
    return out;
}

}  // namespace epholo
