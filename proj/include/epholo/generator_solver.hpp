// generator_solver.hpp -- algebraic construction of the gauge-fixed transport
// generators K_i = t*K1 + K0 for a time-independent diagonalizable family.
//
// In the eigenbasis V of H, with M = V^-1 (dH/dq^i) V, the two determining
// equations  [K1, H] = 0  and  K1 + i[H, K0] = dH/dq^i  are solved by
//   K1 = diagonal part of M,
//   K0_{ab} = -i M_{ab} / (lambda_a - lambda_b)  (a != b),  K0_{aa} = 0,
// both transformed back to the original basis. The vanishing-diagonal gauge for
// K0 is the representative that reproduces the model's closed forms.

#pragma once

#include "epholo/matrix_core.hpp"
#include "epholo/model.hpp"

namespace epholo {

struct GeneratorPair {
    int direction{1};  // parameter index i (1-based)
    ComplexMat K1;     // t-linear coefficient; commutes with H by construction
    ComplexMat K0;     // t-constant part, zero eigenbasis diagonal
    BasePoint base;    // where the pair was solved
};

// Throws NotTimeIndependent for families with explicit time dependence and
// AtExceptionalPoint when the spectrum at p is (near-)degenerate.
GeneratorPair solve_generator_pair(const HamiltonianFamily& family, int direction,
                                   const BasePoint& p, double ep_threshold = kEpThreshold);

// t*K1 + K0.
ComplexMat assemble_K(const GeneratorPair& pair, double t);

// Frobenius norms of the two determining-equation residuals for a solved pair.
struct DeterminingResiduals {
    double commutation;  // ||[K1, H]||
    double closure;      // ||K1 + i[H, K0] - dH/dq^i||
};
DeterminingResiduals determining_residuals(const GeneratorPair& pair,
                                           const HamiltonianFamily& family);

// Residuals of the mixed-direction consistency identities between two solved
// pairs, with the parameter derivatives taken by central differences of
// re-solves at shifted points (propagates AtExceptionalPoint from those solves):
//   slope:    d_i K_j^1 - d_j K_i^1 = i[K_j^0, K_i^1] - i[K_i^0, K_j^1]
//   constant: d_i K_j^0 - d_j K_i^0 = i[K_j^0, K_i^0]
struct CrossCheckReport {
    double slope_residual;
    double constant_residual;
};
CrossCheckReport cross_direction_check(const GeneratorPair& pa, const GeneratorPair& pb,
                                       const HamiltonianFamily& family, const BasePoint& p,
                                       double h = 1e-5);

}  // namespace epholo
