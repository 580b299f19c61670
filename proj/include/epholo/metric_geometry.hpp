// metric_geometry.hpp -- evolution of the Hilbert-space metric G along paths and
// the compatibility/positivity diagnostics that come with it.
//
// Along a path with transport matrix A(s) = -i (dq^mu/ds) K_mu the metric obeys
//   dG/ds = (dq^mu/ds)(i G K_mu - i K_mu^dagger G) = -(G A + A^dagger G),
// which keeps <psi|G|psi> constant when psi is transported by the same A.

#pragma once

#include <utility>
#include <vector>

#include "epholo/matrix_core.hpp"
#include "epholo/transport.hpp"

namespace epholo {

struct MetricState {
    ComplexMat G;
    BasePoint base;  // path end point
    std::vector<std::pair<double, ComplexMat>> history;  // (s, G(s))
    double max_asymmetry{0.0};   // max ||G - G^dagger|| seen before re-symmetrization
    double min_eigenvalue{0.0};  // smallest metric eigenvalue along the trajectory
    double est_error{0.0};       // Richardson estimate on the final G
    long step_count{0};
};

// RK4 evolution of G from G0 along the path. G is re-symmetrized each step with
// the pre-symmetrization asymmetry recorded; losing positive-definiteness throws
// PositivityLost. G0 must be Hermitian positive-definite.
MetricState evolve_metric(const Path& path, const ComplexMat& G0,
                          const GeneratorSource& generators, const TransportOptions& opt = {});

struct NormSample {
    double s;
    double metric_norm;    // Re <psi|G|psi>
    double imag_magnitude; // |Im <psi|G|psi>|, zero up to roundoff
    double euclidean_sq;   // plain ||psi||^2, generally drifts for non-Hermitian H
};

struct NormTrace {
    std::vector<NormSample> samples;
    double max_drift{0.0};  // max |metric_norm - 1|
    double max_imag{0.0};
    double max_asymmetry{0.0};
    double min_eigenvalue{0.0};
    ComplexMat U_end;
    ComplexMat G_end;
    double est_error{0.0};
};

// Co-evolves the state (via transport) and the metric with shared RK4 steps and
// returns the sampled inner products. Requires <psi0|G0|psi0> = 1.
NormTrace norm_along_path(const ComplexVec& psi0, const Path& path, const ComplexMat& G0,
                          const GeneratorSource& generators, const TransportOptions& opt = {});

// Pointwise covariant-derivative residual ||dG - (i G K - i K^dagger G)||_F.
double compatibility_residual(const ComplexMat& G, const ComplexMat& dG, const ComplexMat& K);

// Residuals along an evolved trajectory at interior samples, with dG/ds taken by
// a five-point central difference of the recorded history.
std::vector<std::pair<double, double>> trajectory_compatibility_residuals(
    const MetricState& state, const Path& path, const GeneratorSource& generators);

}  // namespace epholo
