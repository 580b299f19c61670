#include "epholo/metric_geometry.hpp"

#include <cmath>
#include <string>

namespace epholo {

using namespace std::complex_literals;

namespace {

double min_hermitian_eigenvalue(const ComplexMat& g) {
    if (g.rows() == 2) {
        const double half_tr = 0.5 * std::real(g(0, 0) + g(1, 1));
        const double det = std::real(g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0));
        const double disc = std::max(0.0, half_tr * half_tr - det);
        return half_tr - std::sqrt(disc);
    }
    Eigen::SelfAdjointEigenSolver<ComplexMat> solver(g);
    return solver.eigenvalues().minCoeff();
}

void require_metric(const ComplexMat& g0) {
    require_finite(g0, "metric");
    if (g0.rows() != g0.cols()) {
        throw DimensionMismatch("metric: G0 must be square");
    }
    if ((g0 - g0.adjoint()).norm() > tolerance_for(g0)) {
        throw NotHermitian("metric: G0 is not Hermitian within tolerance");
    }
    if (min_hermitian_eigenvalue(0.5 * (g0 + g0.adjoint())) <= 0.0) {
        throw PositivityLost("metric: G0 is not positive-definite");
    }
}

// Joint RK4 driver for the pair (U, G); either pointer may be null to evolve
// only the other component.
struct JointRun {
    ComplexMat U;
    ComplexMat G;
    double max_asymmetry{0.0};
    double min_eigenvalue{std::numeric_limits<double>::infinity()};
    long step_count{0};
};

template <typename OnStep>
JointRun run_joint(const Path& path, const GeneratorSource& gens, const TransportOptions& opt,
                   const ComplexMat* g0, bool evolve_u, int steps_per_segment, OnStep&& on_step) {
    const int n = gens.dim();
    JointRun st;
    st.U = ComplexMat::Identity(n, n);
    if (g0) {
        st.G = *g0;
        st.min_eigenvalue = min_hermitian_eigenvalue(st.G);
    }
    on_step(path.s_begin(), st, true);
    for (const auto& seg : path.segments) {
        const double h = (seg.s_end - seg.s_begin) / steps_per_segment;
        for (int k = 0; k < steps_per_segment; ++k) {
            const double s = seg.s_begin + k * h;
            const ComplexMat a0 = transport_system_matrix(seg, s, gens, opt.ep_clearance);
            const ComplexMat a1 = transport_system_matrix(seg, s + 0.5 * h, gens, opt.ep_clearance);
            const ComplexMat a2 = transport_system_matrix(seg, s + h, gens, opt.ep_clearance);

            if (evolve_u) {
                const ComplexMat k1 = a0 * st.U;
                const ComplexMat k2 = a1 * (st.U + (0.5 * h) * k1);
                const ComplexMat k3 = a1 * (st.U + (0.5 * h) * k2);
                const ComplexMat k4 = a2 * (st.U + h * k3);
                st.U += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            if (g0) {
                auto dG = [](const ComplexMat& g, const ComplexMat& a) -> ComplexMat {
                    return -(g * a + a.adjoint() * g);
                };
                const ComplexMat k1 = dG(st.G, a0);
                const ComplexMat k2 = dG(st.G + (0.5 * h) * k1, a1);
                const ComplexMat k3 = dG(st.G + (0.5 * h) * k2, a1);
                const ComplexMat k4 = dG(st.G + h * k3, a2);
                st.G += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                // Hermiticity is structural; the raw drift is kept as a diagnostic.
                st.max_asymmetry = std::max(st.max_asymmetry, (st.G - st.G.adjoint()).norm());
                st.G = 0.5 * (st.G + st.G.adjoint());
                const double min_eig = min_hermitian_eigenvalue(st.G);
                st.min_eigenvalue = std::min(st.min_eigenvalue, min_eig);
                if (min_eig <= 0.0) {
                    throw PositivityLost("metric evolution left the positive-definite cone at s = " +
                                         std::to_string(s + h));
                }
            }
            st.step_count += 1;
            const bool record = (k == steps_per_segment - 1) || (k + 1) % opt.sample_stride == 0;
            on_step(s + h, st, record);
        }
    }
    return st;
}

}  // namespace

MetricState evolve_metric(const Path& path, const ComplexMat& G0,
                          const GeneratorSource& generators, const TransportOptions& opt) {
    validate_path(path);
    require_metric(G0);
    if (opt.steps < 100) {
        throw DomainViolation("evolve_metric: at least 100 steps per segment required");
    }

    MetricState out;
    const JointRun coarse = run_joint(
        path, generators, opt, &G0, /*evolve_u=*/false, opt.steps,
        [&](double s, const JointRun& st, bool record) {
            if (record) out.history.emplace_back(s, st.G);
        });
    const JointRun fine =
        run_joint(path, generators, opt, &G0, /*evolve_u=*/false, 2 * opt.steps,
                  [](double, const JointRun&, bool) {});

    out.G = coarse.G;
    out.base = path.end();
    out.max_asymmetry = coarse.max_asymmetry;
    out.min_eigenvalue = coarse.min_eigenvalue;
    out.step_count = coarse.step_count;
    out.est_error = frobenius_distance(coarse.G, fine.G);
    return out;
}

NormTrace norm_along_path(const ComplexVec& psi0, const Path& path, const ComplexMat& G0,
                          const GeneratorSource& generators, const TransportOptions& opt) {
    validate_path(path);
    require_metric(G0);
    if (psi0.size() != G0.rows()) {
        throw DimensionMismatch("norm_along_path: state and metric dimensions differ");
    }
    const Complex initial = psi0.dot(G0 * psi0);
    if (std::abs(initial - 1.0) > 1e-8) {
        throw DomainViolation("norm_along_path: <psi0|G0|psi0> must equal 1");
    }

    NormTrace out;
    auto sample = [&](double s, const JointRun& st, bool record) {
        if (!record) return;
        const ComplexVec psi = st.U * psi0;
        const Complex val = psi.dot(st.G * psi);
        NormSample ns;
        ns.s = s;
        ns.metric_norm = val.real();
        ns.imag_magnitude = std::abs(val.imag());
        ns.euclidean_sq = psi.squaredNorm();
        out.max_drift = std::max(out.max_drift, std::abs(ns.metric_norm - 1.0));
        out.max_imag = std::max(out.max_imag, ns.imag_magnitude);
        out.samples.push_back(ns);
    };
    const JointRun coarse =
        run_joint(path, generators, opt, &G0, /*evolve_u=*/true, opt.steps, sample);
    const JointRun fine = run_joint(path, generators, opt, &G0, /*evolve_u=*/true, 2 * opt.steps,
                                    [](double, const JointRun&, bool) {});

    out.max_asymmetry = coarse.max_asymmetry;
    out.min_eigenvalue = coarse.min_eigenvalue;
    out.U_end = coarse.U;
    out.G_end = coarse.G;
    out.est_error = std::max(frobenius_distance(coarse.U, fine.U),
                             frobenius_distance(coarse.G, fine.G));
    return out;
}

double compatibility_residual(const ComplexMat& G, const ComplexMat& dG, const ComplexMat& K) {
    if (G.rows() != dG.rows() || G.rows() != K.rows()) {
        throw DimensionMismatch("compatibility_residual: shape mismatch");
    }
    return (dG - (1i * G * K - 1i * K.adjoint() * G)).norm();
}

std::vector<std::pair<double, double>> trajectory_compatibility_residuals(
    const MetricState& state, const Path& path, const GeneratorSource& generators) {
    std::vector<std::pair<double, double>> out;
    const auto& hist = state.history;
    if (hist.size() < 5) return out;

    auto segment_for = [&](double s) -> const PathSegment* {
        for (const auto& seg : path.segments) {
            if (s >= seg.s_begin - 1e-12 && s <= seg.s_end + 1e-12) {
                // Skip exact segment boundaries, where the velocity may jump.
                if (std::abs(s - seg.s_begin) < 1e-12 || std::abs(s - seg.s_end) < 1e-12) {
                    return nullptr;
                }
                return &seg;
            }
        }
        return nullptr;
    };

    for (std::size_t k = 2; k + 2 < hist.size(); ++k) {
        const double ds = hist[k + 1].first - hist[k].first;
        // Require a uniform five-point window.
        bool uniform = ds > 0.0;
        for (int j = -2; j < 2; ++j) {
            const double d = hist[k + j + 1].first - hist[k + j].first;
            if (std::abs(d - ds) > 1e-9 * std::max(1.0, std::abs(ds))) uniform = false;
        }
        if (!uniform) continue;
        const PathSegment* seg = segment_for(hist[k].first);
        if (!seg) continue;

        const ComplexMat dG = (-hist[k + 2].second + 8.0 * hist[k + 1].second -
                               8.0 * hist[k - 1].second + hist[k - 2].second) /
                              (12.0 * ds);
        const ComplexMat a =
            transport_system_matrix(*seg, hist[k].first, generators, /*ep_clearance=*/0.0);
        out.emplace_back(hist[k].first, compatibility_residual(hist[k].second, dG, 1i * a));
    }
    return out;
}

}  // namespace epholo
