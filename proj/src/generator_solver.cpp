#include "epholo/generator_solver.hpp"

#include "epholo/numdiff.hpp"

namespace epholo {

using namespace std::complex_literals;

GeneratorPair solve_generator_pair(const HamiltonianFamily& family, int direction,
                                   const BasePoint& p, double ep_threshold) {
    if (!family.is_time_independent()) {
        throw NotTimeIndependent("solve_generator_pair: family must not depend on time");
    }
    if (direction < 1 || direction > family.n_params()) {
        throw DomainViolation("solve_generator_pair: direction index out of range");
    }
    if (family.dim() != 2) {
        throw DimensionMismatch("solve_generator_pair: only dim-2 families are supported");
    }

    const ComplexMat h = family.eval(p);
    require_finite(h, "solve_generator_pair");
    EigDecomp2 eig;
    try {
        eig = eig2(h, ep_threshold);
    } catch (const NearDegenerate& e) {
        throw AtExceptionalPoint(std::string("solve_generator_pair: ") + e.what());
    }

    const ComplexMat v = eig.vectors;
    const ComplexMat v_inv = v.inverse();
    const ComplexMat m = v_inv * family.partial(direction, p) * v;

    ComplexMat k1_eig = ComplexMat::Zero(2, 2);
    k1_eig(0, 0) = m(0, 0);
    k1_eig(1, 1) = m(1, 1);

    const Complex gap = eig.lambda1 - eig.lambda2;
    ComplexMat k0_eig = ComplexMat::Zero(2, 2);
    k0_eig(0, 1) = -1i * m(0, 1) / gap;
    k0_eig(1, 0) = 1i * m(1, 0) / gap;

    GeneratorPair out;
    out.direction = direction;
    out.K1 = v * k1_eig * v_inv;
    out.K0 = v * k0_eig * v_inv;
    out.base = p;
    return out;
}

ComplexMat assemble_K(const GeneratorPair& pair, double t) {
    return t * pair.K1 + pair.K0;
}

DeterminingResiduals determining_residuals(const GeneratorPair& pair,
                                           const HamiltonianFamily& family) {
    const ComplexMat h = family.eval(pair.base);
    const ComplexMat dh = family.partial(pair.direction, pair.base);
    DeterminingResiduals res;
    res.commutation = commutator(pair.K1, h).norm();
    res.closure = (pair.K1 + 1i * commutator(h, pair.K0) - dh).norm();
    return res;
}

CrossCheckReport cross_direction_check(const GeneratorPair& pa, const GeneratorPair& pb,
                                       const HamiltonianFamily& family, const BasePoint& p,
                                       double h) {
    if (pa.direction == pb.direction) {
        throw DomainViolation("cross_direction_check: pairs must be solved in distinct directions");
    }
    if (point_distance(pa.base, p) > 1e-9 || point_distance(pb.base, p) > 1e-9) {
        throw DomainViolation("cross_direction_check: both pairs must be solved at p");
    }

    const int i = pa.direction;
    const int j = pb.direction;
    auto resolve = [&](int dir, int along, double shift) {
        BasePoint ps = p;
        ps.q(along - 1) += shift;
        return solve_generator_pair(family, dir, ps);
    };
    auto d_K1 = [&](int dir, int along) {
        return central_derivative([&](double s) { return resolve(dir, along, s).K1; }, 0.0, h);
    };
    auto d_K0 = [&](int dir, int along) {
        return central_derivative([&](double s) { return resolve(dir, along, s).K0; }, 0.0, h);
    };

    CrossCheckReport report;
    report.slope_residual =
        (d_K1(j, i) - d_K1(i, j) - 1i * commutator(pb.K0, pa.K1) + 1i * commutator(pa.K0, pb.K1))
            .norm();
    report.constant_residual =
        (d_K0(j, i) - d_K0(i, j) - 1i * commutator(pb.K0, pa.K0)).norm();
    return report;
}

}  // namespace epholo
