#include <doctest.h>

#include <random>

#include "epholo/generator_solver.hpp"
#include "test_helpers.hpp"

using namespace epholo;
using namespace std::complex_literals;

namespace {

std::pair<double, double> admissible_point(std::mt19937& gen) {
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    const EPLocus locus = model_ep_locus();
    while (true) {
        const double x = dist(gen);
        const double y = dist(gen);
        if (locus.distance(x, y) >= 0.05) return {x, y};
    }
}

// Decomposition of a closed form into t-slope and intercept.
struct SlopeIntercept {
    ComplexMat K1;
    ComplexMat K0;
};

SlopeIntercept closed_form_pair(int direction, double x, double y) {
    auto k = [&](double t) { return direction == 1 ? kx_closed(x, y, t) : ky_closed(x, y, t); };
    return {k(1.0) - k(0.0), k(0.0)};
}

class TimeDependentFamily final : public HamiltonianFamily {
public:
    int dim() const override { return 2; }
    int n_params() const override { return 1; }
    ComplexMat eval(const BasePoint& p) const override {
        return p.t * mat_sigma_z() + hamiltonian_at(p.q(0), 0.0);
    }
    ComplexMat partial(int, const BasePoint&) const override { return mat_sigma_z(); }
    bool is_time_independent() const override { return false; }
};

}  // namespace

TEST_SUITE_BEGIN("generator_solver");

TEST_CASE("solver at the symmetric point reproduces the t-independent generator") {
    const ModelFamily family;
    const GeneratorPair pair = solve_generator_pair(family, 1, make_point(0.0, 0.0, 0.0));
    CHECK(pair.K1.norm() < 1e-12);
    ComplexMat expected(2, 2);
    expected << 0.0, 0.5, -0.5, 0.0;
    CHECK(frobenius_distance(pair.K0, expected) < 1e-12);
}

TEST_CASE("solver matches the closed-form slope/intercept decomposition") {
    const ModelFamily family;
    const double x = 0.5, y = 0.3;
    const GeneratorPair pair = solve_generator_pair(family, 1, make_point(0.0, x, y));
    const SlopeIntercept closed = closed_form_pair(1, x, y);
    CHECK(frobenius_distance(pair.K1, closed.K1) < 1e-10);
    CHECK(frobenius_distance(pair.K0, closed.K0) < 1e-10);
}

TEST_CASE("solver refuses the exceptional point") {
    const ModelFamily family;
    CHECK_THROWS_AS(solve_generator_pair(family, 2, make_point(0.0, 1.0, 0.0)),
                    AtExceptionalPoint);
    CHECK_THROWS_AS(solve_generator_pair(family, 2, make_point(0.0, -1.0, 0.0)),
                    AtExceptionalPoint);
}

TEST_CASE("solver rejects unsupported inputs") {
    const TimeDependentFamily bad;
    CHECK_THROWS_AS(solve_generator_pair(bad, 1, make_point(0.0, 0.3, 0.0)),
                    NotTimeIndependent);
    const ModelFamily family;
    CHECK_THROWS_AS(solve_generator_pair(family, 0, make_point(0.0, 0.3, 0.0)),
                    DomainViolation);
    CHECK_THROWS_AS(solve_generator_pair(family, 3, make_point(0.0, 0.3, 0.0)),
                    DomainViolation);
}

TEST_CASE("assemble_K is the affine reconstruction") {
    const ModelFamily family;
    const GeneratorPair pair = solve_generator_pair(family, 1, make_point(0.0, 0.5, 0.0));
    CHECK(frobenius_distance(assemble_K(pair, 0.0), pair.K0) == 0.0);
    CHECK(frobenius_distance(assemble_K(pair, 1.0) - assemble_K(pair, 0.0), pair.K1) < 1e-15);
    CHECK(frobenius_distance(assemble_K(pair, 2.0), kx_closed(0.5, 0.0, 2.0)) < 1e-10);
}

TEST_CASE("determining equations and closed-form agreement over random points") {
    const ModelFamily family;
    std::mt19937 gen(301);
    for (int k = 0; k < 200; ++k) {
        const auto [x, y] = admissible_point(gen);
        const BasePoint p = make_point(0.0, x, y);
        const ComplexMat h = family.eval(p);
        for (int direction : {1, 2}) {
            const GeneratorPair pair = solve_generator_pair(family, direction, p);
            const DeterminingResiduals res = determining_residuals(pair, family);
            CHECK(res.commutation < 1e-10);
            CHECK(res.closure < 1e-10);
            CHECK(commutator(pair.K1, h).norm() < 1e-12);

            const SlopeIntercept closed = closed_form_pair(direction, x, y);
            CHECK(frobenius_distance(pair.K1, closed.K1) < 1e-9);
            CHECK(frobenius_distance(pair.K0, closed.K0) < 1e-9);
        }
    }
}

TEST_CASE("cross-direction identities hold away from the EPs") {
    const ModelFamily family;
    for (const auto& [x, y] : {std::pair{0.3, 0.4}, std::pair{0.0, 0.0}}) {
        const BasePoint p = make_point(0.0, x, y);
        const GeneratorPair px = solve_generator_pair(family, 1, p);
        const GeneratorPair py = solve_generator_pair(family, 2, p);
        const CrossCheckReport report = cross_direction_check(px, py, family, p);
        CHECK(report.slope_residual < 1e-6);
        CHECK(report.constant_residual < 1e-6);
    }
}

TEST_CASE("cross-direction finite differences blow up near an EP") {
    const ModelFamily family;
    auto residuals = [&](double x, double y) {
        const BasePoint p = make_point(0.0, x, y);
        const GeneratorPair px = solve_generator_pair(family, 1, p);
        const GeneratorPair py = solve_generator_pair(family, 2, p);
        const CrossCheckReport report = cross_direction_check(px, py, family, p);
        return std::max(report.slope_residual, report.constant_residual);
    };
    // The clean-point bound of 1e-6 is already exceeded here...
    CHECK(residuals(0.999, 0.001) > 1e-6);
    // ...and an order of magnitude closer the differences are meaningless.
    CHECK(residuals(0.9999, 0.0001) > 1.0);
}

TEST_CASE("cross-direction check validates its inputs") {
    const ModelFamily family;
    const BasePoint p = make_point(0.0, 0.3, 0.4);
    const GeneratorPair px = solve_generator_pair(family, 1, p);
    CHECK_THROWS_AS(cross_direction_check(px, px, family, p), DomainViolation);
    const GeneratorPair py = solve_generator_pair(family, 2, make_point(0.0, 0.5, 0.4));
    CHECK_THROWS_AS(cross_direction_check(px, py, family, p), DomainViolation);
}

TEST_SUITE_END();
