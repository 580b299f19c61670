#include <doctest.h>

#include <cmath>

#include "epholo/transport.hpp"
#include "test_helpers.hpp"

using namespace epholo;
using namespace std::complex_literals;

namespace {

Path constant_path(double t, double x, double y) {
    PathSegment seg;
    seg.s_begin = 0.0;
    seg.s_end = 1.0;
    seg.position = [=](double) { return make_point(t, x, y); };
    seg.velocity = [](double) {
        Tangent v;
        v.dq = Eigen::Vector2d::Zero();
        return v;
    };
    Path path;
    path.segments.push_back(seg);
    path.closed = true;
    return path;
}

TransportResult run_loop(LoopKind kind, double radius, int winding, int steps,
                         double t0 = 0.0) {
    const Path path = make_loop({kind, radius, winding, t0});
    const ModelGenerators gens;
    TransportOptions opt;
    opt.steps = steps;
    return integrate_transport(path, gens, opt);
}

// exp(-i a sigma_x) in closed form.
ComplexMat exp_minus_i_sigma_x(double a) {
    ComplexMat m(2, 2);
    m << std::cos(a), -1i * std::sin(a), -1i * std::sin(a), std::cos(a);
    return m;
}

}  // namespace

TEST_SUITE_BEGIN("transport");

TEST_CASE("constant path transports trivially") {
    const ModelGenerators gens;
    TransportOptions opt;
    opt.steps = 100;
    const TransportResult res = integrate_transport(constant_path(0.0, 0.3, 0.2), gens, opt);
    CHECK(frobenius_distance(res.holonomy, mat_identity2()) == 0.0);
    CHECK(res.est_error == 0.0);
}

TEST_CASE("loop holonomies match the three reference elements") {
    const TransportResult none = run_loop(LoopKind::circle_origin, 0.5, 1, 5000);
    CHECK(frobenius_distance(none.holonomy, mat_identity2()) < 1e-6);

    const TransportResult minus = run_loop(LoopKind::circle_ep_minus, 1.0, 1, 5000);
    CHECK(frobenius_distance(minus.holonomy, mat_I_hol()) < 1e-6);

    const TransportResult plus = run_loop(LoopKind::circle_ep_plus, 1.0, 1, 5000);
    CHECK(frobenius_distance(plus.holonomy, -mat_I_hol()) < 1e-6);

    // Mirroring the enclosed EP conjugates the holonomy with the swap matrix.
    CHECK(frobenius_distance(apply_T_symmetry(minus.holonomy), plus.holonomy) < 2e-6);
}

TEST_CASE("holonomy around the negative EP is radius-independent") {
    for (const double rho : {0.2, 0.5, 1.0, 1.5, 1.9}) {
        const TransportResult res = run_loop(LoopKind::circle_ep_minus, rho, 1, 2000);
        const HolonomyClass cls = classify_holonomy(res.holonomy);
        CHECK(cls.label == HolonomyLabel::I);
        CHECK(cls.distance < 1e-6);
    }
}

TEST_CASE("lambda trace follows the closed forms") {
    TransportOptions opt;
    opt.steps = 5000;
    opt.sample_stride = 5;
    const ModelGenerators gens;

    const Path origin = make_loop({LoopKind::circle_origin, 0.5, 1, 0.0});
    const TransportResult res_o = integrate_transport(origin, gens, opt);
    const LambdaTrace trace_o = lambda_trace(res_o);
    CHECK(trace_o.max_off_diagonal < 1e-10);
    CHECK(trace_o.max_step_jump < 0.01);
    double dev = 0.0;
    for (std::size_t k = 0; k + 1 < trace_o.samples.size(); ++k) {
        dev = std::max(dev, std::abs(trace_o.samples[k].lambda -
                                     lambda_ref_O(0.5, trace_o.samples[k].s)));
    }
    CHECK(dev < 1e-7);
    CHECK(std::abs(trace_o.samples.back().lambda - 1.0) < 1e-7);

    const Path minus = make_loop({LoopKind::circle_ep_minus, 1.0, 1, 0.0});
    const TransportResult res_m = integrate_transport(minus, gens, opt);
    const LambdaTrace trace_m = lambda_trace(res_m);
    dev = 0.0;
    for (std::size_t k = 0; k + 1 < trace_m.samples.size(); ++k) {
        dev = std::max(dev, std::abs(trace_m.samples[k].lambda -
                                     lambda_ref_minus(1.0, trace_m.samples[k].s)));
    }
    CHECK(dev < 1e-7);
    CHECK(std::abs(trace_m.samples.back().lambda - Complex(0, -1)) < 1e-7);
    CHECK(std::abs(lambda_ref_minus(1.0, M_PI) -
                   std::pow(3.0, 0.25) * std::exp(-1i * M_PI / 4.0)) < 1e-15);
}

TEST_CASE("lambda_trace rejects evolutions that S does not diagonalize") {
    // At t = 0 both generators are proportional to the loop holonomy matrix, so
    // every t = 0 path is S-diagonalized; away from that plane the t-linear
    // generator parts break it.
    const Path tilted = make_loop({LoopKind::circle_ep_minus, 1.0, 1, 0.7});
    const ModelGenerators gens;
    TransportOptions opt;
    opt.steps = 500;
    const TransportResult res = integrate_transport(tilted, gens, opt);
    CHECK_THROWS_AS(lambda_trace(res), NotDiagonalizedByS);

    const std::vector<Eigen::Vector2d> corners = {
        {-1.5, -0.5}, {-0.5, -0.5}, {-0.5, 0.5}, {-1.5, 0.5}};
    const TransportResult square =
        integrate_transport(polygon_loop(corners, 0.0), gens, opt);
    CHECK(lambda_trace(square).max_off_diagonal < 1e-8);
}

TEST_CASE("classification distinguishes the four powers") {
    const ComplexMat i_hol = mat_I_hol();
    CHECK(classify_holonomy(mat_identity2()).label == HolonomyLabel::identity);
    CHECK(classify_holonomy(mat_identity2()).distance == 0.0);
    CHECK(classify_holonomy(i_hol).label == HolonomyLabel::I);
    CHECK(classify_holonomy(-mat_identity2()).label == HolonomyLabel::I2);
    CHECK(classify_holonomy(i_hol * i_hol * i_hol).label == HolonomyLabel::I3);
    CHECK(classify_holonomy(i_hol).winding_mod4 == 1);

    const HolonomyClass other = classify_holonomy(0.5 * mat_identity2());
    CHECK(other.label == HolonomyLabel::other);
    CHECK(!other.winding_mod4.has_value());
    CHECK(other.distance > 0.5);
}

TEST_CASE("composition accumulates loop holonomies") {
    const TransportResult once = run_loop(LoopKind::circle_ep_minus, 1.0, 1, 4000);
    const ComplexMat twice = compose(once, once);
    CHECK(frobenius_distance(twice, -mat_identity2()) < 1e-6);

    TransportResult doubled = once;
    doubled.holonomy = twice;
    const ComplexMat thrice = compose(doubled, once);
    TransportResult tripled = once;
    tripled.holonomy = thrice;
    CHECK(frobenius_distance(compose(tripled, once), mat_identity2()) < 1e-5);

    const TransportResult other_base = run_loop(LoopKind::circle_origin, 0.5, 1, 1000);
    CHECK_THROWS_AS(compose(once, other_base), EndpointMismatch);
}

TEST_CASE("a reversed loop transports back to the start") {
    const Path loop = make_loop({LoopKind::circle_ep_minus, 1.0, 1, 0.0});
    const ModelGenerators gens;
    TransportOptions opt;
    opt.steps = 2000;
    const TransportResult fwd = integrate_transport(loop, gens, opt);
    const TransportResult rev = integrate_transport(loop.reversed(), gens, opt);
    CHECK(frobenius_distance(compose(fwd, rev), mat_identity2()) < 1e-6);
    // holonomy(reverse) = holonomy^-1 within the combined error estimate
    CHECK(frobenius_distance(rev.holonomy, fwd.holonomy.inverse()) <
          2.0 * (fwd.est_error + rev.est_error) + 1e-13);
}

TEST_CASE("transport_state applies the holonomy to states") {
    const TransportResult once = run_loop(LoopKind::circle_ep_minus, 1.0, 1, 4000);
    ComplexVec psi0(2);
    psi0 << 1.0, 0.0;
    const ComplexVec psi1 = transport_state(psi0, once);
    ComplexVec expected(2);
    expected << 0.0, -1.0;
    CHECK((psi1 - expected).norm() < 1e-6);

    // Four windings restore any state.
    std::mt19937 gen(401);
    ComplexVec psi = epholo_test::random_vector(gen);
    const ComplexVec original = psi;
    for (int k = 0; k < 4; ++k) psi = transport_state(psi, once);
    CHECK((psi - original).norm() < 1e-5 * original.norm());

    ComplexVec bad(3);
    bad.setZero();
    CHECK_THROWS_AS(transport_state(bad, once), DimensionMismatch);
}

TEST_CASE("winding repetitions follow the mod-4 structure") {
    const TransportResult res2 = run_loop(LoopKind::circle_ep_minus, 1.0, 2, 2000);
    CHECK(classify_holonomy(res2.holonomy).label == HolonomyLabel::I2);

    const TransportResult res_back = run_loop(LoopKind::circle_ep_minus, 1.0, -1, 2000);
    CHECK(classify_holonomy(res_back.holonomy).label == HolonomyLabel::I3);
}

TEST_CASE("deformation invariance: a square around the EP gives the same holonomy") {
    const std::vector<Eigen::Vector2d> corners = {
        {-1.5, -0.5}, {-0.5, -0.5}, {-0.5, 0.5}, {-1.5, 0.5}};
    const Path square = polygon_loop(corners, 0.0);
    const ModelGenerators gens;
    TransportOptions opt;
    opt.steps = 2000;
    const TransportResult res = integrate_transport(square, gens, opt);
    const HolonomyClass cls = classify_holonomy(res.holonomy);
    CHECK(cls.label == HolonomyLabel::I);
    CHECK(cls.distance < 1e-6);

    // Reversing the multi-segment loop inverts its holonomy.
    const TransportResult rev = integrate_transport(square.reversed(), gens, opt);
    CHECK(classify_holonomy(rev.holonomy).label == HolonomyLabel::I3);
}

TEST_CASE("a loop enclosing both EPs composes their equal contributions") {
    const Path big = loop_circle(0.0, 0.0, 3.0, 0.0, 1);
    const ModelGenerators gens;
    TransportOptions opt;
    opt.steps = 4000;
    const TransportResult res = integrate_transport(big, gens, opt);
    // Counter-clockwise winding around each defect line contributes one factor
    // of I, so enclosing both once gives I^2.
    const HolonomyClass cls = classify_holonomy(res.holonomy);
    CHECK(cls.label == HolonomyLabel::I2);
    CHECK(cls.distance < 1e-6);
}

TEST_CASE("unit determinant along the whole path") {
    const TransportResult res = run_loop(LoopKind::circle_ep_minus, 1.5, 1, 2000);
    for (const auto& [s, u] : res.samples) {
        CHECK(std::abs(u.determinant() - 1.0) < 1e-8);
    }
}

TEST_CASE("est_error shrinks at fourth order") {
    // The truncation-dominated window ends near 1500 steps; beyond that the
    // estimate sits on the roundoff floor (~1e-14).
    const double log2 = std::log(2.0);
    double prev = 0.0;
    for (const int steps : {250, 500, 1000}) {
        const TransportResult res = run_loop(LoopKind::circle_ep_minus, 1.0, 1, steps);
        if (prev > 0.0) {
            const double slope = std::log(prev / res.est_error) / log2;
            CHECK(slope == doctest::Approx(4.0).epsilon(0.075));  // -4 +- 0.3
        }
        prev = res.est_error;
    }
}

TEST_CASE("loops away from the reference plane are conjugated by the time leg") {
    const double t0 = 0.7;
    const TransportResult res = run_loop(LoopKind::circle_ep_minus, 1.0, 1, 4000, t0);
    // Basepoint of the rho = 1 loop is (x, y) = (0, 0) where H = sigma_x.
    const ComplexMat conj = exp_minus_i_sigma_x(t0);
    const ComplexMat expected = conj * mat_I_hol() * conj.inverse();
    CHECK(frobenius_distance(res.holonomy, expected) < 1e-6);
    CHECK(classify_holonomy(res.holonomy).label == HolonomyLabel::other);
}

namespace {

// Rectangle loop in the (t, coordinate) plane: a time leg, a parameter leg at
// the raised time, and the two return legs.
Path time_param_rectangle(double t1, double q0, double q1, int coord,
                          const BasePoint& base) {
    auto point = [=](double t, double q) {
        BasePoint p = base;
        p.t = t;
        p.q(coord) = q;
        return p;
    };
    auto leg = [&](int k, double ta, double qa, double tb, double qb) {
        PathSegment seg;
        seg.s_begin = k;
        seg.s_end = k + 1;
        seg.position = [=](double s) {
            const double u = s - k;
            return point(ta + u * (tb - ta), qa + u * (qb - qa));
        };
        seg.velocity = [=](double) {
            Tangent v;
            v.dt = tb - ta;
            v.dq = Eigen::VectorXd::Zero(base.q.size());
            v.dq(coord) = qb - qa;
            return v;
        };
        return seg;
    };
    Path path;
    path.segments = {leg(0, 0.0, q0, t1, q0), leg(1, t1, q0, t1, q1),
                     leg(2, t1, q1, 0.0, q1), leg(3, 0.0, q1, 0.0, q0)};
    path.closed = true;
    return path;
}

// A Hermitian single-parameter family with a gapped spectrum everywhere.
class GappedHermitianFamily final : public HamiltonianFamily {
public:
    int dim() const override { return 2; }
    int n_params() const override { return 1; }
    ComplexMat eval(const BasePoint& p) const override {
        ComplexMat h(2, 2);
        h << p.q(0), 1.0, 1.0, -p.q(0);
        return h;
    }
    ComplexMat partial(int, const BasePoint&) const override {
        ComplexMat d(2, 2);
        d << 1.0, 0.0, 0.0, -1.0;
        return d;
    }
    bool is_time_independent() const override { return true; }
};

}  // namespace

TEST_CASE("rectangle loops through time legs are flat") {
    // The parameter leg at t = 1.5 exercises the t-linear generator parts.
    BasePoint base = make_point(0.0, 0.0, 0.3);
    const Path rect = time_param_rectangle(1.5, 0.2, 0.6, 0, base);
    const ModelGenerators gens;
    TransportOptions opt;
    opt.steps = 2000;
    const TransportResult res = integrate_transport(rect, gens, opt);
    CHECK(frobenius_distance(res.holonomy, mat_identity2()) < 1e-6);
    CHECK(res.est_error < 1e-8);
}

TEST_CASE("solver-backed transport of a user-supplied family is flat") {
    const GappedHermitianFamily family;
    const SolvedGenerators gens(family);
    BasePoint base;
    base.q = Eigen::VectorXd::Zero(1);
    const Path rect = time_param_rectangle(2.0, -0.5, 1.0, 0, base);
    TransportOptions opt;
    opt.steps = 1000;
    const TransportResult res = integrate_transport(rect, gens, opt);
    CHECK(frobenius_distance(res.holonomy, mat_identity2()) < 1e-6);

    // For a Hermitian family the parameter generator is Hermitian, so the
    // evolution stays unitary along the whole loop.
    for (const auto& [s, u] : res.samples) {
        CHECK((u.adjoint() * u - mat_identity2()).norm() < 1e-8);
    }
}

TEST_CASE("solver-backed generators reproduce the closed-form transport") {
    const Path loop = make_loop({LoopKind::circle_ep_minus, 1.0, 1, 0.0});
    const ModelFamily family;
    const ModelGenerators closed_gens;
    const SolvedGenerators solved_gens(family);
    TransportOptions opt;
    opt.steps = 1000;
    const TransportResult a = integrate_transport(loop, closed_gens, opt);
    const TransportResult b = integrate_transport(loop, solved_gens, opt);
    CHECK(frobenius_distance(a.holonomy, b.holonomy) < 1e-9);
}

TEST_CASE("error control and clearance guards") {
    TransportOptions opt;
    opt.steps = 150;
    opt.err_tolerance = 1e-30;
    const ModelGenerators gens;
    const Path loop = make_loop({LoopKind::circle_ep_minus, 1.0, 1, 0.0});
    CHECK_THROWS_AS(integrate_transport(loop, gens, opt), StepTooCoarse);

    TransportOptions opt2;
    opt2.steps = 500;
    CHECK_THROWS_AS(integrate_transport(loop_circle(0.0, 0.0, 1.0, 0.0, 1), gens, opt2),
                    PathThroughEP);

    TransportOptions opt3;
    opt3.steps = 50;
    CHECK_THROWS_AS(integrate_transport(loop, gens, opt3), DomainViolation);
}

TEST_CASE("non-finite path coordinates are rejected, not propagated") {
    PathSegment seg;
    seg.s_begin = 0.0;
    seg.s_end = 1.0;
    seg.position = [](double) {
        return make_point(0.0, std::numeric_limits<double>::quiet_NaN(), 0.0);
    };
    seg.velocity = [](double) {
        Tangent v;
        v.dq = Eigen::Vector2d(1.0, 0.0);
        return v;
    };
    Path path;
    path.segments = {seg};
    const ModelGenerators gens;
    TransportOptions opt;
    opt.steps = 100;
    CHECK_THROWS_AS(integrate_transport(path, gens, opt), NonFinite);
}

TEST_CASE("path construction and validation") {
    CHECK_THROWS_AS(make_loop({LoopKind::circle_origin, 1.5, 1, 0.0}), InvalidConfig);
    CHECK_THROWS_AS(make_loop({LoopKind::circle_ep_minus, 2.5, 1, 0.0}), InvalidConfig);
    CHECK_THROWS_AS(make_loop({LoopKind::circle_origin, 0.5, 0, 0.0}), InvalidConfig);
    CHECK_THROWS_AS(make_loop({LoopKind::custom, 0.5, 1, 0.0}), InvalidConfig);

    // Discontinuous chain is rejected.
    Path broken;
    PathSegment a;
    a.s_begin = 0.0;
    a.s_end = 1.0;
    a.position = [](double s) { return make_point(0.0, s, 0.0); };
    a.velocity = [](double) {
        Tangent v;
        v.dq = Eigen::Vector2d(1.0, 0.0);
        return v;
    };
    PathSegment b = a;
    b.s_begin = 1.0;
    b.s_end = 2.0;
    b.position = [](double s) { return make_point(0.0, s + 0.5, 0.0); };
    broken.segments = {a, b};
    CHECK_THROWS_AS(validate_path(broken), DomainViolation);

    // Closed flag requires matching endpoints.
    Path open_marked_closed;
    open_marked_closed.segments = {a};
    open_marked_closed.closed = true;
    CHECK_THROWS_AS(validate_path(open_marked_closed), DomainViolation);

    // Velocity maps are consistent with the position maps.
    const Path loop = make_loop({LoopKind::circle_ep_plus, 1.2, 1, 0.0});
    for (const double s : {0.3, 1.7, 4.4}) {
        const auto& seg = loop.segments.front();
        const double h = 1e-5;
        const BasePoint fwd = seg.position(s + h);
        const BasePoint bwd = seg.position(s - h);
        const Tangent v = seg.velocity(s);
        CHECK(std::abs((fwd.t - bwd.t) / (2.0 * h) - v.dt) < 1e-6);
        CHECK(((fwd.q - bwd.q) / (2.0 * h) - v.dq).norm() < 1e-6);
    }
}

TEST_SUITE_END();
