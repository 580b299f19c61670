#include "epholo/transport.hpp"

#include <cmath>
#include <string>

#include "epholo/generator_solver.hpp"

namespace epholo {

using namespace std::complex_literals;

double Path::s_begin() const {
    if (segments.empty()) throw DomainViolation("Path: no segments");
    return segments.front().s_begin;
}

double Path::s_end() const {
    if (segments.empty()) throw DomainViolation("Path: no segments");
    return segments.back().s_end;
}

BasePoint Path::start() const {
    if (segments.empty()) throw DomainViolation("Path: no segments");
    return segments.front().position(segments.front().s_begin);
}

BasePoint Path::end() const {
    if (segments.empty()) throw DomainViolation("Path: no segments");
    return segments.back().position(segments.back().s_end);
}

Path Path::reversed() const {
    Path out;
    out.closed = closed;
    const double a = s_begin();
    const double b = s_end();
    for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
        const PathSegment& seg = *it;
        PathSegment rev;
        rev.s_begin = a + (b - seg.s_end);
        rev.s_end = a + (b - seg.s_begin);
        // s -> a + b - s maps the reversed parameter back into the original segment.
        rev.position = [seg, a, b](double s) { return seg.position(a + b - s); };
        rev.velocity = [seg, a, b](double s) {
            Tangent v = seg.velocity(a + b - s);
            v.dt = -v.dt;
            v.dq = -v.dq;
            return v;
        };
        out.segments.push_back(std::move(rev));
    }
    return out;
}

void validate_path(const Path& path) {
    if (path.segments.empty()) {
        throw DomainViolation("validate_path: path has no segments");
    }
    for (const auto& seg : path.segments) {
        if (!(seg.s_end > seg.s_begin)) {
            throw DomainViolation("validate_path: segment range must be increasing");
        }
        if (!seg.position || !seg.velocity) {
            throw DomainViolation("validate_path: segment maps not set");
        }
    }
    for (std::size_t k = 0; k + 1 < path.segments.size(); ++k) {
        const auto& cur = path.segments[k];
        const auto& nxt = path.segments[k + 1];
        if (std::abs(cur.s_end - nxt.s_begin) > 1e-12) {
            throw DomainViolation("validate_path: segment parameter ranges do not chain");
        }
        const double gap = point_distance(cur.position(cur.s_end), nxt.position(nxt.s_begin));
        if (gap > 1e-9) {
            throw DomainViolation("validate_path: segments are not continuous");
        }
    }
    if (path.closed) {
        if (point_distance(path.start(), path.end()) > 1e-12) {
            throw DomainViolation("validate_path: closed path endpoints differ beyond 1e-12");
        }
    }
}

BasePoint path_position(const Path& path, double s) {
    for (const auto& seg : path.segments) {
        if (s >= seg.s_begin - 1e-12 && s <= seg.s_end + 1e-12) {
            return seg.position(s);
        }
    }
    throw DomainViolation("path_position: parameter outside the path range");
}

namespace {

// One revolution parameterized on [s0, s0 + 2pi]; orientation < 0 runs theta backwards.
PathSegment circle_segment(double s0, double cx, double cy, double radius, double t0,
                           double orientation, double phase_sign_x) {
    PathSegment seg;
    seg.s_begin = s0;
    seg.s_end = s0 + 2.0 * M_PI;
    seg.position = [=](double s) {
        const double theta = orientation * (s - s0);
        return make_point(t0, cx + phase_sign_x * radius * std::cos(theta),
                          cy + radius * std::sin(theta));
    };
    seg.velocity = [=](double s) {
        const double theta = orientation * (s - s0);
        Tangent v;
        v.dq = Eigen::Vector2d(-phase_sign_x * radius * std::sin(theta) * orientation,
                               radius * std::cos(theta) * orientation);
        return v;
    };
    return seg;
}

Path repeated_circle(double cx, double cy, double radius, double t0, int winding,
                     double phase_sign_x) {
    if (winding == 0) {
        throw InvalidConfig("loop winding must be nonzero");
    }
    const double orientation = winding > 0 ? 1.0 : -1.0;
    Path path;
    path.closed = true;
    const int revolutions = std::abs(winding);
    for (int k = 0; k < revolutions; ++k) {
        path.segments.push_back(
            circle_segment(2.0 * M_PI * k, cx, cy, radius, t0, orientation, phase_sign_x));
    }
    return path;
}

}  // namespace

Path make_loop(const LoopSpec& spec) {
    switch (spec.kind) {
        case LoopKind::circle_origin:
            if (!(spec.radius > 0.0 && spec.radius < 1.0)) {
                throw InvalidConfig("circle_origin requires 0 < r < 1 (no EP enclosed)");
            }
            return repeated_circle(0.0, 0.0, spec.radius, spec.time_slice, spec.winding, 1.0);
        case LoopKind::circle_ep_minus:
            if (!(spec.radius > 0.0 && spec.radius < 2.0)) {
                throw InvalidConfig("circle_ep_minus requires 0 < rho < 2");
            }
            return repeated_circle(-1.0, 0.0, spec.radius, spec.time_slice, spec.winding, 1.0);
        case LoopKind::circle_ep_plus:
            if (!(spec.radius > 0.0 && spec.radius < 2.0)) {
                throw InvalidConfig("circle_ep_plus requires 0 < rho < 2");
            }
            // x = 1 - rho cos(theta): the mirror image of circle_ep_minus.
            return repeated_circle(1.0, 0.0, spec.radius, spec.time_slice, spec.winding, -1.0);
        case LoopKind::custom:
            throw InvalidConfig("make_loop: custom loops must be constructed directly");
    }
    throw InvalidConfig("make_loop: unknown loop kind");
}

Path loop_circle(double cx, double cy, double radius, double t0, int winding) {
    if (!(radius > 0.0)) {
        throw InvalidConfig("loop_circle requires a positive radius");
    }
    return repeated_circle(cx, cy, radius, t0, winding, 1.0);
}

Path time_segment(double x, double y, double t0, double t1) {
    if (!(t1 > t0)) {
        throw InvalidConfig("time_segment requires t1 > t0");
    }
    PathSegment seg;
    seg.s_begin = t0;
    seg.s_end = t1;
    seg.position = [=](double s) { return make_point(s, x, y); };
    seg.velocity = [](double) {
        Tangent v;
        v.dt = 1.0;
        v.dq = Eigen::Vector2d::Zero();
        return v;
    };
    Path path;
    path.segments.push_back(std::move(seg));
    path.closed = false;
    return path;
}

Path polygon_loop(const std::vector<Eigen::Vector2d>& corners, double t0) {
    if (corners.size() < 3) {
        throw InvalidConfig("polygon_loop requires at least three corners");
    }
    Path path;
    path.closed = true;
    const std::size_t n = corners.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Eigen::Vector2d a = corners[k];
        const Eigen::Vector2d b = corners[(k + 1) % n];
        PathSegment seg;
        seg.s_begin = static_cast<double>(k);
        seg.s_end = static_cast<double>(k + 1);
        seg.position = [=](double s) {
            const double u = s - static_cast<double>(k);
            const Eigen::Vector2d p = (1.0 - u) * a + u * b;
            return make_point(t0, p.x(), p.y());
        };
        seg.velocity = [=](double) {
            Tangent v;
            v.dq = b - a;
            return v;
        };
        path.segments.push_back(std::move(seg));
    }
    return path;
}

ModelGenerators::ModelGenerators(double ep_threshold) : ep_threshold_(ep_threshold) {}

ComplexMat ModelGenerators::generator(int direction, const BasePoint& p) const {
    if (p.q.size() != 2) {
        throw DimensionMismatch("ModelGenerators: expected two parameters (x, y)");
    }
    const double x = p.q(0);
    const double y = p.q(1);
    switch (direction) {
        case 0:
            return hamiltonian_at(x, y);
        case 1:
            return kx_closed(x, y, p.t, ep_threshold_);
        case 2:
            return ky_closed(x, y, p.t, ep_threshold_);
        default:
            throw DomainViolation("ModelGenerators: direction must be 0, 1 or 2");
    }
}

double ModelGenerators::ep_distance(const BasePoint& p) const {
    return family_.ep_distance(p);
}

SolvedGenerators::SolvedGenerators(const HamiltonianFamily& family, double ep_threshold)
    : family_(&family), ep_threshold_(ep_threshold) {}

int SolvedGenerators::dim() const { return family_->dim(); }

int SolvedGenerators::n_params() const { return family_->n_params(); }

ComplexMat SolvedGenerators::generator(int direction, const BasePoint& p) const {
    if (direction == 0) return family_->eval(p);
    return assemble_K(solve_generator_pair(*family_, direction, p, ep_threshold_), p.t);
}

double SolvedGenerators::ep_distance(const BasePoint& p) const {
    return family_->ep_distance(p);
}

ComplexMat transport_system_matrix(const PathSegment& seg, double s,
                                   const GeneratorSource& generators, double ep_clearance) {
    const BasePoint p = seg.position(s);
    if (generators.ep_distance(p) < ep_clearance) {
        throw PathThroughEP("transport: point within ep_clearance of an EP locus");
    }
    const Tangent v = seg.velocity(s);
    const int n = generators.dim();
    ComplexMat a = ComplexMat::Zero(n, n);
    if (v.dt != 0.0) a += v.dt * generators.generator(0, p);
    for (int i = 1; i <= generators.n_params(); ++i) {
        if (v.dq(i - 1) != 0.0) a += v.dq(i - 1) * generators.generator(i, p);
    }
    require_finite(a, "transport");
    return -1i * a;
}

namespace {

class TransportIntegrator {
public:
    TransportIntegrator(const Path& path, const GeneratorSource& gens,
                        const TransportOptions& opt)
        : path_(path), gens_(gens), opt_(opt) {}

    ComplexMat system_matrix(const PathSegment& seg, double s) const {
        return transport_system_matrix(seg, s, gens_, opt_.ep_clearance);
    }

    ComplexMat run(int steps_per_segment, TransportResult* record) const {
        const int n = gens_.dim();
        ComplexMat u = ComplexMat::Identity(n, n);
        if (record) record->samples.emplace_back(path_.s_begin(), u);
        for (const auto& seg : path_.segments) {
            const double h = (seg.s_end - seg.s_begin) / steps_per_segment;
            for (int k = 0; k < steps_per_segment; ++k) {
                const double s = seg.s_begin + k * h;
                const ComplexMat a0 = system_matrix(seg, s);
                const ComplexMat a1 = system_matrix(seg, s + 0.5 * h);
                const ComplexMat a2 = system_matrix(seg, s + h);
                const ComplexMat k1 = a0 * u;
                const ComplexMat k2 = a1 * (u + (0.5 * h) * k1);
                const ComplexMat k3 = a1 * (u + (0.5 * h) * k2);
                const ComplexMat k4 = a2 * (u + h * k3);
                u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                if (record) {
                    record->step_count += 1;
                    const bool last = (k == steps_per_segment - 1);
                    if (last || (k + 1) % opt_.sample_stride == 0) {
                        record->samples.emplace_back(s + h, u);
                    }
                }
            }
        }
        return u;
    }

private:
    const Path& path_;
    const GeneratorSource& gens_;
    const TransportOptions& opt_;
};

}  // namespace

TransportResult integrate_transport(const Path& path, const GeneratorSource& generators,
                                    const TransportOptions& opt) {
    validate_path(path);
    if (opt.steps < 100) {
        throw DomainViolation("integrate_transport: at least 100 steps per segment required");
    }
    if (opt.sample_stride < 1) {
        throw DomainViolation("integrate_transport: sample_stride must be >= 1");
    }

    TransportIntegrator integrator(path, generators, opt);
    TransportResult result;
    result.start = path.start();
    result.end = path.end();
    result.closed = path.closed;
    result.holonomy = integrator.run(opt.steps, &result);
    const ComplexMat refined = integrator.run(2 * opt.steps, nullptr);
    result.est_error = frobenius_distance(result.holonomy, refined);
    if (result.est_error > opt.err_tolerance) {
        throw StepTooCoarse("integrate_transport: estimated error " +
                            std::to_string(result.est_error) + " exceeds requested tolerance");
    }
    return result;
}

LambdaTrace lambda_trace(const TransportResult& result, double off_diag_tol) {
    if (result.holonomy.rows() != 2) {
        throw DimensionMismatch("lambda_trace: only dim-2 transport is supported");
    }
    const ComplexMat s_mat = mat_S();
    const ComplexMat s_inv = mat_S_inv();
    LambdaTrace trace;
    trace.samples.reserve(result.samples.size());
    for (const auto& [s, u] : result.samples) {
        const ComplexMat xi = s_inv * u * s_mat;
        const double off = std::sqrt(std::norm(xi(0, 1)) + std::norm(xi(1, 0)));
        trace.max_off_diagonal = std::max(trace.max_off_diagonal, off);
        if (off > off_diag_tol) {
            throw NotDiagonalizedByS("lambda_trace: off-diagonal magnitude " +
                                     std::to_string(off) + " at s = " + std::to_string(s));
        }
        if (!trace.samples.empty()) {
            trace.max_step_jump =
                std::max(trace.max_step_jump, std::abs(xi(0, 0) - trace.samples.back().lambda));
        }
        trace.samples.push_back(LambdaSample{s, xi(0, 0), off});
    }
    return trace;
}

const char* to_string(HolonomyLabel label) {
    switch (label) {
        case HolonomyLabel::identity: return "identity";
        case HolonomyLabel::I: return "I";
        case HolonomyLabel::I2: return "I2";
        case HolonomyLabel::I3: return "I3";
        case HolonomyLabel::other: return "other";
    }
    return "other";
}

std::optional<HolonomyLabel> holonomy_label_from_string(const std::string& s) {
    if (s == "identity") return HolonomyLabel::identity;
    if (s == "I") return HolonomyLabel::I;
    if (s == "I2") return HolonomyLabel::I2;
    if (s == "I3") return HolonomyLabel::I3;
    if (s == "other") return HolonomyLabel::other;
    return std::nullopt;
}

HolonomyClass classify_holonomy(const ComplexMat& h, double tol) {
    if (h.rows() != 2 || h.cols() != 2) {
        throw DimensionMismatch("classify_holonomy: expected a 2x2 matrix");
    }
    const ComplexMat i_hol = mat_I_hol();
    ComplexMat power = mat_identity2();
    double best = std::numeric_limits<double>::infinity();
    int best_k = 0;
    for (int k = 0; k < 4; ++k) {
        const double d = frobenius_distance(h, power);
        if (d < best) {
            best = d;
            best_k = k;
        }
        power = i_hol * power;
    }
    HolonomyClass out;
    out.distance = best;
    if (best < tol) {
        static const HolonomyLabel kLabels[4] = {HolonomyLabel::identity, HolonomyLabel::I,
                                                 HolonomyLabel::I2, HolonomyLabel::I3};
        out.label = kLabels[best_k];
        out.winding_mod4 = best_k;
    } else {
        out.label = HolonomyLabel::other;
        out.winding_mod4 = std::nullopt;
    }
    return out;
}

ComplexMat compose(const TransportResult& a, const TransportResult& b) {
    if (point_distance(a.end, b.start) > 1e-9) {
        throw EndpointMismatch("compose: first path must end where the second starts");
    }
    return b.holonomy * a.holonomy;
}

ComplexVec transport_state(const ComplexVec& psi0, const TransportResult& result) {
    if (psi0.size() != result.holonomy.cols()) {
        throw DimensionMismatch("transport_state: state dimension does not match transport");
    }
    return result.holonomy * psi0;
}

}  // namespace epholo
