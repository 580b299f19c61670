// transport.hpp -- evolution of states along base-space paths and classification
// of the resulting holonomies.
//
// The evolution operator solves  dU/ds = -i (dq^mu/ds) K_mu(gamma(s)) U  with
// U = identity at the path start; for a closed path the final U is the holonomy.

#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "epholo/matrix_core.hpp"
#include "epholo/model.hpp"

namespace epholo {

// Tangent of a base-space curve: (dt/ds, dq^1/ds, ..., dq^n/ds).
struct Tangent {
    double dt{0.0};
    Eigen::VectorXd dq;
};

// One smooth piece of a path, with analytic position and velocity maps on [s_begin, s_end].
struct PathSegment {
    double s_begin{0.0};
    double s_end{1.0};
    std::function<BasePoint(double)> position;
    std::function<Tangent(double)> velocity;
};

struct Path {
    std::vector<PathSegment> segments;
    bool closed{false};

    double s_begin() const;
    double s_end() const;
    BasePoint start() const;
    BasePoint end() const;
    // Same trace, opposite orientation.
    Path reversed() const;
};

// Throws on empty paths, inverted segment ranges, discontinuous chaining, or a
// closed flag whose endpoints do not match to 1e-12.
void validate_path(const Path& path);

// Position of the path at parameter s (must lie within some segment's range).
BasePoint path_position(const Path& path, double s);

enum class LoopKind { circle_origin, circle_ep_minus, circle_ep_plus, custom };

struct LoopSpec {
    LoopKind kind{LoopKind::circle_origin};
    double radius{0.5};
    int winding{1};       // signed repetition count; negative reverses orientation
    double time_slice{0.0};
};

// The model's loop families at a fixed time slice, one segment per revolution:
//   circle_origin:   (t0, r cos(theta), r sin(theta)),        0 < r < 1
//   circle_ep_minus: (t0, -1 + rho cos(theta), rho sin(theta)), 0 < rho < 2
//   circle_ep_plus:  (t0, 1 - rho cos(theta), rho sin(theta)),  0 < rho < 2
// Domain violations throw InvalidConfig; kind == custom is rejected here.
Path make_loop(const LoopSpec& spec);

// Counter-clockwise circle of radius R around (cx, cy) at time slice t0.
Path loop_circle(double cx, double cy, double radius, double t0, int winding = 1);

// Pure time evolution at fixed (x, y), t from t0 to t1.
Path time_segment(double x, double y, double t0, double t1);

// Closed polygon through the given parameter-space corners at time slice t0.
Path polygon_loop(const std::vector<Eigen::Vector2d>& corners, double t0);

// Source of the per-direction transport generators. Direction 0 is the time
// generator (the Hamiltonian itself); 1..n_params are the parameter directions.
class GeneratorSource {
public:
    virtual ~GeneratorSource() = default;
    virtual int dim() const = 0;
    virtual int n_params() const = 0;
    virtual ComplexMat generator(int direction, const BasePoint& p) const = 0;
    virtual double ep_distance(const BasePoint&) const {
        return std::numeric_limits<double>::infinity();
    }
};

// Closed-form generators of the canonical model family.
class ModelGenerators final : public GeneratorSource {
public:
    explicit ModelGenerators(double ep_threshold = kEpThreshold);
    int dim() const override { return 2; }
    int n_params() const override { return 2; }
    ComplexMat generator(int direction, const BasePoint& p) const override;
    double ep_distance(const BasePoint& p) const override;

private:
    double ep_threshold_;
    ModelFamily family_;
};

// Generators obtained by running the algebraic solver at every evaluation point.
class SolvedGenerators final : public GeneratorSource {
public:
    explicit SolvedGenerators(const HamiltonianFamily& family,
                              double ep_threshold = kEpThreshold);
    int dim() const override;
    int n_params() const override;
    ComplexMat generator(int direction, const BasePoint& p) const override;
    double ep_distance(const BasePoint& p) const override;

private:
    const HamiltonianFamily* family_;
    double ep_threshold_;
};

struct TransportOptions {
    int steps{20000};          // RK4 steps per segment (>= 100)
    double ep_clearance{1e-3}; // minimum allowed distance to an EP locus
    double err_tolerance{std::numeric_limits<double>::infinity()};
    int sample_stride{1};      // record every k-th step
};

// -i (dq^mu/ds) K_mu at the abscissa s of a segment. Generators of zero-velocity
// directions are never evaluated. Throws PathThroughEP within ep_clearance of an
// EP locus.
ComplexMat transport_system_matrix(const PathSegment& seg, double s,
                                   const GeneratorSource& generators, double ep_clearance);

struct TransportResult {
    std::vector<std::pair<double, ComplexMat>> samples;  // (s, U(s)), first entry is identity
    ComplexMat holonomy;  // U at the path end (the holonomy when the path is closed)
    long step_count{0};
    double est_error{0.0};  // Frobenius distance between the steps and 2*steps runs
    BasePoint start;
    BasePoint end;
    bool closed{false};
};

// Fixed-step classical RK4 with a built-in halved-step Richardson comparison.
// Throws PathThroughEP when clearance is violated at any evaluation abscissa
// and StepTooCoarse when est_error exceeds opt.err_tolerance.
TransportResult integrate_transport(const Path& path, const GeneratorSource& generators,
                                    const TransportOptions& opt = {});

struct LambdaSample {
    double s;
    Complex lambda;      // (S^-1 U S)_{00}
    double off_diagonal; // magnitude of the off-diagonal part of S^-1 U S
};

struct LambdaTrace {
    std::vector<LambdaSample> samples;
    double max_off_diagonal{0.0};
    double max_step_jump{0.0};  // max |lambda_{k+1} - lambda_k|, continuity diagnostic
};

// Scalar trace of the S-diagonalized evolution. Throws NotDiagonalizedByS when
// any sample's off-diagonal magnitude exceeds the tolerance.
LambdaTrace lambda_trace(const TransportResult& result, double off_diag_tol = 1e-6);

enum class HolonomyLabel { identity, I, I2, I3, other };

const char* to_string(HolonomyLabel label);
std::optional<HolonomyLabel> holonomy_label_from_string(const std::string& s);

struct HolonomyClass {
    HolonomyLabel label{HolonomyLabel::other};
    double distance{0.0};  // Frobenius distance to the nearest power of the loop holonomy
    std::optional<int> winding_mod4;
};

// Nearest element of {1, I, I^2, I^3}; label `other` when no power is within tol.
HolonomyClass classify_holonomy(const ComplexMat& h, double tol = 1e-6);

// U_b * U_a for paths traversed a-then-b. Throws EndpointMismatch unless a ends
// where b starts.
ComplexMat compose(const TransportResult& a, const TransportResult& b);

// U * psi0 at the path end.
ComplexVec transport_state(const ComplexVec& psi0, const TransportResult& result);

}  // namespace epholo
