#include "epholo/model.hpp"

#include <cmath>
#include <string>

namespace epholo {

using namespace std::complex_literals;

BasePoint make_point(double t, double x, double y) {
    BasePoint p;
    p.t = t;
    p.q = Eigen::Vector2d(x, y);
    return p;
}

double point_distance(const BasePoint& a, const BasePoint& b) {
    if (a.q.size() != b.q.size()) {
        throw DimensionMismatch("point_distance: parameter dimensions differ");
    }
    return std::abs(a.t - b.t) + (a.q - b.q).norm();
}

double EPLocus::distance(double x, double y) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
        best = std::min(best, std::hypot(x - p.x(), y - p.y()));
    }
    return best;
}

BasePoint EPLocus::line_at(std::size_t index, double t) const {
    if (index >= points.size()) {
        throw DomainViolation("EPLocus::line_at: index out of range");
    }
    return make_point(t, points[index].x(), points[index].y());
}

EPLocus model_ep_locus() {
    EPLocus locus;
    locus.points = {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(-1.0, 0.0)};
    return locus;
}

ComplexMat hamiltonian_at(double x, double y) {
    ComplexMat h(2, 2);
    h << -1i * x, 1.0 + 1i * y,
         1.0 + 1i * y, 1i * x;
    return h;
}

Complex discriminant(double x, double y) {
    const Complex w(1.0, y);
    return w * w - x * x;
}

namespace {

Complex checked_inverse_discriminant(double x, double y, double ep_threshold, const char* who) {
    const Complex disc = discriminant(x, y);
    if (std::abs(disc) < ep_threshold) {
        throw AtExceptionalPoint(std::string(who) + ": generator singular, |discriminant| = " +
                                 std::to_string(std::abs(disc)) + " at (" + std::to_string(x) +
                                 ", " + std::to_string(y) + ")");
    }
    return 1.0 / disc;
}

}  // namespace

ComplexMat kx_closed(double x, double y, double t, double ep_threshold) {
    const Complex inv = checked_inverse_discriminant(x, y, ep_threshold, "kx_closed");
    const Complex w(1.0, y);
    ComplexMat k(2, 2);
    k << -1i * x * x * t,        w * x * t - 0.5 * w,
         w * x * t + 0.5 * w,    1i * x * x * t;
    return -inv * k;
}

ComplexMat ky_closed(double x, double y, double t, double ep_threshold) {
    const Complex inv = checked_inverse_discriminant(x, y, ep_threshold, "ky_closed");
    const Complex w(1.0, y);
    ComplexMat k(2, 2);
    k << w * x * t,                    1i * w * w * t - 0.5i * x,
         1i * w * w * t + 0.5i * x,    -w * x * t;
    return inv * k;
}

Complex lambda_ref_O(double r, double theta) {
    if (!(r > 0.0 && r < 1.0)) {
        throw DomainViolation("lambda_ref_O: r must satisfy 0 < r < 1");
    }
    if (theta < -1e-12 || theta > 2.0 * M_PI + 1e-12) {
        throw DomainViolation("lambda_ref_O: theta must lie in [0, 2pi]");
    }
    // Antiderivative of the diagonalized loop generator; the radicand's real
    // part is proportional to 1 - r^2 cos(2 theta) > 0, so the principal branch
    // of the fourth root is continuous and lambda(0) = lambda(2 pi) = 1.
    const Complex radicand = ((1.0 + r) * (1.0 - r * std::exp(-1i * theta))) /
                             ((1.0 - r) * (1.0 + r * std::exp(1i * theta)));
    return std::pow(radicand, 0.25);
}

Complex lambda_ref_minus(double rho, double theta) {
    if (!(rho > 0.0 && rho < 2.0)) {
        throw DomainViolation("lambda_ref_minus: rho must satisfy 0 < rho < 2");
    }
    if (theta < -1e-12 || theta > 2.0 * M_PI + 1e-12) {
        throw DomainViolation("lambda_ref_minus: theta must lie in [0, 2pi]");
    }
    const Complex e = std::exp(-1i * theta);
    return std::exp(-1i * theta / 4.0) * std::pow((2.0 - rho * e) / (2.0 - rho), 0.25);
}

ComplexMat apply_T_symmetry(const ComplexMat& m) {
    if (m.rows() != 2 || m.cols() != 2) {
        throw DimensionMismatch("apply_T_symmetry: expected a 2x2 matrix");
    }
    const ComplexMat t = mat_T();
    return t * m * t;
}

ComplexMat mat_identity2() {
    return ComplexMat::Identity(2, 2);
}

ComplexMat mat_sigma_z() {
    ComplexMat m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

ComplexMat mat_S() {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    ComplexMat m(2, 2);
    m << 1.0, -1i, -1i, 1.0;
    return inv_sqrt2 * m;
}

ComplexMat mat_S_inv() {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    ComplexMat m(2, 2);
    m << 1.0, 1i, 1i, 1.0;
    return inv_sqrt2 * m;
}

ComplexMat mat_T() {
    ComplexMat m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

ComplexMat mat_I_hol() {
    ComplexMat m(2, 2);
    m << 0.0, 1.0, -1.0, 0.0;
    return m;
}

ComplexMat ModelFamily::eval(const BasePoint& p) const {
    if (p.q.size() != 2) {
        throw DimensionMismatch("ModelFamily::eval: expected two parameters (x, y)");
    }
    return hamiltonian_at(p.q(0), p.q(1));
}

ComplexMat ModelFamily::partial(int direction, const BasePoint& p) const {
    if (p.q.size() != 2) {
        throw DimensionMismatch("ModelFamily::partial: expected two parameters (x, y)");
    }
    ComplexMat d(2, 2);
    switch (direction) {
        case 1:  // dH/dx
            d << -1i, 0.0, 0.0, 1i;
            return d;
        case 2:  // dH/dy
            d << 0.0, 1i, 1i, 0.0;
            return d;
        default:
            throw DomainViolation("ModelFamily::partial: direction must be 1 or 2");
    }
}

double ModelFamily::ep_distance(const BasePoint& p) const {
    if (p.q.size() != 2) {
        throw DimensionMismatch("ModelFamily::ep_distance: expected two parameters (x, y)");
    }
    static const EPLocus locus = model_ep_locus();
    return locus.distance(p.q(0), p.q(1));
}

}  // namespace epholo
