// model.hpp -- the canonical non-Hermitian two-level family H(x, y), its closed-form
// transport generators, reference loop eigenfunctions, and constant matrices.
//
// This module is the ground-truth oracle layer: everything here is an explicit
// formula, against which the algebraic solver and the ODE transport are checked.

#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "epholo/matrix_core.hpp"

namespace epholo {

// A point of the base space: time plus the parameter coordinates (q^1, ..., q^n).
struct BasePoint {
    double t{0.0};
    Eigen::VectorXd q;
};

// Convenience for the two-parameter model, q = (x, y).
BasePoint make_point(double t, double x, double y);

// Distance |dt| + ||dq|| used for endpoint/continuity comparisons.
double point_distance(const BasePoint& a, const BasePoint& b);

// Abstract family H(q) with analytic parameter partials. Direction indices are
// 1-based: partial(i, p) = dH/dq^i evaluated at p, i in 1..n_params.
class HamiltonianFamily {
public:
    virtual ~HamiltonianFamily() = default;
    virtual int dim() const = 0;
    virtual int n_params() const = 0;
    virtual ComplexMat eval(const BasePoint& p) const = 0;
    virtual ComplexMat partial(int direction, const BasePoint& p) const = 0;
    virtual bool is_time_independent() const = 0;
    // Parameter-space distance to the nearest exceptional locus; +inf when unknown.
    virtual double ep_distance(const BasePoint&) const {
        return std::numeric_limits<double>::infinity();
    }
};

// Parameter-space positions where the family becomes non-diagonalizable, together
// with their time-extruded lines l(t) = (t, point).
struct EPLocus {
    std::vector<Eigen::Vector2d> points;
    double distance(double x, double y) const;
    // Point of the time-extruded defect line through points[index] at time t.
    BasePoint line_at(std::size_t index, double t) const;
};

// The exceptional points of the model: (x, y) = (+1, 0) and (-1, 0).
EPLocus model_ep_locus();

// H(x, y) = [[-ix, 1+iy], [1+iy, ix]].
ComplexMat hamiltonian_at(double x, double y);

// (1+iy)^2 - x^2; the spectrum of H is +-sqrt of this, zero exactly at the EPs.
Complex discriminant(double x, double y);

// Closed-form transport generators for the x- and y-directions. Both are traceless,
// affine in t, and singular at the EPs; evaluation within ep_threshold of a zero
// discriminant throws AtExceptionalPoint.
ComplexMat kx_closed(double x, double y, double t, double ep_threshold = kEpThreshold);
ComplexMat ky_closed(double x, double y, double t, double ep_threshold = kEpThreshold);

// Reference eigenfunction of the diagonalized evolution along the origin-centered
// loop of radius r (0 < r < 1), principal fourth root. theta in [0, 2pi].
Complex lambda_ref_O(double r, double theta);

// Same for the loop of radius rho (0 < rho < 2) around the EP at (-1, 0).
Complex lambda_ref_minus(double rho, double theta);

// T m T with T the index-swap matrix; maps H(x, y) to H(-x, y).
ComplexMat apply_T_symmetry(const ComplexMat& m);

// Constant reference matrices.
ComplexMat mat_identity2();
ComplexMat mat_sigma_z();
ComplexMat mat_S();       // (1/sqrt 2) [[1, -i], [-i, 1]]
ComplexMat mat_S_inv();
ComplexMat mat_T();       // [[0, 1], [1, 0]]
ComplexMat mat_I_hol();   // [[0, 1], [-1, 0]], the order-4 loop holonomy

// The canonical two-parameter family as a HamiltonianFamily instance.
class ModelFamily final : public HamiltonianFamily {
public:
    int dim() const override { return 2; }
    int n_params() const override { return 2; }
    ComplexMat eval(const BasePoint& p) const override;
    ComplexMat partial(int direction, const BasePoint& p) const override;
    bool is_time_independent() const override { return true; }
    double ep_distance(const BasePoint& p) const override;
};

}  // namespace epholo
