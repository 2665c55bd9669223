#pragma once

#include "cns/grid.hpp"

namespace cns {

/// Face-normal differences (f_right - f_left)/h; boundary faces are zero
/// (zero-flux Neumann closure).
VectorField gradient(const ScalarField& f);

/// Cell value sum_axis (v_right - v_left)/h.
ScalarField divergence(const VectorField& v);

/// divergence(gradient(f)). Its discrete integral vanishes identically.
ScalarField laplacian_neumann(const ScalarField& f);

/// Componentwise Laplacian of a MAC velocity with no-slip walls: boundary-normal
/// faces are zero and tangential neighbours across a wall are mirrored with a
/// sign change. Boundary faces of the result are zero.
VectorField vector_laplacian(const VectorField& v);

/// Cell-centred gradient, i.e. face_to_center(gradient(f)).
std::array<ScalarField, 3> cell_gradient(const ScalarField& f);

struct AdvectionIncrement {
    ScalarField increment;
    double cfl = 0.0;  ///< max over cells of dt * (outflow face speeds)/h
};

/// Conservative first-order upwind increment -dt * div(v f_upwind). The
/// increment sums to zero exactly in exact arithmetic. Throws StepRejected if
/// the CFL number exceeds one.
AdvectionIncrement advect_scalar_upwind(const ScalarField& f, const VectorField& v, double dt);

/// Advective-form upwind increment -dt * (v . grad f): each cell moves towards
/// its upwind neighbours, so with CFL <= 1 the update is a convex combination
/// and satisfies a discrete maximum principle. Throws StepRejected if the CFL
/// number exceeds one.
AdvectionIncrement advect_scalar_upwind_advective(const ScalarField& f, const VectorField& v, double dt);

/// Cell-centred Frobenius norm of the second-difference Hessian. Centred
/// stencils in the interior, shifted (one-sided) stencils on the boundary ring.
ScalarField hessian_frobenius(const ScalarField& f);

} // namespace cns
