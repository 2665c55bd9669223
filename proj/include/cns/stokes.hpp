#pragma once

#include "cns/grid.hpp"
#include "cns/model_config.hpp"
#include "cns/spectral.hpp"

#include <optional>

namespace cns {

struct SolverSettings {
    double poisson_tolerance = 1e-10;  ///< relative residual of the pressure solve
    int poisson_max_iterations = 500;
    bool spectral_preconditioner = true;
    double yosida_tolerance = 1e-9;    ///< fixed-point correction / |w|
    int yosida_max_sweeps = 200;
};

struct SolveStats {
    int iterations = 0;
    double residual = 0.0;
};

/// Neumann pressure Poisson problem by preconditioned conjugate gradients
/// with mean-zero pinning. The preconditioner is the exact DCT inverse of the
/// box stencil, so a converged solve normally needs a single iteration; with
/// the preconditioner disabled this is plain CG.
class PoissonSolver {
public:
    PoissonSolver(const Grid& grid, const SolverSettings& settings = {});

    /// Mean-zero phi with laplacian_neumann(phi) = rhs - mean(rhs). Throws
    /// SolverError carrying the residual on nonconvergence.
    ScalarField solve(const ScalarField& rhs, SolveStats* stats = nullptr);

    const Grid& grid() const noexcept { return grid_; }
    const SolverSettings& settings() const noexcept { return settings_; }

private:
    Grid grid_;
    SolverSettings settings_;
    NeumannSolver fast_;
};

struct StokesState {
    VectorField u;
    ScalarField pressure;  ///< cell-centred, mean zero
};

struct Projection {
    VectorField field;      ///< divergence-free part
    ScalarField potential;  ///< v = field + gradient(potential)
};

struct VelocityStepInfo {
    int poisson_iterations = 0;
    int yosida_sweeps = 0;
    double divergence = 0.0;            ///< max |div u| after the step
    double kinetic_change_rate = 0.0;   ///< (K_new - K_old)/dt with K = 1/2 |u|^2
    double buoyancy_power = 0.0;        ///< <n grad(phi), u_old>
    double energy_slack = 0.0;          ///< admissible O(dt) excess
    bool energy_budget_ok = true;
};

/// Incompressible velocity machinery on one grid. Owns scratch buffers and the
/// warm-start pressure of the Yosida iteration, so one instance serves one
/// simulation at a time.
class StokesSolver {
public:
    StokesSolver(const Grid& grid, const SolverSettings& settings = {});

    /// Helmholtz projection onto discretely divergence-free MAC fields.
    Projection project(const VectorField& v, SolveStats* stats = nullptr);

    /// (I + eps A)^{-1} w with A the discrete Stokes operator, by alternating
    /// vector Helmholtz solves and projections (Uzawa iteration with
    /// Cahouet-Chabard pressure update). Non-solenoidal input is projected
    /// first. Throws SolverError on nonconvergence.
    VectorField yosida_apply(const VectorField& w, double eps, int* sweeps = nullptr);

    /// Solenoidal u with -Laplacian u + grad p = f (steady Stokes, no-slip).
    VectorField steady_stokes(const VectorField& f, int* sweeps = nullptr);

    /// (I - alpha Laplacian)^{-1} on velocity faces with no-slip walls.
    VectorField helmholtz(const VectorField& rhs, double alpha);

    /// One step of the regularised momentum equation:
    ///   rhs = u + dt P(-kappa N(Y_eps u) u + n grad(phi)),
    ///   (I - dt Laplacian) u* = rhs,  (u_new, p) from project(u*).
    StokesState velocity_step(const StokesState& state, const ScalarField& n, const ModelParams& p,
                              const PotentialSpec& phi, double dt, VelocityStepInfo* info = nullptr);

    const Grid& grid() const noexcept { return grid_; }
    PoissonSolver& poisson() noexcept { return poisson_; }
    void reset_warm_start() { yosida_pressure_.reset(); }

private:
    // (shift I + scale A)^{-1} w for solenoidal w, pressure iterate in `pi`.
    VectorField resolvent(const VectorField& w, double shift, double scale, ScalarField& pi, int* sweeps);

    Grid grid_;
    SolverSettings settings_;
    PoissonSolver poisson_;
    VelocityHelmholtzSolver helmholtz_;
    std::optional<ScalarField> yosida_pressure_;
    double yosida_eps_ = -1.0;
};

/// Skew-symmetric convection (1/2)[(a . grad)u + div(a (x) u)] on the MAC
/// grid; <convection(a, u), u> = 0 exactly for any a with zero wall flux.
VectorField convection_skew(const VectorField& a, const VectorField& u);

/// Face-averaged n times grad(phi) (boundary faces zero).
VectorField buoyancy_force(const ScalarField& n, const VectorField& grad_phi_faces);

/// sum over components of the discrete |grad u|^2 integral, i.e. -<lap u, u>.
double dirichlet_energy(const VectorField& u);

} // namespace cns
