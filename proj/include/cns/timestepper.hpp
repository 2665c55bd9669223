#pragma once

#include "cns/grid.hpp"
#include "cns/model_config.hpp"
#include "cns/regularization.hpp"
#include "cns/stokes.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cns {

/// Snapshot of the regularised system at one time instant.
struct State {
    ScalarField n;
    ScalarField c;
    StokesState stokes;
    double t = 0.0;
    long step = 0;

    static State zeros(const Grid& grid);
    static State from_initial(const InitialData& init);
    const Grid& grid() const noexcept { return n.grid(); }
};

struct TimeSettings {
    double horizon = 1.0;
    double safety = 0.9;
    int max_halvings = 10;
    /// Fixed step instead of stable_dt (still capped by the horizon).
    std::optional<double> fixed_dt;
};

struct StepReport {
    double dt = 0.0;
    int halvings = 0;
    double cfl_advective = 0.0;
    double cfl_chemotactic = 0.0;
    double cfl_diffusive = 0.0;
    int poisson_iterations = 0;
    int yosida_sweeps = 0;
    double divergence = 0.0;
    double min_n = 0.0;
    double min_c = 0.0;
    double max_c = 0.0;
    bool n_nonnegative = true;
    bool c_bounds = true;
    bool divergence_ok = true;
    bool finite = true;
    bool energy_budget_ok = true;

    bool all_ok() const noexcept {
        return n_nonnegative && c_bounds && divergence_ok && finite && energy_budget_ok;
    }
};

/// Explicit coupled stepper for (n, c, u). Owns the cut-off field and the
/// solver instances; not shareable between threads.
class Stepper {
public:
    Stepper(const Grid& grid, ModelParams params, SensitivitySpec sens, PotentialSpec phi,
            SolverSettings solvers = {}, TimeSettings time = {});

    /// safety * min(h^2/(2 dim max D_eps(n)), h/max|u|, h/max|chemotactic
    /// speed|, 1/max n); candidates with a vanishing denominator are skipped.
    double stable_dt(const State& s) const;

    /// Explicit conservative density update. Throws StepRejected on negativity.
    ScalarField step_n(const State& s, double dt) const;

    /// Signal update: explicit consumption and upwind transport, then an
    /// implicit (backward Euler) diffusion solve. Throws StepRejected if a
    /// bound 0 <= c <= max c is violated.
    ScalarField step_c(const State& s, double dt);

    /// n and c with frozen start-of-step u, then the velocity with the new n.
    /// Halves dt up to max_halvings times on rejection; throws StepRejected if
    /// none is accepted.
    std::pair<State, StepReport> step_coupled(const State& s, double dt);
    std::pair<State, StepReport> step_coupled(const State& s) { return step_coupled(s, stable_dt(s)); }

    const ModelParams& params() const noexcept { return params_; }
    const SensitivitySpec& sensitivity() const noexcept { return sens_; }
    const PotentialSpec& potential() const noexcept { return phi_; }
    const CutoffField& cutoff() const noexcept { return rho_; }
    const TimeSettings& time() const noexcept { return time_; }
    const SolverSettings& solver_settings() const noexcept { return solver_settings_; }
    StokesSolver& stokes() noexcept { return stokes_; }
    const Grid& grid() const noexcept { return grid_; }

private:
    Grid grid_;
    ModelParams params_;
    SensitivitySpec sens_;
    PotentialSpec phi_;
    SolverSettings solver_settings_;
    TimeSettings time_;
    CutoffField rho_;
    StokesSolver stokes_;
    NeumannSolver c_solver_;
};

} // namespace cns
