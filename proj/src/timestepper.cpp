#include "cns/timestepper.hpp"

#include "cns/error.hpp"
#include "cns/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cns {

State State::zeros(const Grid& grid) {
    State s;
    s.n = ScalarField(grid);
    s.c = ScalarField(grid);
    s.stokes.u = VectorField(grid);
    s.stokes.pressure = ScalarField(grid);
    return s;
}

State State::from_initial(const InitialData& init) {
    State s = zeros(init.n0.grid());
    s.n = init.n0;
    s.c = init.c0;
    s.stokes.u = init.u0;
    return s;
}

Stepper::Stepper(const Grid& grid, ModelParams params, SensitivitySpec sens, PotentialSpec phi, SolverSettings solvers,
                 TimeSettings time)
    : grid_(grid),
      params_(params),
      sens_(std::move(sens)),
      phi_(std::move(phi)),
      solver_settings_(solvers),
      time_(time),
      rho_(rho_eps(grid, params.epsilon)),
      stokes_(grid, solvers),
      c_solver_(grid) {
    if (grid.dim() != params_.dim) throw ValidationError("grid dimension differs from model dimension");
}

double Stepper::stable_dt(const State& s) const {
    const double h = grid_.h_min();
    const int d = grid_.dim();
    double max_d = 0.0, max_n = 0.0;
    for (double v : s.n.values()) max_n = std::max(max_n, v);
    max_d = d_eps(max_n, params_);  // D_eps is monotone in n for m >= 1
    if (params_.m < 1.0) max_d = std::max(max_d, d_eps(std::max(0.0, s.n.min()), params_));
    double dt = h * h / (2.0 * d * max_d);
    const double umax = s.stokes.u.max_abs();
    if (umax > 0.0) dt = std::min(dt, h / umax);
    const double vmax = max_chemotactic_speed(s.n, s.c, sens_, rho_, params_);
    if (vmax > 0.0) dt = std::min(dt, h / vmax);
    if (max_n > 0.0) dt = std::min(dt, 1.0 / max_n);
    return time_.safety * dt;
}

ScalarField Stepper::step_n(const State& s, double dt) const {
    const ScalarField& n = s.n;
    const VectorField& u = s.stokes.u;
    const VectorField chemo = chemotactic_flux(n, s.c, sens_, rho_, params_);
    ScalarField out = n;
    std::vector<double> dn(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) dn[i] = d_eps(n[i], params_);
    for (int a = 0; a < grid_.dim(); ++a) {
        const double inv_h = 1.0 / grid_.h(a);
        const std::size_t cs = grid_.stride(a);
        const auto uc = u.component(a);
        const auto cc = chemo.component(a);
        grid_.for_each_face(a, [&](int i, int j, int k, std::size_t f) {
            const int id[3] = {i, j, k};
            if (id[a] == 0 || id[a] == grid_.cells(a)) return;
            const std::size_t R = grid_.cell_index(i, j, k);
            const std::size_t L = R - cs;
            // Total flux in +axis direction.
            double J = -0.5 * (dn[L] + dn[R]) * (n[R] - n[L]) * inv_h;
            J += cc[f];
            J += uc[f] * (uc[f] > 0.0 ? n[L] : n[R]);
            const double delta = dt * J * inv_h;
            out[L] -= delta;
            out[R] += delta;
        });
    }
    const double mn = out.min();
    if (!(mn >= 0.0)) {
        std::ostringstream os;
        os << "density update produced min n = " << mn;
        throw StepRejected(os.str());
    }
    return out;
}

ScalarField Stepper::step_c(const State& s, double dt) {
    const double max_n = s.n.max();
    if (dt * max_n > 1.0) throw StepRejected("consumption stability dt * max(n) <= 1 violated");
    const double c_hi = s.c.max();
    ScalarField half = s.c;
    for (std::size_t i = 0; i < half.size(); ++i) half[i] -= dt * s.n[i] * s.c[i];
    if (s.stokes.u.max_abs() > 0.0) half += advect_scalar_upwind_advective(s.c, s.stokes.u, dt).increment;
    ScalarField out = c_solver_.helmholtz(half, dt);
    // The implicit diffusion is an M-matrix solve; bounds hold up to round-off.
    const double tol = 1e-12 * std::max(1.0, c_hi);
    const double lo = out.min(), hi = out.max();
    if (!(lo >= -tol) || !(hi <= c_hi + tol)) {
        std::ostringstream os;
        os << "signal update left [0, " << c_hi << "]: min " << lo << ", max " << hi;
        throw StepRejected(os.str());
    }
    for (auto& v : out.values()) v = std::clamp(v, 0.0, c_hi);
    return out;
}

std::pair<State, StepReport> Stepper::step_coupled(const State& s, double dt) {
    if (!(dt > 0.0)) throw DomainError("step_coupled requires dt > 0");
    std::string last_reason;
    for (int halvings = 0; halvings <= time_.max_halvings; ++halvings, dt *= 0.5) {
        try {
            ScalarField n_new = step_n(s, dt);
            ScalarField c_new = step_c(s, dt);
            VelocityStepInfo vinfo;
            StokesState st = stokes_.velocity_step(s.stokes, n_new, params_, phi_, dt, &vinfo);

            State next;
            next.n = std::move(n_new);
            next.c = std::move(c_new);
            next.stokes = std::move(st);
            next.t = s.t + dt;
            next.step = s.step + 1;

            StepReport r;
            r.dt = dt;
            r.halvings = halvings;
            const double h = grid_.h_min();
            r.cfl_diffusive = dt * 2.0 * grid_.dim() * d_eps(s.n.max(), params_) / (h * h);
            r.cfl_advective = dt * s.stokes.u.max_abs() / h;
            r.cfl_chemotactic = dt * max_chemotactic_speed(s.n, s.c, sens_, rho_, params_) / h;
            r.poisson_iterations = vinfo.poisson_iterations;
            r.yosida_sweeps = vinfo.yosida_sweeps;
            r.divergence = vinfo.divergence;
            r.min_n = next.n.min();
            r.min_c = next.c.min();
            r.max_c = next.c.max();
            r.n_nonnegative = r.min_n >= 0.0;
            r.c_bounds = r.min_c >= 0.0 && r.max_c <= s.c.max();
            r.divergence_ok =
                vinfo.divergence <= solver_settings_.poisson_tolerance * 10.0 * (1.0 + next.stokes.u.max_abs()) / h;
            r.finite = next.n.all_finite() && next.c.all_finite() && next.stokes.u.all_finite();
            r.energy_budget_ok = vinfo.energy_budget_ok;
            return {std::move(next), r};
        } catch (const StepRejected& e) {
            last_reason = e.what();
        }
    }
    throw StepRejected("no step accepted after " + std::to_string(time_.max_halvings) +
                       " halvings (blow-up suspected): " + last_reason);
}

} // namespace cns
