#include "cns/stokes.hpp"

#include "cns/error.hpp"
#include "cns/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cns {

namespace {

double mean(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s / static_cast<double>(f.size());
}

void remove_mean(ScalarField& f) {
    const double m = mean(f);
    for (auto& v : f.values()) v -= m;
}

double raw_dot(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

PoissonSolver::PoissonSolver(const Grid& grid, const SolverSettings& settings)
    : grid_(grid), settings_(settings), fast_(grid) {}

ScalarField PoissonSolver::solve(const ScalarField& rhs, SolveStats* stats) {
    require_same_grid(grid_, rhs.grid(), "Poisson solve");
    // CG on the SPD operator -L restricted to mean-zero fields.
    ScalarField b = rhs;
    remove_mean(b);
    b *= -1.0;
    ScalarField x(grid_);
    const double b_norm = std::sqrt(raw_dot(b, b));
    if (stats) *stats = {0, 0.0};
    if (b_norm == 0.0) return x;

    auto precondition = [&](const ScalarField& r) {
        ScalarField z = r;
        if (settings_.spectral_preconditioner) {
            z = fast_.poisson(r);
            z *= -1.0;
        }
        remove_mean(z);
        return z;
    };

    ScalarField r = b;
    ScalarField z = precondition(r);
    ScalarField p = z;
    double rz = raw_dot(r, z);
    double rel = 1.0;
    for (int it = 1; it <= settings_.poisson_max_iterations; ++it) {
        ScalarField Ap = laplacian_neumann(p);
        Ap *= -1.0;
        const double pAp = raw_dot(p, Ap);
        if (!(pAp > 0.0)) break;
        const double alpha = rz / pAp;
        x.axpy(alpha, p);
        r.axpy(-alpha, Ap);
        remove_mean(r);
        rel = std::sqrt(raw_dot(r, r)) / b_norm;
        if (rel <= settings_.poisson_tolerance) {
            remove_mean(x);
            if (stats) *stats = {it, rel};
            return x;
        }
        z = precondition(r);
        const double rz_new = raw_dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
    }
    std::ostringstream os;
    os << "pressure Poisson solver did not converge: relative residual " << rel;
    throw SolverError(os.str(), rel, settings_.poisson_max_iterations);
}

// ---------------------------------------------------------------------------

StokesSolver::StokesSolver(const Grid& grid, const SolverSettings& settings)
    : grid_(grid), settings_(settings), poisson_(grid, settings), helmholtz_(grid) {}

Projection StokesSolver::project(const VectorField& v, SolveStats* stats) {
    require_same_grid(grid_, v.grid(), "projection");
    ScalarField phi = poisson_.solve(divergence(v), stats);
    VectorField w = v;
    w.axpy(-1.0, gradient(phi));
    return {std::move(w), std::move(phi)};
}

VectorField StokesSolver::helmholtz(const VectorField& rhs, double alpha) { return helmholtz_.solve(rhs, alpha); }

VectorField StokesSolver::yosida_apply(const VectorField& w_in, double eps, int* sweeps) {
    require_same_grid(grid_, w_in.grid(), "Yosida operator");
    if (!(eps >= 0.0)) throw DomainError("Yosida parameter must be nonnegative");
    if (sweeps) *sweeps = 0;
    const double in_norm = norm_l2(w_in);
    if (in_norm == 0.0) return VectorField(grid_);

    VectorField w = w_in;
    const double div_in = norm_lp(divergence(w_in), 2.0);
    if (div_in > settings_.yosida_tolerance * in_norm / grid_.h_min()) w = project(w_in).field;
    const double w_norm = norm_l2(w);
    if (w_norm == 0.0) return VectorField(grid_);

    if (!yosida_pressure_ || yosida_eps_ != eps) {
        yosida_pressure_ = ScalarField(grid_);
        yosida_eps_ = eps;
    }
    try {
        return resolvent(w, 1.0, eps, *yosida_pressure_, sweeps);
    } catch (const SolverError&) {
        yosida_pressure_.reset();
        throw;
    }
}

VectorField StokesSolver::steady_stokes(const VectorField& f, int* sweeps) {
    require_same_grid(grid_, f.grid(), "steady Stokes");
    if (sweeps) *sweeps = 0;
    const VectorField w = project(f).field;
    if (norm_l2(w) == 0.0) return VectorField(grid_);
    ScalarField pi(grid_);
    return resolvent(w, 0.0, 1.0, pi, sweeps);
}

VectorField StokesSolver::resolvent(const VectorField& w, double shift, double scale, ScalarField& pi, int* sweeps) {
    const double w_norm = norm_l2(w);
    double corr = INFINITY;
    for (int k = 1; k <= settings_.yosida_max_sweeps; ++k) {
        VectorField rhs = w;
        rhs.axpy(-1.0, gradient(pi));
        VectorField half = helmholtz_.solve(rhs, shift, scale);
        const ScalarField div_half = divergence(half);
        ScalarField phi = poisson_.solve(div_half);
        const VectorField grad_phi = gradient(phi);
        half.axpy(-1.0, grad_phi);
        // Cahouet-Chabard update: pi += (shift - scale L) phi.
        pi.axpy(shift, phi);
        pi.axpy(-scale, div_half);
        // Relative to the iterate itself when there is no identity part.
        corr = norm_l2(grad_phi) / (shift == 0.0 ? std::max(norm_l2(half), 1e-300) : w_norm);
        if (corr <= settings_.yosida_tolerance) {
            if (sweeps) *sweeps = k;
            return half;
        }
    }
    std::ostringstream os;
    os << "Stokes resolvent iteration did not converge: relative correction " << corr;
    throw SolverError(os.str(), corr, settings_.yosida_max_sweeps);
}

VectorField convection_skew(const VectorField& a, const VectorField& u) {
    const Grid& g = u.grid();
    require_same_grid(g, a.grid(), "convection");
    const int d = g.dim();
    VectorField out(g);
    for (int c = 0; c < d; ++c) {
        const auto uc = u.component(c);
        const auto shape = g.face_shape(c);
        out.update(c, [&](std::span<double> dst) {
            g.for_each_face(c, [&](int i, int j, int k, std::size_t idx) {
                const int id[3] = {i, j, k};
                if (id[c] == 0 || id[c] == g.cells(c)) return;
                double acc = 0.0;
                // Along the component's own axis: CV faces sit at the adjacent
                // cell centres, transported by the averaged normal velocity.
                {
                    const auto ac = a.component(c);
                    const std::size_t s = g.face_stride(c, c);
                    const double fe = 0.5 * (ac[idx] + ac[idx + s]);
                    const double fw = 0.5 * (ac[idx - s] + ac[idx]);
                    acc += (fe * uc[idx + s] - fw * uc[idx - s]) / g.h(c);
                }
                // Tangential axes: fluxes of a_b interpolated to this face's
                // position along c. Wall faces carry zero flux.
                for (int b = 0; b < d; ++b) {
                    if (b == c) continue;
                    const auto ab = a.component(b);
                    const std::size_t s = g.face_stride(c, b);
                    int lo[3] = {i, j, k};
                    lo[c] -= 1;  // cell on the low side along c
                    int hi[3] = {i, j, k};
                    const std::size_t bs = g.face_stride(b, b);
                    const std::size_t blo = g.face_index(b, lo[0], lo[1], lo[2]);
                    const std::size_t bhi = g.face_index(b, hi[0], hi[1], hi[2]);
                    const double fs = 0.5 * (ab[blo] + ab[bhi]);
                    const double fn = 0.5 * (ab[blo + bs] + ab[bhi + bs]);
                    const double un = id[b] < shape[b] - 1 ? uc[idx + s] : 0.0;
                    const double us = id[b] > 0 ? uc[idx - s] : 0.0;
                    acc += (fn * un - fs * us) / g.h(b);
                }
                dst[idx] = 0.5 * acc;
            });
        });
    }
    return out;
}

VectorField buoyancy_force(const ScalarField& n, const VectorField& grad_phi_faces) {
    const Grid& g = n.grid();
    require_same_grid(g, grad_phi_faces.grid(), "buoyancy");
    VectorField out(g);
    for (int a = 0; a < g.dim(); ++a) {
        const auto gp = grad_phi_faces.component(a);
        const std::size_t cs = g.stride(a);
        out.update(a, [&](std::span<double> dst) {
            g.for_each_face(a, [&](int i, int j, int k, std::size_t idx) {
                const int id[3] = {i, j, k};
                if (id[a] == 0 || id[a] == g.cells(a)) return;
                const std::size_t R = g.cell_index(i, j, k);
                dst[idx] = 0.5 * (n[R] + n[R - cs]) * gp[idx];
            });
        });
    }
    return out;
}

double dirichlet_energy(const VectorField& u) { return -dot(vector_laplacian(u), u); }

StokesState StokesSolver::velocity_step(const StokesState& state, const ScalarField& n, const ModelParams& p,
                                        const PotentialSpec& phi, double dt, VelocityStepInfo* info) {
    if (!(dt > 0.0)) throw DomainError("velocity_step requires dt > 0");
    require_same_grid(grid_, state.u.grid(), "velocity step");
    require_same_grid(grid_, n.grid(), "velocity step density");
    const VectorField& u = state.u;
    VelocityStepInfo local;

    const VectorField buoy = buoyancy_force(n, phi.on_faces(grid_));
    VectorField force = buoy;
    if (p.kappa != 0.0 && u.max_abs() > 0.0) {
        const VectorField a = yosida_apply(u, p.epsilon, &local.yosida_sweeps);
        force.axpy(-p.kappa, convection_skew(a, u));
    }
    SolveStats st;
    Projection pf = project(force, &st);
    local.poisson_iterations += st.iterations;

    VectorField rhs = u;
    rhs.axpy(dt, pf.field);
    VectorField star = helmholtz_.solve(rhs, dt);
    Projection pu = project(star, &st);
    local.poisson_iterations += st.iterations;

    StokesState next;
    next.u = std::move(pu.field);
    next.pressure = pf.potential;
    next.pressure.axpy(1.0 / dt, pu.potential);

    local.divergence = norm_lp(divergence(next.u), INFINITY);
    const double k_old = 0.5 * dot(u, u);
    const double k_new = 0.5 * dot(next.u, next.u);
    local.kinetic_change_rate = (k_new - k_old) / dt;
    local.buoyancy_power = dot(buoy, u);
    // |P(u + dt Pf)| bound: the excess over <f, u> is at most dt |Pf|^2 / 2,
    // plus round-off of the solves.
    local.energy_slack = 0.5 * dt * dot(pf.field, pf.field) + 1e-9 * (k_old + k_new + 1e-300) / dt;
    local.energy_budget_ok = local.kinetic_change_rate <= local.buoyancy_power + local.energy_slack;
    if (info) *info = local;
    return next;
}

} // namespace cns
