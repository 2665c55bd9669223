#include "cns/spectral.hpp"

#include "cns/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace cns {

namespace {

// FFTW's planner is not re-entrant; execution of an existing plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

double mode_eigenvalue(int freq, int n, double h) {
    return (2.0 - 2.0 * std::cos(std::numbers::pi * freq / n)) / (h * h);
}

} // namespace

struct SpectralTransform::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    ~Plans() {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }
};

SpectralTransform::SpectralTransform(const Grid& grid, Kind kind, int axis) : plans_(std::make_unique<Plans>()) {
    const int d = grid.dim();
    // Per-axis transform length, FFTW kinds and eigenvalues (x fastest).
    std::array<int, 3> len{1, 1, 1};
    std::array<fftw_r2r_kind, 3> fwd{}, bwd{};
    std::array<std::vector<double>, 3> eig;
    norm_ = 1.0;
    for (int b = 0; b < d; ++b) {
        const int N = grid.cells(b);
        const double h = grid.h(b);
        if (kind == Kind::neumann_cells) {
            len[b] = N;
            fwd[b] = FFTW_REDFT10;
            bwd[b] = FFTW_REDFT01;
            for (int k = 0; k < N; ++k) eig[b].push_back(mode_eigenvalue(k, N, h));
            norm_ *= 2.0 * N;
        } else if (b == axis) {
            len[b] = N - 1;
            fwd[b] = FFTW_RODFT00;
            bwd[b] = FFTW_RODFT00;
            for (int k = 1; k < N; ++k) eig[b].push_back(mode_eigenvalue(k, N, h));
            norm_ *= 2.0 * N;
        } else {
            len[b] = N;
            fwd[b] = FFTW_RODFT10;
            bwd[b] = FFTW_RODFT01;
            for (int k = 1; k <= N; ++k) eig[b].push_back(mode_eigenvalue(k, N, h));
            norm_ *= 2.0 * N;
        }
    }
    for (int b = d; b < 3; ++b) eig[b] = {0.0};

    n_total_ = static_cast<std::size_t>(len[0]) * len[1] * len[2];
    eig_.resize(n_total_);
    std::size_t idx = 0;
    for (int k = 0; k < len[2]; ++k)
        for (int j = 0; j < len[1]; ++j)
            for (int i = 0; i < len[0]; ++i) eig_[idx++] = eig[0][i] + eig[1][j] + eig[2][k];

    work_.assign(n_total_, 0.0);
    // FFTW wants the slowest-varying dimension first.
    std::array<int, 3> n_rev{};
    std::array<fftw_r2r_kind, 3> f_rev{}, b_rev{};
    for (int b = 0; b < d; ++b) {
        n_rev[b] = len[d - 1 - b];
        f_rev[b] = fwd[d - 1 - b];
        b_rev[b] = bwd[d - 1 - b];
    }
    std::lock_guard lock(planner_mutex());
    plans_->forward = fftw_plan_r2r(d, n_rev.data(), work_.data(), work_.data(), f_rev.data(), FFTW_ESTIMATE);
    plans_->backward = fftw_plan_r2r(d, n_rev.data(), work_.data(), work_.data(), b_rev.data(), FFTW_ESTIMATE);
    if (!plans_->forward || !plans_->backward) throw Error(Status::internal, "FFTW planning failed");
}

SpectralTransform::~SpectralTransform() = default;

void SpectralTransform::solve(std::span<double> data, double shift, double scale) {
    if (data.size() != n_total_) throw DomainError("spectral solve: size mismatch");
    std::copy(data.begin(), data.end(), work_.begin());
    fftw_execute_r2r(plans_->forward, work_.data(), work_.data());
    const double inv_norm = 1.0 / norm_;
    for (std::size_t i = 0; i < n_total_; ++i) {
        const double denom = shift + scale * eig_[i];
        work_[i] = denom == 0.0 ? 0.0 : work_[i] * inv_norm / denom;
    }
    fftw_execute_r2r(plans_->backward, work_.data(), work_.data());
    std::copy(work_.begin(), work_.end(), data.begin());
}

// ---------------------------------------------------------------------------

ScalarField NeumannSolver::poisson(const ScalarField& rhs) {
    require_same_grid(grid_, rhs.grid(), "Neumann Poisson");
    // -L x = -rhs; the zero mode is dropped, which removes the mean of rhs.
    ScalarField x = rhs;
    x *= -1.0;
    t_.solve(x.values(), 0.0, 1.0);
    return x;
}

ScalarField NeumannSolver::helmholtz(const ScalarField& rhs, double alpha) {
    require_same_grid(grid_, rhs.grid(), "Neumann Helmholtz");
    ScalarField x = rhs;
    t_.solve(x.values(), 1.0, alpha);
    return x;
}

// ---------------------------------------------------------------------------

VelocityHelmholtzSolver::VelocityHelmholtzSolver(const Grid& grid) : grid_(grid) {
    for (int a = 0; a < grid.dim(); ++a)
        t_.push_back(std::make_unique<SpectralTransform>(grid, SpectralTransform::Kind::dirichlet_faces, a));
}

VectorField VelocityHelmholtzSolver::solve(const VectorField& rhs, double shift, double scale) {
    require_same_grid(grid_, rhs.grid(), "velocity Helmholtz");
    VectorField out(grid_);
    for (int a = 0; a < grid_.dim(); ++a) {
        auto& t = *t_[a];
        scratch_.resize(t.size());
        const auto src = rhs.component(a);
        const auto shape = grid_.face_shape(a);
        // Gather interior faces (normal index 1..N_a-1) into a dense block.
        std::size_t n = 0;
        grid_.for_each_face(a, [&](int i, int j, int k, std::size_t idx) {
            const int id[3] = {i, j, k};
            if (id[a] == 0 || id[a] == shape[a] - 1) return;
            scratch_[n++] = src[idx];
        });
        t.solve(scratch_, shift, scale);
        out.update(a, [&](std::span<double> c) {
            std::size_t m = 0;
            grid_.for_each_face(a, [&](int i, int j, int k, std::size_t idx) {
                const int id[3] = {i, j, k};
                if (id[a] == 0 || id[a] == shape[a] - 1) return;
                c[idx] = scratch_[m++];
            });
        });
    }
    return out;
}

} // namespace cns
