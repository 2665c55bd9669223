#include "cns/scenario.hpp"

#include "cns/error.hpp"
#include "cns/stokes.hpp"

#include <cmath>

namespace cns {

CosineModes::CosineModes(Rng& rng, int dim, int max_mode, std::array<double, 3> extents)
    : dim_(dim), extents_(extents) {
    if (max_mode < 1) throw DomainError("need at least one cosine mode");
    const int kz_max = dim == 3 ? max_mode : 0;
    for (int kz = 0; kz <= kz_max; ++kz)
        for (int ky = 0; ky <= max_mode; ++ky)
            for (int kx = 0; kx <= max_mode; ++kx) {
                if (kx + ky + kz == 0) continue;
                const double decay = 1.0 / (1.0 + kx * kx + ky * ky + kz * kz);
                k_.push_back({kx, ky, kz});
                a_.push_back(rng.uniform(-1.0, 1.0) * decay);
            }
    norm_ = 0.0;
    for (double a : a_) norm_ += std::abs(a);
    if (norm_ == 0.0) norm_ = 1.0;
}

double CosineModes::operator()(double x, double y, double z) const {
    const double pos[3] = {x, y, z};
    double s = 0.0;
    for (std::size_t m = 0; m < a_.size(); ++m) {
        double term = a_[m];
        for (int d = 0; d < dim_; ++d) term *= std::cos(k_[m][d] * M_PI * pos[d] / extents_[d]);
        s += term;
    }
    return s / norm_;
}

ScalarField CosineModes::sample(const Grid& grid, double mean, double amplitude) const {
    ScalarField f(grid);
    grid.for_each_cell([&](int i, int j, int k, std::size_t idx) {
        f[idx] = mean + amplitude * (*this)(grid.center(0, i), grid.center(1, j), grid.center(2, k));
    });
    return f;
}

VectorField random_solenoidal(const Grid& grid, Rng& rng, double amplitude, int max_mode) {
    VectorField u(grid);
    if (grid.dim() == 2) {
        std::vector<std::array<int, 2>> k;
        std::vector<double> b;
        for (int ky = 1; ky <= max_mode; ++ky)
            for (int kx = 1; kx <= max_mode; ++kx) {
                k.push_back({kx, ky});
                b.push_back(rng.uniform(-1.0, 1.0) / (kx * kx + ky * ky));
            }
        const double Lx = grid.extent(0), Ly = grid.extent(1);
        auto psi = [&](int i, int j) {  // at node (i h_x, j h_y)
            const double x = i * grid.h(0), y = j * grid.h(1);
            double s = 0.0;
            for (std::size_t m = 0; m < b.size(); ++m)
                s += b[m] * std::sin(k[m][0] * M_PI * x / Lx) * std::sin(k[m][1] * M_PI * y / Ly);
            return s;
        };
        u.update(0, [&](std::span<double> c) {
            grid.for_each_face(0, [&](int i, int j, int, std::size_t idx) {
                c[idx] = (psi(i, j + 1) - psi(i, j)) / grid.h(1);
            });
        });
        u.update(1, [&](std::span<double> c) {
            grid.for_each_face(1, [&](int i, int j, int, std::size_t idx) {
                c[idx] = -(psi(i + 1, j) - psi(i, j)) / grid.h(0);
            });
        });
    } else {
        std::array<CosineModes, 3> comp;
        for (int a = 0; a < 3; ++a) comp[a] = CosineModes(rng, 3, max_mode, grid.extents());
        u.fill([&](int a, double x, double y, double z) { return comp[a](x, y, z); });
        StokesSolver solver(grid);
        u = solver.project(u).field;
    }
    const double m = u.max_abs();
    if (m > 0.0) u *= amplitude / m;
    return u;
}

double barenblatt(double x, double t, double x0, double C, double m, double c_d) {
    if (!(t > 0.0) || !(m > 1.0)) throw DomainError("Barenblatt profile needs t > 0 and m > 1");
    // n_t = (c_d/m) (n^m)_xx; rescale time to the unit-coefficient equation.
    const double tau = c_d / m * t;
    const double alpha = 1.0 / (m + 1.0);
    const double k = alpha * (m - 1.0) / (2.0 * m);
    const double xi = x - x0;
    const double base = C - k * xi * xi * std::pow(tau, -2.0 * alpha);
    if (base <= 0.0) return 0.0;
    return std::pow(tau, -alpha) * std::pow(base, 1.0 / (m - 1.0));
}

const char* to_string(InitialKind k) {
    switch (k) {
    case InitialKind::random: return "random";
    case InitialKind::uniform: return "uniform";
    case InitialKind::barenblatt: return "barenblatt";
    }
    return "?";
}

InitialKind initial_kind_from_string(const std::string& s) {
    if (s == "random") return InitialKind::random;
    if (s == "uniform") return InitialKind::uniform;
    if (s == "barenblatt") return InitialKind::barenblatt;
    throw ValidationError("unknown initial kind '" + s + "'");
}

const char* to_string(VelocityInit v) { return v == VelocityInit::stokes ? "stokes" : "random"; }

VelocityInit velocity_init_from_string(const std::string& s) {
    if (s == "random") return VelocityInit::random;
    if (s == "stokes") return VelocityInit::stokes;
    throw ValidationError("unknown initial velocity kind '" + s + "'");
}

InitialData make_initial(const InitialSpec& spec, const Grid& grid, const ModelParams& p, const PotentialSpec& phi,
                         std::uint64_t seed) {
    InitialData init{ScalarField(grid, spec.n_mean), ScalarField(grid, spec.c_mean), VectorField(grid)};
    Rng rng(seed);
    switch (spec.kind) {
    case InitialKind::uniform:
        break;
    case InitialKind::random: {
        const CosineModes nm(rng, grid.dim(), spec.modes, grid.extents());
        const CosineModes cm(rng, grid.dim(), spec.modes, grid.extents());
        init.n0 = nm.sample(grid, spec.n_mean, spec.n_amplitude);
        init.c0 = cm.sample(grid, spec.c_mean, spec.c_amplitude);
        if (spec.velocity == VelocityInit::random && spec.u_amplitude > 0.0)
            init.u0 = random_solenoidal(grid, rng, spec.u_amplitude, spec.modes);
        break;
    }
    case InitialKind::barenblatt: {
        const double x0 = 0.5 * grid.extent(0);
        grid.for_each_cell([&](int i, int, int, std::size_t idx) {
            init.n0[idx] = barenblatt(grid.center(0, i), spec.barenblatt_time, x0, spec.barenblatt_height, p.m, p.c_d_lower);
        });
        break;
    }
    }
    if (spec.velocity == VelocityInit::stokes) {
        StokesSolver solver(grid);
        init.u0 = solver.steady_stokes(buoyancy_force(init.n0, phi.on_faces(grid)));
    }
    return init;
}

} // namespace cns
