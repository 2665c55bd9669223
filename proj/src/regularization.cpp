#include "cns/regularization.hpp"

#include "cns/error.hpp"
#include "cns/operators.hpp"

#include <algorithm>
#include <cmath>

namespace cns {

double d_eps(double n, const ModelParams& p) { return p.c_d_lower * std::pow(n + p.epsilon, p.m - 1.0); }

double f_eps(double n, double eps) { return 1.0 / (1.0 + eps * n); }

CutoffField::CutoffField(const Grid& grid, std::vector<double> values, double width)
    : grid_(grid), values_(std::move(values)), width_(width) {
    if (values_.size() != grid_.num_cells()) throw DomainError("cut-off field length does not match grid");
}

CutoffField CutoffField::ones(const Grid& grid) { return CutoffField(grid, std::vector<double>(grid.num_cells(), 1.0), 0.0); }

CutoffField rho_eps(const Grid& grid, double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("rho_eps requires 0 < eps <= 1");
    double min_extent = grid.extent(0), h_max = grid.h(0);
    for (int a = 1; a < grid.dim(); ++a) {
        min_extent = std::min(min_extent, grid.extent(a));
        h_max = std::max(h_max, grid.h(a));
    }
    const double w = eps * min_extent;
    std::vector<double> v(grid.num_cells());
    grid.for_each_cell([&](int i, int j, int k, std::size_t idx) {
        const int id[3] = {i, j, k};
        double d = INFINITY;
        bool ring = false;
        for (int a = 0; a < grid.dim(); ++a) {
            const double x = grid.center(a, id[a]);
            d = std::min({d, x, grid.extent(a) - x});
            ring = ring || id[a] == 0 || id[a] == grid.cells(a) - 1;
        }
        if (ring) {
            v[idx] = 0.0;
            return;
        }
        const double t = std::clamp((d - h_max) / w, 0.0, 1.0);
        v[idx] = t * t * (3.0 - 2.0 * t);
    });
    return CutoffField(grid, std::move(v), w);
}

namespace {

// Visits every interior face with the face-normal chemotactic speed
// v = rho (S grad c)_axis evaluated at the upwinded density; calls
// visit(axis, face index, n_up, v).
template <class Visit>
void for_each_chemotactic_face(const ScalarField& n, const ScalarField& c, const SensitivitySpec& s,
                               const CutoffField& rho, Visit&& visit) {
    const Grid& g = n.grid();
    require_same_grid(g, c.grid(), "chemotactic flux");
    require_same_grid(g, rho.grid(), "chemotactic flux cut-off");
    if (s.is_zero()) return;
    const int d = g.dim();
    const auto cg = cell_gradient(c);
    const bool n_dependent = s.family == SensitivityFamily::saturating;
    for (int a = 0; a < d; ++a) {
        const double inv_h = 1.0 / g.h(a);
        const std::size_t cs = g.stride(a);
        g.for_each_face(a, [&](int i, int j, int k, std::size_t fidx) {
            const int id[3] = {i, j, k};
            if (id[a] == 0 || id[a] == g.cells(a)) return;
            const std::size_t R = g.cell_index(i, j, k);
            const std::size_t L = R - cs;
            const double r = std::min(rho[L], rho[R]);
            if (r == 0.0) return;
            std::array<double, 3> grad{0.0, 0.0, 0.0};
            for (int b = 0; b < d; ++b) grad[b] = b == a ? (c[R] - c[L]) * inv_h : 0.5 * (cg[b][L] + cg[b][R]);
            std::array<double, 3> x{g.center(0, i), g.center(1, j), g.center(2, k)};
            x[a] = id[a] * g.h(a);
            const double cf = 0.5 * (c[L] + c[R]);
            auto speed = [&](double nn) {
                const Tensor S = eval_sensitivity(s, d, x, nn, cf);
                double v = 0.0;
                for (int b = 0; b < d; ++b) v += S[a][b] * grad[b];
                return r * v;
            };
            double v = speed(0.5 * (n[L] + n[R]));
            const double n_up = v > 0.0 ? n[L] : n[R];
            if (n_dependent) v = speed(n_up);
            visit(a, fidx, n_up, v);
        });
    }
}

void require_nonnegative(const ScalarField& f, const char* what) {
    if (f.min() < 0.0) throw DomainError(std::string("negative values in ") + what);
}

} // namespace

VectorField chemotactic_flux(const ScalarField& n, const ScalarField& c, const SensitivitySpec& s,
                             const CutoffField& rho, const ModelParams& p) {
    require_nonnegative(n, "n (chemotactic flux)");
    require_nonnegative(c, "c (chemotactic flux)");
    const Grid& g = n.grid();
    VectorField out(g);
    std::array<std::vector<double>, 3> buf;
    for (int a = 0; a < g.dim(); ++a) buf[a].assign(g.num_faces(a), 0.0);
    for_each_chemotactic_face(n, c, s, rho, [&](int a, std::size_t f, double n_up, double v) {
        buf[a][f] = n_up * f_eps(n_up, p.epsilon) * v;
    });
    for (int a = 0; a < g.dim(); ++a)
        out.update(a, [&](std::span<double> comp) { std::copy(buf[a].begin(), buf[a].end(), comp.begin()); });
    return out;
}

double max_chemotactic_speed(const ScalarField& n, const ScalarField& c, const SensitivitySpec& s,
                             const CutoffField& rho, const ModelParams&) {
    double m = 0.0;
    for_each_chemotactic_face(n, c, s, rho, [&](int, std::size_t, double, double v) { m = std::max(m, std::abs(v)); });
    return m;
}

} // namespace cns
