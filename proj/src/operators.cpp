#include "cns/operators.hpp"

#include "cns/error.hpp"

#include <algorithm>
#include <cmath>

namespace cns {

VectorField gradient(const ScalarField& f) {
    const Grid& g = f.grid();
    VectorField out(g);
    for (int a = 0; a < g.dim(); ++a) {
        const double inv_h = 1.0 / g.h(a);
        const std::size_t cs = g.stride(a);
        out.update(a, [&](std::span<double> c) {
            g.for_each_face(a, [&](int i, int j, int k, std::size_t fidx) {
                const int id[3] = {i, j, k};
                if (id[a] == 0 || id[a] == g.cells(a)) return;
                const std::size_t right = g.cell_index(i, j, k);
                c[fidx] = (f[right] - f[right - cs]) * inv_h;
            });
        });
    }
    return out;
}

ScalarField divergence(const VectorField& v) {
    const Grid& g = v.grid();
    ScalarField out(g);
    for (int a = 0; a < g.dim(); ++a) {
        const double inv_h = 1.0 / g.h(a);
        const auto comp = v.component(a);
        const std::size_t fs = g.face_stride(a, a);
        g.for_each_cell([&](int i, int j, int k, std::size_t idx) {
            const std::size_t f = g.face_index(a, i, j, k);
            out[idx] += (comp[f + fs] - comp[f]) * inv_h;
        });
    }
    return out;
}

ScalarField laplacian_neumann(const ScalarField& f) { return divergence(gradient(f)); }

VectorField vector_laplacian(const VectorField& v) {
    const Grid& g = v.grid();
    VectorField out(g);
    for (int a = 0; a < g.dim(); ++a) {
        const auto u = v.component(a);
        const auto shape = g.face_shape(a);
        out.update(a, [&](std::span<double> c) {
            g.for_each_face(a, [&](int i, int j, int k, std::size_t idx) {
                const int id[3] = {i, j, k};
                if (id[a] == 0 || id[a] == g.cells(a)) return;
                double acc = 0.0;
                for (int b = 0; b < g.dim(); ++b) {
                    const double inv_h2 = 1.0 / (g.h(b) * g.h(b));
                    const std::size_t s = g.face_stride(a, b);
                    const double centre = u[idx];
                    double lo, hi;
                    if (b == a) {
                        // Boundary faces along the normal direction hold zero.
                        lo = u[idx - s];
                        hi = u[idx + s];
                    } else {
                        lo = id[b] > 0 ? u[idx - s] : -centre;
                        hi = id[b] < shape[b] - 1 ? u[idx + s] : -centre;
                    }
                    acc += (hi - 2.0 * centre + lo) * inv_h2;
                }
                c[idx] = acc;
            });
        });
    }
    return out;
}

std::array<ScalarField, 3> cell_gradient(const ScalarField& f) { return face_to_center(gradient(f)); }

namespace {

template <bool Conservative>
AdvectionIncrement advect_impl(const ScalarField& f, const VectorField& v, double dt) {
    const Grid& g = f.grid();
    require_same_grid(g, v.grid(), "advection");
    AdvectionIncrement r{ScalarField(g), 0.0};
    ScalarField outflow(g);  // sum of outgoing face speeds / h, per cell
    for (int a = 0; a < g.dim(); ++a) {
        const double inv_h = 1.0 / g.h(a);
        const auto comp = v.component(a);
        const std::size_t cs = g.stride(a);
        g.for_each_face(a, [&](int i, int j, int k, std::size_t fidx) {
            const int id[3] = {i, j, k};
            if (id[a] == 0 || id[a] == g.cells(a)) return;
            const double s = comp[fidx];
            if (s == 0.0) return;
            const std::size_t right = g.cell_index(i, j, k);
            const std::size_t left = right - cs;
            if (Conservative) {
                const double flux = s * (s > 0.0 ? f[left] : f[right]) * inv_h;
                r.increment[left] -= dt * flux;
                r.increment[right] += dt * flux;
            } else {
                // The downwind cell relaxes towards its upwind neighbour.
                if (s > 0.0)
                    r.increment[right] += dt * s * inv_h * (f[left] - f[right]);
                else
                    r.increment[left] += dt * (-s) * inv_h * (f[right] - f[left]);
            }
            if (Conservative) {
                outflow[s > 0.0 ? left : right] += std::abs(s) * inv_h;
            } else {
                outflow[s > 0.0 ? right : left] += std::abs(s) * inv_h;
            }
        });
    }
    r.cfl = dt * outflow.max();
    if (r.cfl > 1.0) throw StepRejected("advective CFL number " + std::to_string(r.cfl) + " exceeds 1");
    return r;
}

} // namespace

AdvectionIncrement advect_scalar_upwind(const ScalarField& f, const VectorField& v, double dt) {
    return advect_impl<true>(f, v, dt);
}

AdvectionIncrement advect_scalar_upwind_advective(const ScalarField& f, const VectorField& v, double dt) {
    return advect_impl<false>(f, v, dt);
}

ScalarField hessian_frobenius(const ScalarField& f) {
    const Grid& g = f.grid();
    const int d = g.dim();
    ScalarField out(g);
    auto clampi = [&](int idx, int axis) { return std::clamp(idx, 1, g.cells(axis) - 2); };
    g.for_each_cell([&](int i, int j, int k, std::size_t idx) {
        int c[3] = {i, j, k};
        double sum = 0.0;
        for (int a = 0; a < d; ++a) {
            // Second difference centred on the nearest cell with two neighbours.
            int p[3] = {c[0], c[1], c[2]};
            p[a] = clampi(c[a], a);
            const std::size_t m = g.cell_index(p[0], p[1], p[2]);
            const std::size_t s = g.stride(a);
            const double faa = (f[m + s] - 2.0 * f[m] + f[m - s]) / (g.h(a) * g.h(a));
            sum += faa * faa;
            for (int b = a + 1; b < d; ++b) {
                int q[3] = {c[0], c[1], c[2]};
                q[a] = clampi(c[a], a);
                q[b] = clampi(c[b], b);
                const std::size_t mm = g.cell_index(q[0], q[1], q[2]);
                const std::size_t sa = g.stride(a), sb = g.stride(b);
                const double fab = (f[mm + sa + sb] - f[mm + sa - sb] - f[mm - sa + sb] + f[mm - sa - sb]) /
                                   (4.0 * g.h(a) * g.h(b));
                sum += 2.0 * fab * fab;
            }
        }
        out[idx] = std::sqrt(sum);
    });
    return out;
}

} // namespace cns
