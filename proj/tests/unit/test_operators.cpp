#include "doctest.h"
#include "support.hpp"

#include "cns/error.hpp"
#include "cns/operators.hpp"
#include "cns/spectral.hpp"

#include <cmath>

using namespace cns;

namespace {

ScalarField sample(const Grid& g, double (*f)(double, double, double)) {
    ScalarField s(g);
    g.for_each_cell([&](int i, int j, int k, std::size_t idx) { s[idx] = f(g.center(0, i), g.center(1, j), g.center(2, k)); });
    return s;
}

double interior_x_face_error(int n) {
    const Grid g(2, {n, 4, 1}, {1.0, 1.0, 1.0});
    const VectorField d = gradient(sample(g, [](double x, double, double) { return std::sin(M_PI * x); }));
    double e = 0.0;
    for (int i = 1; i < n; ++i) e = std::max(e, std::abs(d.face(0, i, 1) - M_PI * std::cos(M_PI * i * g.h(0))));
    return e;
}

} // namespace

TEST_SUITE("discrete_operators") {

TEST_CASE("gradient") {
    const Grid g = Grid::square(8);
    CHECK(gradient(ScalarField(g, 4.0)).max_abs() == 0.0);

    const VectorField d = gradient(sample(g, [](double x, double, double) { return 2.5 * x; }));
    for (int j = 0; j < 8; ++j) {
        for (int i = 1; i < 8; ++i) CHECK(d.face(0, i, j) == doctest::Approx(2.5).epsilon(1e-13));
        CHECK(d.face(0, 0, j) == 0.0);
        CHECK(d.face(0, 8, j) == 0.0);
    }

    const double e32 = interior_x_face_error(32), e64 = interior_x_face_error(64);
    CHECK(e32 / e64 == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("divergence") {
    const Grid g = Grid::square(8);
    VectorField c(g);
    c.fill([](int, double, double, double) { return 1.5; });
    const ScalarField dc = divergence(c);
    for (int j = 1; j < 7; ++j)
        for (int i = 1; i < 7; ++i) CHECK(dc.at(i, j) == 0.0);

    const ScalarField f = testing::noise(g, 21);
    CHECK(testing::max_abs_diff(divergence(gradient(f)), laplacian_neumann(f)) == 0.0);

    const Grid g3 = Grid::cube(5);
    const VectorField v = testing::face_noise(g3, 5);
    const ScalarField dv = divergence(v);
    g3.for_each_cell([&](int i, int j, int k, std::size_t idx) {
        const double ref = (v.face(0, i + 1, j, k) - v.face(0, i, j, k)) / g3.h(0) +
                           (v.face(1, i, j + 1, k) - v.face(1, i, j, k)) / g3.h(1) +
                           (v.face(2, i, j, k + 1) - v.face(2, i, j, k)) / g3.h(2);
        CHECK(dv[idx] == doctest::Approx(ref).epsilon(1e-13));
    });
}

TEST_CASE("laplacian_neumann") {
    const Grid g(2, {32, 8, 1}, {2.0, 1.0, 1.0});
    CHECK(laplacian_neumann(ScalarField(g, 3.0)).max() == 0.0);

    const double L = 2.0, h = g.h(0);
    const ScalarField f = sample(g, [](double x, double, double) { return std::cos(M_PI * x / 2.0); });
    const ScalarField lf = laplacian_neumann(f);
    const double lambda = 2.0 * (1.0 - std::cos(M_PI * h / L)) / (h * h);
    double err_discrete = 0.0, err_continuous = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        err_discrete = std::max(err_discrete, std::abs(lf[i] + lambda * f[i]));
        err_continuous = std::max(err_continuous, std::abs(lf[i] + (M_PI / L) * (M_PI / L) * f[i]));
    }
    CHECK(err_discrete < 1e-12);
    CHECK(err_continuous < h * h);

    for (std::uint64_t seed : {1u, 2u, 3u}) CHECK(std::abs(integrate(laplacian_neumann(testing::noise(g, seed)))) < 1e-12);
}

TEST_CASE("summation by parts") {
    for (const Grid& g : {Grid::square(12), Grid(2, {8, 16, 1}, {0.5, 2.0, 1.0}), Grid::cube(6)}) {
        const ScalarField f = testing::noise(g, 31);
        const VectorField v = testing::face_noise(g, 32);
        const double lhs = dot(gradient(f), v), rhs = -dot(f, divergence(v));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("linearity") {
    const Grid g = Grid::square(10);
    const ScalarField a = testing::noise(g, 41), b = testing::noise(g, 42);
    const ScalarField lhs = laplacian_neumann(2.0 * a + b);
    const ScalarField rhs = 2.0 * laplacian_neumann(a) + laplacian_neumann(b);
    CHECK(testing::max_abs_diff(lhs, rhs) < 1e-10);
    const VectorField u = testing::face_noise(g, 43), w = testing::face_noise(g, 44);
    CHECK(testing::max_abs_diff(divergence(u + w), divergence(u) + divergence(w)) < 1e-12);
}

TEST_CASE("upwind advection") {
    const Grid g = Grid::square(16);
    const ScalarField f = testing::noise(g, 50, 0.0, 1.0);
    auto zero = advect_scalar_upwind(f, VectorField(g), 0.01);
    CHECK(zero.increment.max() == 0.0);
    CHECK(zero.increment.min() == 0.0);

    // Any solenoidal field: discrete curl of a stream function vanishing on the walls.
    Rng rng(51);
    const VectorField v = random_solenoidal(g, rng, 1.0, 3);
    CHECK(divergence(v).max() < 1e-12);
    const double dt = 0.5 * g.h(0) / v.max_abs();
    const auto inc = advect_scalar_upwind(ScalarField(g, 2.0), v, dt);
    CHECK(std::max(inc.increment.max(), -inc.increment.min()) < 1e-14);
    const auto inc2 = advect_scalar_upwind_advective(ScalarField(g, 2.0), v, dt);
    CHECK(std::max(inc2.increment.max(), -inc2.increment.min()) == 0.0);

    CHECK_THROWS_AS(advect_scalar_upwind(f, v, 4.0 * dt), StepRejected);
}

TEST_CASE("upwind top hat") {
    const Grid g(2, {128, 4, 1}, {1.0, 1.0, 1.0});
    ScalarField f(g);
    g.for_each_cell([&](int i, int, int, std::size_t idx) {
        const double x = g.center(0, i);
        f[idx] = x > 0.2 && x < 0.4 ? 1.0 : 0.0;
    });
    VectorField v(g);
    v.fill([](int a, double, double, double) { return a == 0 ? 1.0 : 0.0; });

    auto centroid = [&](const ScalarField& s) {
        double m = 0.0, mx = 0.0;
        g.for_each_cell([&](int i, int, int, std::size_t idx) {
            m += s[idx];
            mx += s[idx] * g.center(0, i);
        });
        return mx / m;
    };
    const double mass0 = integrate(f), x0 = centroid(f);
    const double dt = 0.5 * g.h(0);
    const int steps = static_cast<int>(std::lround(0.25 / dt));
    for (int s = 0; s < steps; ++s) {
        f += advect_scalar_upwind(f, v, dt).increment;
        REQUIRE(f.min() >= -1e-15);
        REQUIRE(f.max() <= 1.0 + 1e-15);
    }
    CHECK(std::abs(integrate(f) - mass0) < 1e-12);
    CHECK(centroid(f) == doctest::Approx(x0 + 0.25).epsilon(1e-10));
}

TEST_CASE("hessian frobenius") {
    const Grid g = Grid::square(16);
    const ScalarField lin = hessian_frobenius(sample(g, [](double x, double y, double) { return 3.0 * x - y; }));
    CHECK(lin.max() < 1e-10);
    const ScalarField q = hessian_frobenius(sample(g, [](double x, double, double) { return 0.5 * x * x; }));
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(q[i] == doctest::Approx(1.0).epsilon(1e-9));
    const ScalarField r = hessian_frobenius(sample(g, [](double x, double y, double) { return 0.5 * (x * x + y * y); }));
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

} // TEST_SUITE

TEST_SUITE("discrete_operators") {

TEST_CASE("spectral neumann inverse") {
    for (const Grid& g : {Grid::square(16), Grid(2, {12, 20, 1}, {3.0, 1.0, 1.0}), Grid::cube(8)}) {
        NeumannSolver s(g);
        ScalarField rhs = testing::noise(g, 60);
        const double mean = integrate(rhs) / g.domain_volume();
        const ScalarField x = s.poisson(rhs);
        CHECK(std::abs(integrate(x)) < 1e-12);
        for (auto& v : rhs.values()) v -= mean;
        CHECK(testing::max_abs_diff(laplacian_neumann(x), rhs) < 1e-9);

        const ScalarField y = s.helmholtz(rhs, 0.3);
        CHECK(testing::max_abs_diff(y - 0.3 * laplacian_neumann(y), rhs) < 1e-11);
    }
}

TEST_CASE("spectral velocity inverse") {
    for (const Grid& g : {Grid::square(16), Grid(2, {8, 12, 1}, {1.0, 2.0, 1.0}), Grid::cube(6)}) {
        VelocityHelmholtzSolver s(g);
        const VectorField rhs = testing::face_noise(g, 61);
        for (auto [shift, scale] : {std::pair{1.0, 0.2}, std::pair{0.0, 1.0}}) {
            const VectorField x = s.solve(rhs, shift, scale);
            VectorField r = shift * x;
            r.axpy(-scale, vector_laplacian(x));
            r -= rhs;
            CHECK(r.max_abs() < 1e-10);
        }
    }
}

} // TEST_SUITE
