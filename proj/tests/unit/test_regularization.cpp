#include "doctest.h"
#include "support.hpp"

#include "cns/error.hpp"
#include "cns/regularization.hpp"

#include <cmath>

using namespace cns;

TEST_SUITE("regularization") {

TEST_CASE("d_eps") {
    ModelParams p;
    p.m = 2.0;
    p.epsilon = 0.1;
    CHECK(d_eps(0.0, p) == doctest::Approx(0.1));
    p.epsilon = 1e-12;
    CHECK(d_eps(1.0, p) == doctest::Approx(1.0));
    p.m = 1.5;
    p.epsilon = 0.5;
    p.c_d_lower = 2.0;
    CHECK(d_eps(3.0, p) == doctest::Approx(3.7416573867739413).epsilon(1e-15));
}

TEST_CASE("f_eps") {
    CHECK(f_eps(0.0, 0.3) == 1.0);
    CHECK(f_eps(10.0, 0.1) == doctest::Approx(0.5));
    for (double eps : {1.0, 0.1, 1e-3}) {
        double prev = 1.0;
        for (int k = 0; k <= 400; ++k) {
            const double n = std::pow(10.0, -4.0 + 0.025 * k);
            const double f = f_eps(n, eps);
            CHECK(f > 0.0);
            CHECK(f <= prev);
            CHECK(n * f <= 1.0 / eps);
            prev = f;
        }
    }
}

TEST_CASE("rho_eps profile") {
    const Grid g = Grid::square(64);
    const CutoffField r = rho_eps(g, 0.01);
    CHECK(r[g.cell_index(32, 32, 0)] == 1.0);
    for (int i = 0; i < 64; ++i) {
        CHECK(r[g.cell_index(i, 0, 0)] == 0.0);
        CHECK(r[g.cell_index(0, i, 0)] == 0.0);
        CHECK(r[g.cell_index(i, 63, 0)] == 0.0);
        CHECK(r[g.cell_index(63, i, 0)] == 0.0);
    }
    for (double v : r.values()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    CHECK(r.width() == doctest::Approx(0.01));

    // Shrinking eps widens the plateau cell by cell.
    const CutoffField a = rho_eps(g, 0.5), b = rho_eps(g, 0.1), c = rho_eps(g, 0.01);
    for (std::size_t i = 0; i < g.num_cells(); ++i) {
        CHECK(a[i] <= b[i]);
        CHECK(b[i] <= c[i]);
    }
    CHECK(rho_eps(Grid::cube(8), 1.0)[Grid::cube(8).cell_index(0, 4, 4)] == 0.0);
    CHECK_THROWS_AS(rho_eps(g, 0.0), DomainError);
    CHECK_THROWS_AS(rho_eps(g, 1.5), DomainError);
}

TEST_CASE("chemotactic flux") {
    const Grid g = Grid::square(16);
    ModelParams p;
    p.epsilon = 0.25;
    SensitivitySpec s;
    const CutoffField ones = CutoffField::ones(g);
    ScalarField cx(g);
    g.for_each_cell([&](int i, int, int, std::size_t idx) { cx[idx] = g.center(0, i); });

    CHECK(chemotactic_flux(ScalarField(g, 1.0), ScalarField(g, 2.0), s, ones, p).max_abs() == 0.0);
    CHECK(chemotactic_flux(ScalarField(g), cx, s, ones, p).max_abs() == 0.0);

    // Scalar family has |S|_F = S_0 = 1, so S_xx = 1/sqrt(2) in two dimensions.
    const VectorField f = chemotactic_flux(ScalarField(g, 1.0), cx, s, ones, p);
    for (int j = 0; j < 16; ++j) {
        for (int i = 1; i < 16; ++i) CHECK(f.face(0, i, j) == doctest::Approx(0.8 / std::sqrt(2.0)).epsilon(1e-13));
        CHECK(f.face(0, 0, j) == 0.0);
        CHECK(f.face(0, 16, j) == 0.0);
    }
    for (std::size_t i = 0; i < f.component(1).size(); ++i) CHECK(f.component(1)[i] == 0.0);
    CHECK(max_chemotactic_speed(ScalarField(g, 1.0), cx, s, ones, p) == doctest::Approx(1.0 / std::sqrt(2.0)));

    ScalarField neg(g, 1.0);
    neg[5] = -1e-9;
    CHECK_THROWS_AS(chemotactic_flux(neg, cx, s, ones, p), DomainError);
    CHECK_THROWS_AS(chemotactic_flux(cx, neg, s, ones, p), DomainError);
}

TEST_CASE("chemotactic flux bound and support") {
    const Grid g = Grid::square(24);
    ModelParams p;
    p.epsilon = 0.1;
    SensitivitySpec s;
    s.family = SensitivityFamily::rotational;
    s.theta = 0.7;
    s.s0_coeffs = {0.5, 0.25};
    const CutoffField rho = rho_eps(g, p.epsilon);
    const ScalarField n = testing::noise(g, 70, 0.0, 50.0), c = testing::noise(g, 71, 0.0, 2.0);
    const VectorField f = chemotactic_flux(n, c, s, rho, p);
    const double speed = max_chemotactic_speed(n, c, s, rho, p);
    CHECK(speed > 0.0);
    CHECK(f.max_abs() <= speed / p.epsilon * (1.0 + 1e-12));
    // Faces touching the boundary ring carry no flux.
    for (int j = 0; j < 24; ++j)
        for (int i : {0, 1, 23, 24}) CHECK(f.face(0, i, j) == 0.0);
}

} // TEST_SUITE
