#include "doctest.h"
#include "support.hpp"

#include "cns/error.hpp"

#include <cmath>

using namespace cns;

TEST_SUITE("fields_grid") {

TEST_CASE("grid geometry") {
    const Grid g(2, {8, 4, 1}, {2.0, 1.0, 1.0});
    CHECK(g.h(0) == doctest::Approx(0.25));
    CHECK(g.h(1) == doctest::Approx(0.25));
    CHECK(g.cell_volume() == doctest::Approx(0.0625));
    CHECK(g.num_cells() == 32);
    CHECK(g.face_shape(0) == std::array<int, 3>{9, 4, 1});
    CHECK(g.face_shape(1) == std::array<int, 3>{8, 5, 1});
    CHECK(g.cell_index(3, 2, 0) == 3 + 8 * 2);
    CHECK_THROWS_AS(Grid(2, {3, 8, 1}, {1, 1, 1}), ValidationError);
    CHECK_THROWS_AS(Grid(2, {8, 8, 1}, {1, -1, 1}), ValidationError);
    CHECK_THROWS_AS(Grid(4, {8, 8, 8}, {1, 1, 1}), ValidationError);
}

TEST_CASE("integrate") {
    CHECK(integrate(ScalarField(Grid::square(16), 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
    const Grid g(2, {8, 8, 1}, {2.0, 1.0, 1.0});
    CHECK(integrate(ScalarField(g, 3.0)) == doctest::Approx(6.0).epsilon(1e-15));
    ScalarField f(g);
    f.at(2, 5) = 7.0;
    CHECK(integrate(f) == 7.0 * g.cell_volume());
}

TEST_CASE("norm_lp") {
    const Grid g = Grid::square(16);
    CHECK(norm_lp(ScalarField(g, 2.0), INFINITY) == 2.0);
    for (double p : {1.0, 1.5, 2.0, 7.0}) CHECK(norm_lp(ScalarField(g, 1.0), p) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(norm_lp(ScalarField(g, 1.0), 0.5), DomainError);

    // Naive double loop over (i, j) as the reference sum.
    const ScalarField f = testing::noise(g, 7);
    double s = 0.0;
    for (int j = 0; j < 16; ++j)
        for (int i = 0; i < 16; ++i) s += f.at(i, j) * f.at(i, j) / 256.0;
    CHECK(norm_lp(f, 2.0) == doctest::Approx(std::sqrt(s)).epsilon(1e-14));

    double abs_sum = 0.0;
    for (double v : f.values()) abs_sum += std::abs(v);
    ScalarField a = f;
    for (auto& v : a.values()) v = std::abs(v);
    CHECK(norm_lp(f, 1.0) == doctest::Approx(integrate(a)).epsilon(1e-14));
}

TEST_CASE("face_to_center") {
    const Grid g = Grid::square(8);
    VectorField v(g);
    v.fill([](int a, double, double, double) { return a == 0 ? 1.0 : 0.0; });
    auto c = face_to_center(v);
    for (int j = 0; j < 8; ++j)
        for (int i = 1; i < 7; ++i) {
            CHECK(c[0][g.cell_index(i, j, 0)] == 1.0);
            CHECK(c[1][g.cell_index(i, j, 0)] == 0.0);
        }

    VectorField lin(g);
    lin.fill([](int a, double x, double, double) { return a == 0 ? 3.0 * x : 0.0; });
    c = face_to_center(lin);
    for (int j = 0; j < 8; ++j)
        for (int i = 1; i < 7; ++i) CHECK(c[0][g.cell_index(i, j, 0)] == doctest::Approx(3.0 * g.center(0, i)));

    const VectorField r = testing::face_noise(g, 3);
    c = face_to_center(r);
    for (int j = 0; j < 8; ++j)
        for (int i = 0; i < 8; ++i) {
            const std::size_t idx = g.cell_index(i, j, 0);
            CHECK(c[0][idx] == 0.5 * (r.face(0, i, j) + r.face(0, i + 1, j)));
            CHECK(c[1][idx] == 0.5 * (r.face(1, i, j) + r.face(1, i, j + 1)));
        }
}

TEST_CASE("walls stay exactly zero") {
    const Grid g = Grid::cube(6);
    VectorField v(g);
    v.fill([](int, double, double, double) { return 1.0; });
    v.set_face(0, 0, 2, 2, 5.0);
    v.update(1, [](std::span<double> c) {
        for (auto& x : c) x = 4.0;
    });
    v += v;
    v.axpy(2.0, v);
    for (int a = 0; a < 3; ++a) {
        const auto s = g.face_shape(a);
        g.for_each_face(a, [&](int i, int j, int k, std::size_t idx) {
            const int id[3] = {i, j, k};
            if (id[a] == 0 || id[a] == s[a] - 1) CHECK(v.component(a)[idx] == 0.0);
        });
    }
}

TEST_CASE("shape mismatch is rejected") {
    ScalarField a(Grid::square(8)), b(Grid::square(16));
    CHECK_THROWS_AS(a += b, DomainError);
    CHECK_THROWS_AS(dot(a, b), DomainError);
    VectorField u(Grid::square(8)), w(Grid::square(16));
    CHECK_THROWS_AS(dot(u, w), DomainError);
}

} // TEST_SUITE
