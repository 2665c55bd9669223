#include "doctest.h"
#include "support.hpp"

#include "cns/error.hpp"
#include "cns/model_config.hpp"

#include <cmath>

using namespace cns;

namespace {

InitialData valid_initial(const Grid& g) { return {ScalarField(g, 1.0), ScalarField(g, 1.0), VectorField(g)}; }

const HypothesisCheck* find(const ValidationReport& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return &c;
    return nullptr;
}

} // namespace

TEST_SUITE("model_config") {

TEST_CASE("validate_params regimes") {
    const Grid g = Grid::square(8);
    ModelParams p;
    p.m = 1.2;
    PotentialSpec phi;
    phi.grad_phi = {0.0, -1.0, 0.0};
    SensitivitySpec s;
    s.family = SensitivityFamily::rotational;
    s.theta = 0.3;

    ValidationReport r = validate_params(p, s, phi, valid_initial(g));
    CHECK(r.all_pass());
    CHECK(r.theorem_regime);
    CHECK(r.may_run(false));

    p.m = 1.0;
    r = validate_params(p, s, phi, valid_initial(g));
    CHECK_FALSE(r.theorem_regime);
    CHECK_FALSE(r.warnings.empty());
    CHECK_FALSE(r.may_run(false));
    CHECK(r.may_run(true));

    p.m = 1.2;
    InitialData bad = valid_initial(g);
    bad.n0.at(3, 3) = -1e-6;
    r = validate_params(p, s, phi, bad);
    CHECK_FALSE(r.all_pass());
    REQUIRE(find(r, "n0 >= 0"));
    CHECK_FALSE(find(r, "n0 >= 0")->pass);

    p.epsilon = NAN;
    CHECK_THROWS_AS(validate_params(p, s, phi, valid_initial(g)), ValidationError);
}

TEST_CASE("validate_params is deterministic") {
    const Grid g = Grid::square(8);
    ModelParams p;
    SensitivitySpec s;
    const auto a = validate_params(p, s, {}, valid_initial(g)).summary();
    const auto b = validate_params(p, s, {}, valid_initial(g)).summary();
    CHECK(a == b);
}

TEST_CASE("theorem regime threshold") {
    ModelParams p;
    p.m = 10.0 / 9.0;
    CHECK_FALSE(p.theorem_regime());
    p.m = 1.12;
    CHECK(p.theorem_regime());
}

TEST_CASE("sensitivity families") {
    const std::array<double, 3> x{0.3, 0.4, 0.5};
    SensitivitySpec scalar;
    Tensor S = eval_sensitivity(scalar, 2, x, 3.0, 2.0);
    CHECK(S[0][1] == 0.0);
    CHECK(S[0][0] == S[1][1]);
    CHECK(frobenius(S, 2) == doctest::Approx(1.0));

    // theta = pi/2 rotation, S_0(c) = c: c [[0,-1],[1,0]] has norm c sqrt(2)
    // before rescaling, c after.
    SensitivitySpec rot;
    rot.family = SensitivityFamily::rotational;
    rot.theta = M_PI / 2;
    rot.s0_coeffs = {0.0, 1.0};
    S = eval_sensitivity(rot, 2, x, 1.0, 3.0);
    CHECK(S[0][0] == doctest::Approx(0.0));
    CHECK(S[0][1] == doctest::Approx(-3.0 / std::sqrt(2.0)));
    CHECK(S[1][0] == doctest::Approx(3.0 / std::sqrt(2.0)));
    CHECK(frobenius(S, 2) == doctest::Approx(3.0));

    SensitivitySpec sat;
    sat.family = SensitivityFamily::saturating;
    for (double n : {0.0, 0.5, 10.0}) CHECK(frobenius(eval_sensitivity(sat, 3, x, n, 1.0), 3) <= 1.0 + 1e-15);
    CHECK(frobenius(eval_sensitivity(sat, 2, x, 1.0, 1.0), 2) == doctest::Approx(0.5));

    CHECK_THROWS_AS(eval_sensitivity(scalar, 2, x, -1.0, 1.0), DomainError);
    CHECK_THROWS_AS(eval_sensitivity(scalar, 2, x, 1.0, -1.0), DomainError);
}

TEST_CASE("sensitivity bound holds on random samples") {
    Rng rng(11);
    for (auto fam : {SensitivityFamily::scalar, SensitivityFamily::rotational, SensitivityFamily::saturating})
        for (int dim : {2, 3}) {
            SensitivitySpec s;
            s.family = fam;
            s.s0_coeffs = {0.5, 0.2, 0.01};
            s.theta = 1.1;
            s.axis = {1.0, 2.0, -0.5};
            for (int k = 0; k < 1000; ++k) {
                const std::array<double, 3> x{rng.uniform(), rng.uniform(), rng.uniform()};
                const double n = rng.uniform(0, 100), c = rng.uniform(0, 100);
                CHECK(frobenius(eval_sensitivity(s, dim, x, n, c), dim) <= s.s0(c) + 1e-12);
            }
        }
}

TEST_CASE("exponent table") {
    const ExponentTable a = theorem_exponents(Rational(2));
    CHECK(a.n_exponent == Rational(8, 3));
    REQUIRE(a.grad_n_exponent);
    CHECK(*a.grad_n_exponent == Rational(2));
    CHECK(a.gamma1 == Rational(8, 5));
    CHECK(a.gamma2 == Rational(20, 11));

    const ExponentTable b = theorem_exponents(Rational(3));
    CHECK(b.n_exponent == Rational(16, 3));
    CHECK_FALSE(b.grad_n_exponent);
    CHECK(b.gamma1 == Rational(16, 11));
    CHECK(b.gamma2 == Rational(5, 4));

    CHECK_THROWS_AS(theorem_exponents(Rational(10, 9)), DomainError);
    CHECK_NOTHROW(theorem_exponents(Rational(10, 9) + Rational(1, 1000)));
}

TEST_CASE("rational arithmetic") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(1, -3) == Rational(-1, 3));
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(Rational(1, 2) / Rational(3, 4) == Rational(2, 3));
    CHECK(Rational(8, 3).str() == "8/3");
    CHECK(Rational(2).str() == "2");
    CHECK(Rational(1, 3) < Rational(1, 2));
}

TEST_CASE("potential sup norm") {
    PotentialSpec phi;
    phi.grad_phi = {3.0, -4.0, 0.0};
    CHECK(phi.sup_norm(2) == doctest::Approx(5.0));
    const VectorField f = phi.on_faces(Grid::square(8));
    CHECK(f.face(0, 3, 3) == 3.0);
    CHECK(f.face(0, 0, 3) == 0.0);
}

} // TEST_SUITE
