#include "doctest.h"
#include "support.hpp"

#include "cns/error.hpp"
#include "cns/simulation.hpp"
#include "cns/timestepper.hpp"

#include <cmath>

using namespace cns;

namespace {

State uniform_state(const Grid& g, double n, double c) {
    State s = State::zeros(g);
    s.n = ScalarField(g, n);
    s.c = ScalarField(g, c);
    return s;
}

struct RandomScenario {
    Grid grid = Grid::square(16, 4.0);
    ModelParams params;
    SensitivitySpec sens;
    PotentialSpec phi;
    State s0;
    explicit RandomScenario(std::uint64_t seed, double horizon = 1.0) {
        params.m = 1.5;
        sens.family = SensitivityFamily::rotational;
        sens.theta = 0.5;
        sens.s0_coeffs = {0.5};
        phi.grad_phi = {0.0, -1.0, 0.0};
        InitialSpec spec;
        spec.n_mean = 0.5;
        spec.n_amplitude = 0.25;
        spec.c_amplitude = 0.3;
        spec.u_amplitude = 0.5;
        spec.modes = 2;
        s0 = State::from_initial(make_initial(spec, grid, params, phi, seed));
        time.horizon = horizon;
    }
    TimeSettings time;
    Stepper stepper() const { return Stepper(grid, params, sens, phi, {}, time); }
};

} // namespace

TEST_SUITE("timestepper") {

TEST_CASE("stable_dt") {
    const Grid g = Grid::square(64);
    ModelParams p;
    p.m = 2.0;
    p.epsilon = 0.1;
    Stepper st(g, p, {}, {});
    // Only the diffusive candidate is active: 0.9 h^2 / (4 * 0.1).
    CHECK(st.stable_dt(uniform_state(g, 0.0, 1.0)) == doctest::Approx(5.4931640625e-4).epsilon(1e-14));
    CHECK(st.stable_dt(State::zeros(g)) == doctest::Approx(5.4931640625e-4).epsilon(1e-14));

    // An advection-limited state: doubling the velocity halves the step.
    p.epsilon = 1e-6;
    p.m = 3.0;
    Stepper adv(g, p, {}, {});
    State s = uniform_state(g, 1e-3, 1.0);
    Rng rng(90);
    s.stokes.u = random_solenoidal(g, rng, 5.0, 2);
    const double dt1 = adv.stable_dt(s);
    s.stokes.u *= 2.0;
    CHECK(adv.stable_dt(s) == doctest::Approx(0.5 * dt1).epsilon(1e-12));
}

TEST_CASE("step_n") {
    const Grid g = Grid::square(16);
    Stepper st(g, {}, {}, {});
    const State s = uniform_state(g, 0.7, 0.3);
    const ScalarField n = st.step_n(s, 1e-3);
    CHECK(testing::max_abs_diff(n, s.n) == 0.0);
}

TEST_CASE("step_c uniform ODE") {
    const Grid g = Grid::square(8);
    Stepper st(g, {}, {}, {});
    State s = uniform_state(g, 0.5, 2.0);
    const double dt = 1e-3;
    for (int k = 0; k < 1000; ++k) s.c = st.step_c(s, dt);
    const double discrete = 2.0 * std::pow(1.0 - dt * 0.5, 1000);
    for (std::size_t i = 0; i < s.c.size(); ++i) {
        CHECK(s.c[i] == doctest::Approx(discrete).epsilon(1e-12));
        CHECK(std::abs(s.c[i] - 2.0 * std::exp(-0.5)) < 2e-4);
    }
}

TEST_CASE("step_c eigenmode decay") {
    const Grid g(2, {32, 4, 1}, {2.0, 1.0, 1.0});
    Stepper st(g, {}, {}, {});
    State s = uniform_state(g, 0.0, 0.0);
    g.for_each_cell([&](int i, int, int, std::size_t idx) { s.c[idx] = 1.0 + std::cos(M_PI * g.center(0, i) / 2.0); });
    const ScalarField mode = s.c - ScalarField(g, 1.0);
    const double h = g.h(0), dt = 5e-3;
    const double lambda = 2.0 * (1.0 - std::cos(M_PI * h / 2.0)) / (h * h);
    const int steps = 40;
    for (int k = 0; k < steps; ++k) s.c = st.step_c(s, dt);
    const double amp = std::pow(1.0 + dt * lambda, -steps);
    for (std::size_t i = 0; i < s.c.size(); ++i) CHECK(s.c[i] == doctest::Approx(1.0 + amp * mode[i]).epsilon(1e-12));
}

TEST_CASE("zero and uniform states") {
    const Grid g = Grid::square(16);
    Stepper st(g, {}, {}, {});
    State z = State::zeros(g);
    for (int k = 0; k < 20; ++k) z = st.step_coupled(z, 1e-3).first;
    CHECK(z.n.max() == 0.0);
    CHECK(z.c.max() == 0.0);
    CHECK(z.stokes.u.max_abs() == 0.0);
    CHECK(z.t == doctest::Approx(0.02));

    State u = uniform_state(g, 0.8, 1.5);
    const double dt = 1e-3;
    for (int k = 0; k < 50; ++k) u = st.step_coupled(u, dt).first;
    for (std::size_t i = 0; i < u.n.size(); ++i) {
        CHECK(u.n[i] == doctest::Approx(0.8).epsilon(1e-14));
        CHECK(u.c[i] == doctest::Approx(1.5 * std::pow(1.0 - dt * 0.8, 50)).epsilon(1e-12));
    }
    CHECK(u.stokes.u.max_abs() == 0.0);
}

TEST_CASE("random data invariants over many steps") {
    RandomScenario sc(3);
    Stepper st = sc.stepper();
    State s = sc.s0;
    const double mass0 = integrate(s.n), c0 = s.c.max();
    double c_prev = c0;
    for (int k = 0; k < 1000; ++k) {
        auto [next, rep] = st.step_coupled(s);
        REQUIRE(rep.all_ok());
        CHECK(rep.dt > 0.0);
        CHECK(next.c.max() <= c_prev + 1e-12);
        CHECK(next.n.min() >= 0.0);
        c_prev = next.c.max();
        s = std::move(next);
    }
    CHECK(std::abs(integrate(s.n) - mass0) <= 1e-12 * mass0);
    CHECK(s.c.min() >= 0.0);
}

TEST_CASE("run_to_time") {
    RandomScenario zero(5, 0.0);
    Stepper st0 = zero.stepper();
    const RunResult r0 = run_to_time(st0, zero.s0);
    CHECK(r0.series.empty());
    CHECK(r0.steps == 0);
    CHECK(testing::max_abs_diff(r0.state.n, zero.s0.n) == 0.0);

    RandomScenario sc(5, 0.25);
    Stepper a = sc.stepper(), b = sc.stepper(), c = sc.stepper();
    const RunResult every = run_to_time(a, sc.s0, 1);
    const RunResult tenth = run_to_time(b, sc.s0, 10);
    const RunResult again = run_to_time(c, sc.s0, 1);
    CHECK_FALSE(every.blowup);
    CHECK(every.invariants_ok);
    CHECK(every.state.t == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(testing::max_abs_diff(every.state.n, tenth.state.n) == 0.0);
    CHECK(testing::max_abs_diff(every.state.c, tenth.state.c) == 0.0);
    CHECK((every.state.stokes.u - tenth.state.stokes.u).max_abs() == 0.0);
    CHECK(every.series.size() > tenth.series.size());
    CHECK(every.series.size() == static_cast<std::size_t>(every.steps) + 1);
    // Budgets do not depend on the cadence.
    CHECK(every.series.records().back().budgets == tenth.series.records().back().budgets);

    REQUIRE(every.series.size() == again.series.size());
    for (std::size_t i = 0; i < every.series.size(); ++i) {
        const auto &x = every.series.records()[i], &y = again.series.records()[i];
        CHECK(x.t == y.t);
        CHECK(x.f.energy == y.f.energy);
        CHECK(x.budgets == y.budgets);
    }
}

TEST_CASE("halving cap reports blow-up") {
    RandomScenario sc(7, 100.0);
    sc.time.fixed_dt = 50.0;
    sc.time.max_halvings = 2;
    Stepper st = sc.stepper();
    CHECK_THROWS_AS(st.step_coupled(sc.s0, 50.0), StepRejected);
    const RunResult r = run_to_time(st, sc.s0);
    CHECK(r.blowup);
    CHECK_FALSE(r.blowup_reason.empty());
    CHECK(r.series.size() == 1);
}

} // TEST_SUITE
