#include "cns/acceptance.hpp"

#include "cns/diagnostics.hpp"
#include "cns/harness.hpp"
#include "cns/operators.hpp"
#include "cns/scenario.hpp"
#include "cns/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

namespace cns {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

/// Smooth random data on [0,16]^2, flow started at the steady Stokes response
/// to the initial buoyancy.
RunConfig reference_config(double m) {
    RunConfig c;
    c.params.m = m;
    c.params.epsilon = 0.1;
    c.params.kappa = 1.0;
    c.params.dim = 2;
    c.grid = Grid(2, {64, 64, 1}, {16.0, 16.0, 1.0});
    c.sensitivity.family = SensitivityFamily::rotational;
    c.sensitivity.theta = 0.5;
    c.sensitivity.s0_coeffs = {0.5};
    c.potential.grad_phi = {0.0, -1.0, 0.0};
    c.initial.kind = InitialKind::random;
    c.initial.n_mean = 0.05;
    c.initial.n_amplitude = 0.025;
    c.initial.c_mean = 1.0;
    c.initial.c_amplitude = 0.3;
    c.initial.modes = 2;
    c.initial.velocity = VelocityInit::stokes;
    c.time.horizon = 1.0;
    c.seed = 1;
    return c;
}

struct Trajectory {
    RunResult result;
    std::vector<double> min_c;  ///< per record
    double c0_sup = 0.0;
    double seconds = 0.0;
};

class Suite {
public:
    explicit Suite(AcceptanceOptions opts) : opts_(std::move(opts)) {}

    CriterionResult run(int id) {
        const auto t0 = Clock::now();
        CriterionResult r;
        r.id = id;
        try {
            switch (id) {
            case 1: mass(r); break;
            case 2: max_principle(r); break;
            case 3: nonnegativity(r); break;
            case 4: ode_oracle(r); break;
            case 5: barenblatt_order(r); break;
            case 6: energy_bounds(r); break;
            case 7: power_mass_bounds(r); break;
            case 8: yosida(r); break;
            case 9: projection(r); break;
            case 10: summation_by_parts(r); break;
            case 11: gn_stability(r); break;
            case 12: sweep(r); break;
            case 13: exponents(r); break;
            case 14: smoke_3d(r); break;
            default: r.title = "unknown criterion"; r.detail = "no such criterion";
            }
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = seconds_since(t0);
        return r;
    }

private:
    Trajectory simulate(const RunConfig& c, const InitialData& init, int cadence = 1) {
        const auto t0 = Clock::now();
        const ValidationReport rep = validate_params(c.params, c.sensitivity, c.potential, init);
        if (!rep.may_run(c.allow_subthreshold)) throw ValidationError(rep.summary());
        Stepper stepper(c.grid, c.params, c.sensitivity, c.potential, c.solvers, c.time);
        Trajectory tr;
        tr.c0_sup = init.c0.max();
        RunCallbacks cb;
        cb.on_record = [&](const State& s, const SeriesRecord&) { tr.min_c.push_back(s.c.min()); };
        tr.result = run_to_time(stepper, State::from_initial(init), cadence, cb);
        tr.seconds = seconds_since(t0);
        note_corpus(tr.result.min_n, tr.result.steps);
        return tr;
    }

    Trajectory simulate(const RunConfig& c, int cadence = 1) {
        return simulate(c, make_initial(c.initial, c.grid, c.params, c.potential, c.seed), cadence);
    }

    void note_corpus(double min_n, long steps) {
        corpus_min_n_ = std::min(corpus_min_n_, min_n);
        corpus_steps_ += steps;
        ++corpus_runs_;
    }

    const Trajectory& reference(double m) {
        auto it = reference_.find(m);
        if (it == reference_.end()) it = reference_.emplace(m, simulate(reference_config(m))).first;
        return it->second;
    }

    static std::string run_status(const RunResult& r) {
        if (r.blowup) return "blow-up flag: " + r.blowup_reason;
        if (!r.invariants_ok) return "step invariant failed: " + r.first_violation;
        return {};
    }

    static double max_mass_drift(const FunctionalSeries& s) {
        const double m0 = s.records().front().f.mass;
        double worst = 0.0;
        for (const auto& r : s.records()) worst = std::max(worst, std::abs(r.f.mass - m0) / std::abs(m0));
        return worst;
    }

    void mass(CriterionResult& r) {
        r.title = "mass conservation";
        const Trajectory& tr = reference(1.5);
        const double drift = max_mass_drift(tr.result.series);
        const std::string st = run_status(tr.result);
        r.pass = drift <= 1e-12 && tr.seconds < 60.0 && st.empty();
        r.detail = "64^2, T=1: max relative drift " + fmt("%.2e", drift) + " over " +
                   std::to_string(tr.result.series.size()) + " records, " + fmt("%.1f s", tr.seconds) +
                   (st.empty() ? "" : "; " + st);
    }

    void max_principle(CriterionResult& r) {
        r.title = "maximum principle for c";
        const Trajectory& tr = reference(1.5);
        double over = -INFINITY, lo = INFINITY;
        for (const auto& rec : tr.result.series.records()) over = std::max(over, rec.f.c_sup - tr.c0_sup);
        for (double v : tr.min_c) lo = std::min(lo, v);
        r.pass = over <= 1e-12 && lo >= 0.0 && tr.result.series.size() == tr.min_c.size();
        r.detail = "max c - |c0|_inf = " + fmt("%.2e", over) + ", min c = " + fmt("%.3e", lo);
    }

    void nonnegativity(CriterionResult& r) {
        r.title = "nonnegativity of n";
        r.pass = corpus_runs_ > 0 && corpus_min_n_ >= 0.0;
        r.detail = "min n = " + fmt("%.3e", corpus_min_n_) + " over " + std::to_string(corpus_runs_) + " runs, " +
                   std::to_string(corpus_steps_) + " accepted steps";
        if (corpus_runs_ == 0) r.detail = "no simulation ran";
    }

    void ode_oracle(CriterionResult& r) {
        r.title = "uniform-state ODE oracle";
        RunConfig c = reference_config(1.5);
        c.grid = Grid::square(16);
        c.potential.grad_phi = {0.0, 0.0, 0.0};
        c.initial.kind = InitialKind::uniform;
        c.initial.velocity = VelocityInit::random;
        c.initial.n_mean = 1.0;
        c.initial.c_mean = 1.0;
        c.time.fixed_dt = 1e-3;
        const Trajectory tr = simulate(c, 100);
        double err = 0.0;
        for (double v : tr.result.state.c.values()) err = std::max(err, std::abs(v - std::exp(-1.0)));
        const std::string st = run_status(tr.result);
        r.pass = err <= 1e-3 && st.empty() && std::abs(tr.result.state.t - 1.0) < 1e-12;
        r.detail = "|c(1) - e^-1|_inf = " + fmt("%.3e", err) + " after " + std::to_string(tr.result.steps) + " steps" +
                   (st.empty() ? "" : "; " + st);
    }

    void barenblatt_order(CriterionResult& r) {
        r.title = "Barenblatt convergence";
        const auto t0 = Clock::now();
        const double length = 6.0, t_start = 1.0, span = 0.5, height = 0.25;
        std::vector<double> hs, errs;
        std::ostringstream os;
        for (int n : {128, 256, 512}) {
            RunConfig c;
            c.params.m = 2.0;
            c.params.c_d_lower = c.params.c_d_upper = 2.0;
            c.params.epsilon = 1e-6;
            c.params.kappa = 0.0;
            c.sensitivity.s0_coeffs = {0.0};
            const double h = length / n;
            c.grid = Grid(2, {n, 4, 1}, {length, 4 * h, 1.0});
            c.initial.kind = InitialKind::barenblatt;
            c.initial.barenblatt_time = t_start;
            c.initial.barenblatt_height = height;
            c.time.horizon = span;
            const Trajectory tr = simulate(c, 1 << 30);
            const std::string st = run_status(tr.result);
            if (!st.empty()) throw Error(Status::acceptance, st);
            double err = 0.0;
            const ScalarField& nf = tr.result.state.n;
            c.grid.for_each_cell([&](int i, int, int, std::size_t idx) {
                const double exact = barenblatt(c.grid.center(0, i), t_start + span, 0.5 * length, height, 2.0, 2.0);
                err += std::abs(nf[idx] - exact) * h / 4.0;
            });
            hs.push_back(h);
            errs.push_back(err);
            os << n << ": " << fmt("%.3e", err) << "  ";
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double k = static_cast<double>(hs.size());
        for (std::size_t i = 0; i < hs.size(); ++i) {
            const double x = std::log(hs[i]), y = std::log(errs[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double order = (k * sxy - sx * sy) / (k * sxx - sx * sx);
        const double secs = seconds_since(t0);
        r.pass = order >= 0.8 && secs < 120.0;
        r.detail = "L1 errors " + os.str() + "fitted order " + fmt("%.3f", order) + ", " + fmt("%.1f s", secs);
    }

    void energy_bounds(CriterionResult& r) {
        r.title = "energy boundedness (10/9 < m <= 2)";
        const Trajectory& tr = reference(1.5);
        const AuditReport a = audit_bounds(tr.result.series);
        std::ostringstream os;
        for (const auto& c : a.checks)
            if (!c.pass) os << c.name << " violation " << c.max_violation << " > " << c.tolerance << "; ";
        const std::string st = run_status(tr.result);
        r.pass = a.all_pass() && st.empty();
        r.detail = a.all_pass() ? std::to_string(a.checks.size()) + " audit checks pass, E(0) = " +
                                      fmt("%.6g", tr.result.series.records().front().f.energy)
                                : os.str();
        if (!st.empty()) r.detail += "; " + st;
    }

    void power_mass_bounds(CriterionResult& r) {
        r.title = "power-mass boundedness (m > 2)";
        const Trajectory& tr = reference(2.5);
        const auto& recs = tr.result.series.records();
        const double e0 = recs.front().f.energy;
        double sup = e0;
        for (const auto& rec : recs) sup = std::max(sup, rec.f.energy);
        const AuditReport a = audit_bounds(tr.result.series);
        bool budgets = true;
        for (const auto& c : a.checks)
            if (c.name.rfind("budget_linear:", 0) == 0) budgets = budgets && c.pass;
        const std::string st = run_status(tr.result);
        r.pass = sup <= 1.5 * e0 && budgets && st.empty();
        r.detail = "sup E / E(0) = " + fmt("%.6f", sup / e0) + ", budgets linear: " + (budgets ? "yes" : "no") +
                   (st.empty() ? "" : "; " + st);
    }

    void yosida(CriterionResult& r) {
        r.title = "Yosida contraction and convergence";
        const Grid g = Grid::square(32);
        StokesSolver solver(g);
        int contraction_fail = 0, order_fail = 0;
        double worst_ratio = 0.0;
        for (int f = 0; f < 10; ++f) {
            Rng rng(1000 + f);
            const VectorField w = random_solenoidal(g, rng, 1.0, 4);
            const double wn = norm_l2(w);
            std::vector<double> defect;
            for (double eps : {0.5, 0.1, 0.01}) {
                const VectorField y = solver.yosida_apply(w, eps);
                const double ratio = norm_l2(y) / wn;
                worst_ratio = std::max(worst_ratio, ratio);
                if (ratio > 1.0 + 1e-8) ++contraction_fail;
                defect.push_back(norm_l2(y - w));
            }
            if (!(defect[0] > defect[1] && defect[1] > defect[2])) ++order_fail;
        }
        r.pass = contraction_fail == 0 && order_fail == 0;
        r.detail = "max |Y w|/|w| = " + fmt("%.12f", worst_ratio) + ", contraction failures " +
                   std::to_string(contraction_fail) + ", non-monotone defects " + std::to_string(order_fail);
    }

    void projection(CriterionResult& r) {
        r.title = "projection properties";
        const Grid g = Grid::square(32);
        StokesSolver solver(g);
        const double tol = SolverSettings{}.poisson_tolerance;
        double div_worst = 0.0, idem_worst = 0.0, grad_worst = 0.0;
        for (int f = 0; f < 10; ++f) {
            Rng rng(2000 + f);
            VectorField v(g);
            v.fill([&](int, double, double, double) { return rng.uniform(-1.0, 1.0); });
            const double vn = norm_l2(v);
            const VectorField pv = solver.project(v).field;
            div_worst = std::max(div_worst, norm_lp(divergence(pv), 2.0) / vn);
            idem_worst = std::max(idem_worst, norm_l2(solver.project(pv).field - pv) / vn);
            ScalarField q(g);
            for (auto& x : q.values()) x = rng.uniform(-1.0, 1.0);
            const VectorField gq = gradient(q);
            grad_worst = std::max(grad_worst, norm_l2(solver.project(gq).field) / norm_l2(gq));
        }
        r.pass = div_worst <= 1e-9 && idem_worst <= 10 * tol && grad_worst <= 1e-8;
        r.detail = "|div Pv|/|v| " + fmt("%.2e", div_worst) + ", idempotence " + fmt("%.2e", idem_worst) +
                   ", |P grad q|/|grad q| " + fmt("%.2e", grad_worst);
    }

    void summation_by_parts(CriterionResult& r) {
        r.title = "summation-by-parts adjointness";
        double worst = 0.0;
        int seed = 3000;
        for (const Grid& g : {Grid::square(16), Grid::square(32), Grid::cube(16)}) {
            for (int f = 0; f < 5; ++f) {
                Rng rng(seed++);
                ScalarField s(g);
                for (auto& x : s.values()) x = rng.uniform(-1.0, 1.0);
                VectorField v(g);
                v.fill([&](int, double, double, double) { return rng.uniform(-1.0, 1.0); });
                const VectorField gs = gradient(s);
                const double lhs = dot(gs, v), rhs = -dot(s, divergence(v));
                const double scale = norm_l2(gs) * norm_l2(v) + norm_lp(s, 2.0) * norm_lp(divergence(v), 2.0);
                worst = std::max(worst, std::abs(lhs - rhs) / scale);
            }
        }
        r.pass = worst <= 1e-12;
        r.detail = "max relative defect " + fmt("%.2e", worst) + " on 16^2, 32^2, 16^3";
    }

    void gn_stability(CriterionResult& r) {
        r.title = "Gagliardo-Nirenberg auditor stability";
        std::vector<CosineModes> modes;
        for (int f = 0; f < 20; ++f) {
            Rng rng(4000 + f);
            modes.emplace_back(rng, 2, 3, std::array<double, 3>{1.0, 1.0, 1.0});
        }
        auto corpus = [&](int n) {
            std::vector<ScalarField> out;
            for (const auto& m : modes) out.push_back(m.sample(Grid::square(n), 2.0, 1.0));
            return out;
        };
        const AuditReport coarse = gn_audit(corpus(64), 1.0, 4.0);
        const AuditReport fine = gn_audit(corpus(128), 1.0, 4.0);
        const AuditCheck c = gn_refinement_check(coarse, fine, 2.0);
        r.pass = c.pass && coarse.all_pass() && fine.all_pass();
        r.detail = "corpus max C: 64^2 " + fmt("%.4f", c.fitted[0]) + ", 128^2 " + fmt("%.4f", c.fitted[1]) +
                   ", ratio " + fmt("%.3f", c.max_violation);
    }

    void sweep(CriterionResult& r) {
        r.title = "epsilon-sweep Cauchy trend";
        RunConfig c = reference_config(1.5);
        c.grid = Grid(2, {32, 32, 1}, {16.0, 16.0, 1.0});
        c.time.horizon = 0.5;
        c.output.root = opts_.scratch_dir;
        c.output.name = "sweep";
        c.output.checkpoint = false;
        c.workers = opts_.workers;
        const SweepResult s = sweep_epsilon(c, {0.4, 0.2, 0.1, 0.05});
        for (const auto& m : s.members) note_corpus(m.min_n, 0);
        std::ostringstream os;
        for (double d : s.diff_n_l1) os << fmt("%.3e", d) << " ";
        r.pass = s.pass;
        r.detail = "|n_i - n_i+1|_1: " + os.str() + (s.all_members_ok ? "" : "(member failure)");
    }

    void exponents(CriterionResult& r) {
        r.title = "exponent table";
        const ExponentTable a = theorem_exponents(Rational(2));
        const ExponentTable b = theorem_exponents(Rational(3));
        const bool ok_a = a.n_exponent == Rational(8, 3) && a.grad_n_exponent && *a.grad_n_exponent == Rational(2) &&
                          a.gamma1 == Rational(8, 5) && a.gamma2 == Rational(20, 11);
        const bool ok_b = b.n_exponent == Rational(16, 3) && !b.grad_n_exponent && b.gamma1 == Rational(16, 11) &&
                          b.gamma2 == Rational(5, 4);
        auto show = [](const ExponentTable& t) {
            return "{" + t.n_exponent.str() + ", " + (t.grad_n_exponent ? t.grad_n_exponent->str() : "-") + ", " +
                   t.gamma1.str() + ", " + t.gamma2.str() + "}";
        };
        r.pass = ok_a && ok_b;
        r.detail = "m=2 " + show(a) + ", m=3 " + show(b);
    }

    void smoke_3d(CriterionResult& r) {
        r.title = "small 3D smoke run";
        RunConfig c = reference_config(1.5);
        c.params.dim = 3;
        c.grid = Grid::cube(16, 1.0);
        c.sensitivity.axis = {0.0, 0.0, 1.0};
        c.potential.grad_phi = {0.0, 0.0, -1.0};
        c.initial.n_mean = 0.5;
        c.initial.n_amplitude = 0.25;
        c.time.horizon = 0.1;
        const Trajectory tr = simulate(c);
        const double drift = max_mass_drift(tr.result.series);
        double over = -INFINITY, lo = INFINITY;
        for (const auto& rec : tr.result.series.records()) over = std::max(over, rec.f.c_sup - tr.c0_sup);
        for (double v : tr.min_c) lo = std::min(lo, v);
        const std::string st = run_status(tr.result);
        r.pass = drift <= 1e-12 && over <= 1e-12 && lo >= 0.0 && tr.result.min_n >= 0.0 && st.empty() &&
                 tr.seconds < 300.0;
        r.detail = "16^3, T=0.1, " + std::to_string(tr.result.steps) + " steps: mass drift " + fmt("%.2e", drift) +
                   ", max c excess " + fmt("%.2e", over) + ", min n " + fmt("%.2e", tr.result.min_n) + ", " +
                   fmt("%.1f s", tr.seconds) + (st.empty() ? "" : "; " + st);
    }

    AcceptanceOptions opts_;
    std::map<double, Trajectory> reference_;
    double corpus_min_n_ = INFINITY;
    long corpus_steps_ = 0;
    int corpus_runs_ = 0;
};

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            const std::function<void(const CriterionResult&)>& on_result) {
    AcceptanceOptions o = opts;
    if (o.scratch_dir.empty()) o.scratch_dir = (std::filesystem::temp_directory_path() / "cns_acceptance").string();
    std::vector<int> ids = o.only;
    if (ids.empty())
        for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
    // Nonnegativity summarises the other runs, so it goes last.
    std::stable_partition(ids.begin(), ids.end(), [](int id) { return id != 3; });

    Suite suite(o);
    std::vector<CriterionResult> out;
    for (int id : ids) {
        out.push_back(suite.run(id));
        if (on_result) on_result(out.back());
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

std::string format_result(const CriterionResult& r) {
    char head[32];
    std::snprintf(head, sizeof head, "%s %2d ", r.pass ? "PASS" : "FAIL", r.id);
    return std::string(head) + r.title + ": " + r.detail;
}

} // namespace cns
