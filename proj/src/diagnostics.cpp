#include "cns/diagnostics.hpp"

#include "cns/error.hpp"
#include "cns/operators.hpp"
#include "cns/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace cns {

const std::array<const char*, 6>& FunctionalSeries::budget_names() {
    static const std::array<const char*, 6> names{"n_pow_m_minus_2_grad_n_sq", "grad_c_pow4",
                                                  "grad_u_sq",                 "c_hess_ln_c_sq",
                                                  "n_eps_pow_2m_minus_4_grad_n_sq", "grad_c_sq"};
    return names;
}

const std::vector<std::string>& FunctionalSeries::csv_columns() {
    static const std::vector<std::string> cols = [] {
        std::vector<std::string> c{"t",       "step",   "mass",       "c_sup",    "entropy",
                                   "sqrt_dirichlet", "kinetic", "energy", "power_mass", "c_squared"};
        for (const char* b : budget_names()) c.push_back(std::string("budget_") + b);
        return c;
    }();
    return cols;
}

void FunctionalSeries::append(const SeriesRecord& r) {
    const auto& f = r.f;
    bool finite = std::isfinite(r.t) && std::isfinite(f.mass) && std::isfinite(f.c_sup) && std::isfinite(f.entropy) &&
                  std::isfinite(f.sqrt_dirichlet) && std::isfinite(f.kinetic) && std::isfinite(f.energy) &&
                  std::isfinite(f.power_mass) && std::isfinite(f.c_squared);
    for (double b : r.budgets) finite = finite && std::isfinite(b);
    if (!finite) throw Error(Status::internal, "non-finite functional record");
    if (!records_.empty()) {
        const auto& last = records_.back();
        if (!(r.t > last.t)) throw Error(Status::internal, "functional series times must increase strictly");
        for (std::size_t i = 0; i < r.budgets.size(); ++i)
            if (r.budgets[i] < last.budgets[i]) throw Error(Status::internal, "dissipation budget decreased");
    }
    records_.push_back(r);
}

void FunctionalSeries::write_csv(std::ostream& os) const {
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        os << buf;
    };
    for (const auto& r : records_) {
        std::snprintf(buf, sizeof buf, "%.17g,%ld", r.t, r.step);
        os << buf;
        put(r.f.mass);
        put(r.f.c_sup);
        put(r.f.entropy);
        put(r.f.sqrt_dirichlet);
        put(r.f.kinetic);
        put(r.f.energy);
        put(r.f.power_mass);
        put(r.f.c_squared);
        for (double b : r.budgets) put(b);
        os << '\n';
    }
}

// ---------------------------------------------------------------------------

namespace {

void require_nonnegative_state(const State& s) {
    if (s.n.min() < 0.0 || s.c.min() < 0.0) throw DomainError("functionals need n >= 0 and c >= 0");
}

} // namespace

Functionals compute_functionals(const State& s, const ModelParams& p) {
    require_nonnegative_state(s);
    const Grid& g = s.grid();
    const double vol = g.cell_volume();
    Functionals f;
    f.mass = integrate(s.n);
    f.c_sup = norm_lp(s.c, INFINITY);
    double ent = 0.0, pm = 0.0, c2 = 0.0;
    for (std::size_t i = 0; i < s.n.size(); ++i) {
        const double n = s.n[i];
        if (n > 0.0) ent += n * std::log(n);
        pm += std::pow(n + p.epsilon, p.m - 1.0);
        c2 += s.c[i] * s.c[i];
    }
    f.entropy = ent * vol;
    f.power_mass = pm * vol;
    f.c_squared = c2 * vol;
    ScalarField root(g);
    for (std::size_t i = 0; i < root.size(); ++i) root[i] = std::sqrt(s.c[i] + 1e-14);
    const VectorField gr = gradient(root);
    f.sqrt_dirichlet = dot(gr, gr);
    f.kinetic = dot(s.stokes.u, s.stokes.u);
    f.energy = p.m <= 2.0 ? f.entropy + f.sqrt_dirichlet + f.kinetic : f.power_mass + f.c_squared + f.kinetic;
    return f;
}

double energy(const State& s, const ModelParams& p) {
    if (!p.theorem_regime()) throw DomainError("energy functional is defined for m > 10/9");
    return compute_functionals(s, p).energy;
}

DissipationRates dissipation_rates(const State& s, const ModelParams& p) {
    require_nonnegative_state(s);
    const Grid& g = s.grid();
    const double vol = g.cell_volume();
    DissipationRates r{};

    // Face-based integrands of grad n.
    double weighted = 0.0, shifted = 0.0;
    const VectorField gn = gradient(s.n);
    for (int a = 0; a < g.dim(); ++a) {
        const auto comp = gn.component(a);
        const std::size_t cs = g.stride(a);
        g.for_each_face(a, [&](int i, int j, int k, std::size_t f) {
            const int id[3] = {i, j, k};
            if (id[a] == 0 || id[a] == g.cells(a)) return;
            const std::size_t R = g.cell_index(i, j, k);
            const double nf = 0.5 * (s.n[R] + s.n[R - cs]);
            const double g2 = comp[f] * comp[f];
            if (nf > 0.0) weighted += std::pow(nf, p.m - 2.0) * g2;
            shifted += std::pow(nf + p.epsilon, 2.0 * p.m - 4.0) * g2;
        });
    }
    r[0] = weighted * vol;
    r[4] = shifted * vol;

    const VectorField gc = gradient(s.c);
    r[5] = dot(gc, gc);
    const auto cg = face_to_center(gc);
    double g4 = 0.0;
    for (std::size_t i = 0; i < s.c.size(); ++i) {
        double m2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) m2 += cg[a][i] * cg[a][i];
        g4 += m2 * m2;
    }
    r[1] = g4 * vol;

    r[2] = dirichlet_energy(s.stokes.u);

    constexpr double c_floor = 1e-8;
    ScalarField lnc(g);
    for (std::size_t i = 0; i < lnc.size(); ++i) lnc[i] = std::log(std::max(s.c[i], c_floor));
    const ScalarField hess = hessian_frobenius(lnc);
    double ch = 0.0;
    for (std::size_t i = 0; i < s.c.size(); ++i)
        if (s.c[i] > c_floor) ch += s.c[i] * hess[i] * hess[i];
    r[3] = ch * vol;
    return r;
}

void record(const State& s, const ModelParams& p, FunctionalSeries& series, double dt) {
    SeriesRecord rec;
    rec.t = s.t;
    rec.step = s.step;
    rec.f = compute_functionals(s, p);
    if (!series.empty()) rec.budgets = series.records().back().budgets;
    const DissipationRates rates = dissipation_rates(s, p);
    for (std::size_t i = 0; i < rates.size(); ++i) rec.budgets[i] += dt * rates[i];
    series.append(rec);
}

// ---------------------------------------------------------------------------

bool AuditReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.pass; });
}

const AuditCheck* AuditReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

nlohmann::json AuditReport::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& c : checks) {
        j.push_back({{"name", c.name},
                     {"bound_form", c.bound_form},
                     {"fitted", c.fitted},
                     {"max_violation", c.max_violation},
                     {"tolerance", c.tolerance},
                     {"pass", c.pass},
                     {"detail", c.detail}});
    }
    return {{"checks", j}, {"all_pass", all_pass()}};
}

AuditReport audit_bounds(const FunctionalSeries& series) {
    if (series.empty()) throw DomainError("audit_bounds needs a nonempty series");
    const auto& recs = series.records();
    const std::size_t N = recs.size();
    AuditReport rep;

    {
        const double e0 = recs.front().f.energy;
        const std::size_t early = std::max<std::size_t>(1, (N + 9) / 10);
        double c_fit = 0.0, sup = e0;
        for (std::size_t k = 0; k < N; ++k) {
            if (k < early) c_fit = std::max(c_fit, recs[k].f.energy - e0);
            sup = std::max(sup, recs[k].f.energy);
        }
        AuditCheck c{"energy_bounded", "constant", {e0, c_fit}, 0.0, 1e-12 * std::max(1.0, std::abs(e0)), false, {}};
        c.max_violation = std::max(0.0, sup - (e0 + 1.5 * c_fit));
        c.pass = c.max_violation <= c.tolerance;
        std::ostringstream os;
        os << "sup E = " << sup << ", E(0) = " << e0 << ", early rise = " << c_fit;
        c.detail = os.str();
        rep.checks.push_back(std::move(c));
    }

    const auto& names = FunctionalSeries::budget_names();
    for (std::size_t b = 0; b < names.size(); ++b) {
        double st = 0, sb = 0, stt = 0, stb = 0, lo = INFINITY, hi = -INFINITY;
        for (const auto& r : recs) {
            st += r.t;
            sb += r.budgets[b];
            stt += r.t * r.t;
            stb += r.t * r.budgets[b];
            lo = std::min(lo, r.budgets[b]);
            hi = std::max(hi, r.budgets[b]);
        }
        double slope = 0.0, icpt = sb / N;
        const double den = N * stt - st * st;
        if (N >= 2 && den > 0.0) {
            slope = (N * stb - st * sb) / den;
            icpt = (sb - slope * st) / N;
        }
        double worst = 0.0;
        for (const auto& r : recs) worst = std::max(worst, r.budgets[b] - (icpt + slope * r.t));
        AuditCheck c{std::string("budget_linear:") + names[b], "a+bT", {icpt, slope}, worst, 0.05 * (hi - lo), false, {}};
        c.pass = c.max_violation <= c.tolerance;
        std::ostringstream os;
        os << "range " << (hi - lo);
        c.detail = os.str();
        rep.checks.push_back(std::move(c));
    }

    {
        const double m0 = recs.front().f.mass;
        const double scale = m0 != 0.0 ? std::abs(m0) : 1.0;
        double worst = 0.0;
        for (const auto& r : recs) worst = std::max(worst, std::abs(r.f.mass - m0) / scale);
        AuditCheck c{"mass_conserved", "constant", {m0}, worst, 1e-12, worst <= 1e-12, {}};
        rep.checks.push_back(std::move(c));
    }
    {
        double worst = 0.0;
        for (std::size_t k = 1; k < N; ++k) worst = std::max(worst, recs[k].f.c_sup - recs[k - 1].f.c_sup);
        AuditCheck c{"c_sup_nonincreasing", "constant", {recs.front().f.c_sup}, worst, 1e-12, worst <= 1e-12, {}};
        rep.checks.push_back(std::move(c));
    }
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

/// Cells at least two cells away from every wall.
std::vector<std::size_t> interior_cells(const Grid& g) {
    std::vector<std::size_t> out;
    g.for_each_cell([&](int i, int j, int k, std::size_t idx) {
        const int id[3] = {i, j, k};
        for (int a = 0; a < g.dim(); ++a)
            if (id[a] < 2 || id[a] > g.cells(a) - 3) return;
        out.push_back(idx);
    });
    return out;
}

} // namespace

AuditReport gn_audit(const std::vector<ScalarField>& corpus, double q, double lambda) {
    if (!(q >= 1.0)) throw DomainError("gn_audit requires q >= 1");
    if (!(lambda >= 2.0 * q + 2.0 && lambda <= 4.0 * q + 1.0))
        throw DomainError("gn_audit requires lambda in [2q+2, 4q+1]");
    const double a_exp = 2.0 * (lambda - 3.0) / ((2.0 * q - 1.0) * lambda);
    const double b_exp = (6.0 * q - lambda) / ((2.0 * q - 1.0) * lambda);

    AuditCheck c{"gn_constant", "constant", {0.0}, 0.0, 0.0, true, {}};
    double cmax = 0.0;
    for (const auto& phi : corpus) {
        if (!(phi.min() > 0.0)) throw DomainError("gn_audit fields must be strictly positive");
        const Grid& g = phi.grid();
        const double vol = g.cell_volume();
        const auto mask = interior_cells(g);
        const auto grad = cell_gradient(phi);
        const ScalarField hess = hessian_frobenius(phi);
        double lhs = 0.0, hs = 0.0, sup = 0.0;
        for (std::size_t idx : mask) {
            double g2 = 0.0;
            for (int a = 0; a < g.dim(); ++a) g2 += grad[a][idx] * grad[a][idx];
            const double gm = std::sqrt(g2);
            lhs += std::pow(gm, lambda);
            const double weighted = std::pow(gm, q - 1.0) * hess[idx];
            hs += weighted * weighted;
            sup = std::max(sup, std::abs(phi[idx]));
        }
        lhs = std::pow(lhs * vol, 1.0 / lambda);
        hs = std::sqrt(hs * vol);
        const double rhs = std::pow(hs, a_exp) * std::pow(sup, b_exp) + sup;
        const double ci = lhs == 0.0 ? 0.0 : lhs / rhs;
        if (!std::isfinite(ci)) c.pass = false;
        c.fitted.push_back(ci);
        cmax = std::max(cmax, ci);
    }
    c.fitted[0] = cmax;
    std::ostringstream os;
    os << "exponents " << a_exp << ", " << b_exp << "; corpus max C = " << cmax;
    c.detail = os.str();
    return {{std::move(c)}};
}

AuditCheck gn_refinement_check(const AuditReport& coarse, const AuditReport& fine, double ratio) {
    const auto* a = coarse.find("gn_constant");
    const auto* b = fine.find("gn_constant");
    if (!a || !b) throw DomainError("gn_refinement_check needs two gn_audit reports");
    const double ca = a->fitted.front(), cb = b->fitted.front();
    double r = 1.0;
    if (ca > 0.0 || cb > 0.0) r = (ca > 0.0 && cb > 0.0) ? std::max(ca / cb, cb / ca) : INFINITY;
    AuditCheck c{"gn_refinement_stability", "constant", {ca, cb}, r, ratio, r <= ratio, {}};
    return c;
}

AuditReport pointwise_log_identity_audit(const ScalarField& w) {
    if (!(w.min() > 0.0)) throw DomainError("pointwise_log_identity_audit needs min(w) > 0");
    const Grid& g = w.grid();
    const double vol = g.cell_volume();
    ScalarField root(g), lnw(g);
    for (std::size_t i = 0; i < w.size(); ++i) {
        root[i] = std::sqrt(w[i]);
        lnw[i] = std::log(w[i]);
    }
    const ScalarField lap_root = laplacian_neumann(root);
    const ScalarField lap_ln = laplacian_neumann(lnw);
    const ScalarField lap_w = laplacian_neumann(w);
    const auto grad = cell_gradient(w);
    const auto mask = interior_cells(g);

    double t1 = 0.0, t2 = 0.0, t3 = 0.0, x1 = 0.0, x2 = 0.0, mass = 0.0;
    for (std::size_t i : mask) {
        double g2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) g2 += grad[a][i] * grad[a][i];
        t1 += lap_root[i] * lap_root[i];
        const double b = root[i] * lap_ln[i];
        t2 += b * b;
        const double c = std::pow(w[i], -1.5) * g2;
        t3 += c * c;
        x1 += lap_w[i] * lap_w[i] / w[i];
        x2 += g2 * lap_w[i] / (w[i] * w[i]);
        mass += w[i];
    }
    t1 = std::sqrt(t1 * vol);
    t2 = 0.5 * std::sqrt(t2 * vol);
    t3 = 0.25 * std::sqrt(t3 * vol);
    const double slack = 10.0 * g.h_min();

    AuditReport rep;
    AuditCheck c{"log_identity_inequality", "constant", {t1, t2, t3}, std::max(0.0, t1 - t2 - t3), slack, false, {}};
    c.pass = c.max_violation <= c.tolerance;
    std::ostringstream os;
    os << "|Lap sqrt w| = " << t1 << ", 1/2|sqrt w Lap ln w| = " << t2 << ", 1/4|w^-3/2 |grad w|^2| = " << t3;
    c.detail = os.str();
    rep.checks.push_back(std::move(c));

    const double form = (-2.0 * x1 + x2) * vol;
    mass *= vol;
    const double ratio = form / mass;
    AuditCheck d{"dissipation_form", "constant", {form, mass, ratio}, 0.0, 0.0, std::isfinite(ratio), {}};
    d.detail = std::string("sign ") + (form < 0.0 ? "negative" : (form > 0.0 ? "positive" : "zero"));
    rep.checks.push_back(std::move(d));
    return rep;
}

} // namespace cns
