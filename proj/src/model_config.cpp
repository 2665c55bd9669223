#include "cns/model_config.hpp"

#include "cns/error.hpp"
#include "cns/operators.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace cns {

bool ModelParams::theorem_regime() const noexcept { return m > 10.0 / 9.0; }

double SensitivitySpec::s0(double c) const {
    // Horner; coefficients are nonnegative so the result is nondecreasing in c >= 0.
    double r = 0.0;
    for (auto it = s0_coeffs.rbegin(); it != s0_coeffs.rend(); ++it) r = r * c + *it;
    return r;
}

bool SensitivitySpec::is_zero() const {
    for (double a : s0_coeffs)
        if (a != 0.0) return false;
    return true;
}

double frobenius(const Tensor& t, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) s += t[i][j] * t[i][j];
    return std::sqrt(s);
}

namespace {

// Rodrigues rotation about a unit axis.
Tensor rotation3(const std::array<double, 3>& axis, double theta) {
    double nrm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (!(nrm > 0.0)) throw DomainError("rotation axis must be nonzero");
    const double x = axis[0] / nrm, y = axis[1] / nrm, z = axis[2] / nrm;
    const double c = std::cos(theta), s = std::sin(theta), t = 1.0 - c;
    Tensor r{};
    r[0] = {t * x * x + c, t * x * y - s * z, t * x * z + s * y};
    r[1] = {t * x * y + s * z, t * y * y + c, t * y * z - s * x};
    r[2] = {t * x * z - s * y, t * y * z + s * x, t * z * z + c};
    return r;
}

} // namespace

Tensor eval_sensitivity(const SensitivitySpec& s, int dim, const std::array<double, 3>& /*x*/, double n, double c) {
    if (!(n >= 0.0) || !(c >= 0.0)) throw DomainError("sensitivity requires n >= 0 and c >= 0");
    // Orthogonal matrices have Frobenius norm sqrt(dim); dividing by it puts
    // |S|_F exactly on the bound S_0(c).
    const double scale = s.s0(c) / std::sqrt(static_cast<double>(dim));
    Tensor t{};
    switch (s.family) {
    case SensitivityFamily::scalar:
        for (int i = 0; i < dim; ++i) t[i][i] = scale;
        break;
    case SensitivityFamily::saturating:
        for (int i = 0; i < dim; ++i) t[i][i] = scale / (1.0 + n);
        break;
    case SensitivityFamily::rotational:
        if (dim == 2) {
            const double co = std::cos(s.theta), si = std::sin(s.theta);
            t[0] = {scale * co, -scale * si, 0.0};
            t[1] = {scale * si, scale * co, 0.0};
        } else {
            const Tensor r = rotation3(s.axis, s.theta);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) t[i][j] = scale * r[i][j];
        }
        break;
    }
    return t;
}

double PotentialSpec::sup_norm(int dim) const {
    if (sampled) return sampled->max_abs();
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += grad_phi[a] * grad_phi[a];
    return std::sqrt(s);
}

VectorField PotentialSpec::on_faces(const Grid& grid) const {
    if (sampled) {
        require_same_grid(grid, sampled->grid(), "potential gradient");
        return *sampled;
    }
    VectorField v(grid);
    v.fill([&](int a, double, double, double) { return grad_phi[a]; });
    return v;
}

// ---------------------------------------------------------------------------

bool ValidationReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass && !c.warning_only) return false;
    return true;
}

bool ValidationReport::may_run(bool allow_subthreshold) const {
    return all_pass() && (theorem_regime || allow_subthreshold);
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.pass ? "PASS " : (c.warning_only ? "WARN " : "FAIL ")) << c.name;
        if (!c.detail.empty()) os << ": " << c.detail;
        os << '\n';
    }
    return os.str();
}

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw ValidationError(std::string("non-finite parameter: ") + name);
}

} // namespace

ValidationReport validate_params(const ModelParams& p, const SensitivitySpec& s, const PotentialSpec& phi,
                                 const InitialData& init, double divergence_tolerance) {
    require_finite(p.m, "m");
    require_finite(p.kappa, "kappa");
    require_finite(p.c_d_lower, "c_d_lower");
    require_finite(p.c_d_upper, "c_d_upper");
    require_finite(p.epsilon, "epsilon");
    require_finite(s.theta, "theta");
    for (double a : s.s0_coeffs) require_finite(a, "s0");
    for (double a : phi.grad_phi) require_finite(a, "grad_phi");

    ValidationReport r;
    auto add = [&](std::string name, bool pass, std::string detail = {}, bool warn = false) {
        r.checks.push_back({std::move(name), pass, warn, std::move(detail)});
    };

    add("dimension", p.dim == 2 || p.dim == 3, "dim=" + std::to_string(p.dim));
    add("m positive", p.m > 0.0);
    add("diffusion bracket", p.c_d_lower > 0.0 && p.c_d_upper >= p.c_d_lower,
        "requires c_d_upper >= c_d_lower > 0");
    add("epsilon range", p.epsilon > 0.0 && p.epsilon <= 1.0, "requires 0 < epsilon <= 1");

    r.theorem_regime = p.theorem_regime();
    if (!r.theorem_regime) {
        std::ostringstream os;
        os << "m=" << p.m << " <= 10/9: outside the global-existence regime";
        r.warnings.push_back(os.str());
        add("m > 10/9", false, os.str(), true);
    } else {
        add("m > 10/9", true);
    }

    bool coeffs_ok = true;
    for (double a : s.s0_coeffs) coeffs_ok = coeffs_ok && a >= 0.0;
    add("S_0 nondecreasing", coeffs_ok, "S_0 coefficients must be nonnegative");

    if (p.dim == 2 || p.dim == 3) {
        bool bound_ok = coeffs_ok;
        if (coeffs_ok) {
            // Deterministic sample lattice of (n, c) in [0, 100]^2.
            for (int a = 0; a <= 20 && bound_ok; ++a)
                for (int b = 0; b <= 20 && bound_ok; ++b) {
                    const double n = 5.0 * a, c = 5.0 * b;
                    const Tensor t = eval_sensitivity(s, p.dim, {0.5, 0.5, 0.5}, n, c);
                    bound_ok = frobenius(t, p.dim) <= s.s0(c) * (1.0 + 1e-14) + 1e-12;
                }
        }
        add("|S| <= S_0(c)", bound_ok);
    }

    const double sup = phi.sup_norm(p.dim);
    add("grad phi bounded", std::isfinite(sup));

    const Grid& g = init.n0.grid();
    const bool shapes = g.dim() == p.dim && init.c0.grid() == g && init.u0.grid() == g;
    add("initial data shapes", shapes, "n0, c0, u0 must share a grid of dimension dim");
    if (shapes) {
        const bool finite = init.n0.all_finite() && init.c0.all_finite() && init.u0.all_finite();
        add("initial data finite", finite);
        {
            const double mn = init.n0.min();
            std::ostringstream os;
            os << "min(n0)=" << mn;
            add("n0 >= 0", mn >= 0.0, os.str());
        }
        {
            const double mc = init.c0.min();
            std::ostringstream os;
            os << "min(c0)=" << mc;
            add("c0 >= 0", mc >= 0.0, os.str());
        }
        if (finite) {
            const double div = norm_lp(divergence(init.u0), INFINITY);
            const double scale = (1.0 + init.u0.max_abs()) / g.h_min();
            std::ostringstream os;
            os << "max|div u0|=" << div;
            add("u0 divergence-free", div <= divergence_tolerance * scale, os.str());
        }
    }
    return r;
}

// ---------------------------------------------------------------------------

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw DomainError("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    num = g ? n / g : 0;
    den = g ? d / g : 1;
}

std::string Rational::str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational operator+(Rational a, Rational b) { return Rational(a.num * b.den + b.num * a.den, a.den * b.den); }
Rational operator-(Rational a, Rational b) { return Rational(a.num * b.den - b.num * a.den, a.den * b.den); }
Rational operator*(Rational a, Rational b) { return Rational(a.num * b.num, a.den * b.den); }
Rational operator/(Rational a, Rational b) {
    if (b.num == 0) throw DomainError("rational division by zero");
    return Rational(a.num * b.den, a.den * b.num);
}
bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }

ExponentTable theorem_exponents(Rational m) {
    if (m <= Rational(10, 9)) throw DomainError("theorem exponents need m > 10/9, got " + m.str());
    const Rational one(1), two(2), three(3), four(4);
    ExponentTable t;
    if (m <= two) {
        t.n_exponent = (three * m + two) / three;
        t.grad_n_exponent = (three * m + two) / four;
        t.gamma1 = four * (three * m + two) / (three * m + Rational(14));
        t.gamma2 = Rational(20, 11);
    } else {
        t.n_exponent = Rational(8) * (m - one) / three;
        t.gamma1 = Rational(8) * (m - one) / (four * m - one);
        t.gamma2 = Rational(5, 4);
    }
    return t;
}

} // namespace cns
