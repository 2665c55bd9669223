#pragma once

#include "cns/grid.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cns {

/// Physical and regularisation parameters of the approximate problem.
struct ModelParams {
    double m = 1.5;          ///< porous-medium exponent
    double kappa = 1.0;      ///< strength of the (Yosida-regularised) fluid convection
    double c_d_lower = 1.0;  ///< C_D, the diffusivity used by the solver
    double c_d_upper = 1.0;  ///< upper power-law bracket constant
    double epsilon = 0.1;    ///< regularisation parameter in (0, 1]
    int dim = 2;

    /// True iff m > 10/9, the range with global weak solutions.
    bool theorem_regime() const noexcept;
};

enum class SensitivityFamily { scalar, rotational, saturating };

/// Chemotactic sensitivity tensor S(x, n, c). Every family is scaled so that
/// its Frobenius norm is S_0(c) (scalar, rotational) or S_0(c)/(1+n)
/// (saturating), with S_0(c) = sum_k s0[k] c^k.
struct SensitivitySpec {
    SensitivityFamily family = SensitivityFamily::scalar;
    std::vector<double> s0_coeffs{1.0};
    double theta = 0.0;                    ///< rotation angle (radians)
    std::array<double, 3> axis{0.0, 0.0, 1.0};  ///< 3D rotation axis

    double s0(double c) const;
    /// True when S vanishes identically (empty or all-zero S_0).
    bool is_zero() const;
};

using Tensor = std::array<std::array<double, 3>, 3>;

/// Evaluates S(x, n, c) into the leading dim x dim block. Throws DomainError
/// for n < 0 or c < 0.
Tensor eval_sensitivity(const SensitivitySpec& s, int dim, const std::array<double, 3>& x, double n, double c);

double frobenius(const Tensor& t, int dim);

/// Constant potential gradient, optionally replaced by a face-sampled field.
struct PotentialSpec {
    std::array<double, 3> grad_phi{0.0, 0.0, 0.0};
    std::optional<VectorField> sampled;

    double sup_norm(int dim) const;
    /// Face-normal components of grad(phi) on `grid` (boundary faces zero).
    VectorField on_faces(const Grid& grid) const;
};

struct InitialData {
    ScalarField n0;
    ScalarField c0;
    VectorField u0;
};

struct HypothesisCheck {
    std::string name;
    bool pass = true;
    bool warning_only = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<HypothesisCheck> checks;
    bool theorem_regime = false;
    std::vector<std::string> warnings;

    /// True when no hard check failed. Warnings (sub-threshold m) do not count.
    bool all_pass() const;
    /// True if the simulation may start: all hard checks pass and either m is
    /// in the theorem regime or `allow_subthreshold` is set.
    bool may_run(bool allow_subthreshold) const;
    std::string summary() const;
};

/// Checks the standing hypotheses on the parameters, sensitivity, potential
/// and initial data. Non-finite parameters are rejected with ValidationError;
/// every other problem is reported as a failed entry.
ValidationReport validate_params(const ModelParams& p, const SensitivitySpec& s, const PotentialSpec& phi,
                                 const InitialData& init, double divergence_tolerance = 1e-9);

/// Exact rational with reduced int64 numerator/denominator (den > 0).
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d = 1);
    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;

    friend Rational operator+(Rational a, Rational b);
    friend Rational operator-(Rational a, Rational b);
    friend Rational operator*(Rational a, Rational b);
    friend Rational operator/(Rational a, Rational b);
    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend bool operator<(Rational a, Rational b);
    friend bool operator<=(Rational a, Rational b) { return !(b < a); }
};

/// Space-time integrability exponents of the a-priori estimates.
struct ExponentTable {
    Rational n_exponent;                  ///< integrability of (n+eps)
    std::optional<Rational> grad_n_exponent;  ///< of |grad n|; absent for m > 2
    Rational gamma1;                      ///< chemotactic flux
    Rational gamma2;                      ///< transport term u . grad c
};

/// Case split at m = 2 (inclusive on the lower branch). Throws DomainError for
/// m <= 10/9.
ExponentTable theorem_exponents(Rational m);

} // namespace cns
