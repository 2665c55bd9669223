#pragma once

#include "cns/grid.hpp"
#include "cns/model_config.hpp"
#include "cns/timestepper.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace cns {

/// Instantaneous functionals of one state.
struct Functionals {
    double mass = 0.0;            ///< int n
    double c_sup = 0.0;           ///< ||c||_inf
    double entropy = 0.0;         ///< int n ln n (0 ln 0 = 0)
    double sqrt_dirichlet = 0.0;  ///< int |grad sqrt c|^2
    double kinetic = 0.0;         ///< int |u|^2
    double energy = 0.0;          ///< regime-dependent energy
    double power_mass = 0.0;      ///< int (n + eps)^(m-1)
    double c_squared = 0.0;       ///< int c^2
};

/// Space integrals whose time integrals are tracked as dissipation budgets.
/// Order matches FunctionalSeries::budget_names().
using DissipationRates = std::array<double, 6>;

struct SeriesRecord {
    double t = 0.0;
    long step = 0;
    Functionals f;
    DissipationRates budgets{};
};

class FunctionalSeries {
public:
    static const std::array<const char*, 6>& budget_names();
    static const std::vector<std::string>& csv_columns();

    const std::vector<SeriesRecord>& records() const noexcept { return records_; }
    bool empty() const noexcept { return records_.empty(); }
    std::size_t size() const noexcept { return records_.size(); }

    /// Appends a record. Enforces strictly increasing times, nondecreasing
    /// budgets and finiteness; throws Error(internal) otherwise.
    void append(const SeriesRecord& r);

    /// Writes the CSV (header line with the fixed column order, then one row
    /// per record, values with 17 significant digits).
    void write_csv(std::ostream& os) const;

    /// Fault injection hook for audit tests.
    std::vector<SeriesRecord>& mutable_records() noexcept { return records_; }

private:
    std::vector<SeriesRecord> records_;
};

/// Regime-selected energy: int n ln n + int |grad sqrt c|^2 + int |u|^2 for
/// 10/9 < m <= 2; int (n+eps)^(m-1) + int c^2 + int |u|^2 for m > 2. Throws
/// DomainError for m <= 10/9 or negative n, c.
double energy(const State& s, const ModelParams& p);

Functionals compute_functionals(const State& s, const ModelParams& p);

/// int n^(m-2)|grad n|^2, int |grad c|^4, int |grad u|^2, int c|D^2 ln c|^2,
/// int (n+eps)^(2m-4)|grad n|^2, int |grad c|^2.
DissipationRates dissipation_rates(const State& s, const ModelParams& p);

/// Appends the functionals of `s`, with budgets advanced by dt times the
/// dissipation integrands of `s`.
void record(const State& s, const ModelParams& p, FunctionalSeries& series, double dt);

struct AuditCheck {
    std::string name;
    std::string bound_form;            ///< "constant" or "a+bT"
    std::vector<double> fitted;        ///< fitted constants
    double max_violation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

struct AuditReport {
    std::vector<AuditCheck> checks;
    bool all_pass() const;
    const AuditCheck* find(const std::string& name) const;
    nlohmann::json to_json() const;
};

/// (a) sup E <= E(0) + 1.5 C_fit, C_fit the largest rise over the first 10%
/// of the records; (b) each budget stays within 5% of its range above its
/// least-squares line; (c) mass constant to 1e-12 relative; (d) ||c||_inf
/// nonincreasing to 1e-12.
AuditReport audit_bounds(const FunctionalSeries& series);

/// Minimal constant C in
///   |grad phi|_lambda <= C | |grad phi|^(q-1) D^2 phi |_2^a |phi|_inf^b + C |phi|_inf,
///   a = 2(lambda-3)/((2q-1)lambda), b = (6q-lambda)/((2q-1)lambda),
/// per field and over the corpus (norms over cells at least two from the
/// boundary). `fitted` holds {corpus max C, per-field C...}. Throws DomainError
/// unless lambda in [2q+2, 4q+1] and every field is strictly positive.
AuditReport gn_audit(const std::vector<ScalarField>& corpus, double q, double lambda);

/// Compares the corpus-max constants of two gn_audit runs (e.g. one grid
/// refinement apart); passes if they agree within a factor `ratio`.
AuditCheck gn_refinement_check(const AuditReport& coarse, const AuditReport& fine, double ratio = 2.0);

/// |Lap w^(1/2)|_2 <= 1/2 |w^(1/2) Lap ln w|_2 + 1/4 |w^(-3/2)|grad w|^2|_2
/// with additive slack 10 h, plus the sign and size (relative to int w) of
/// -2 int |Lap w|^2/w + int |grad w|^2 Lap w / w^2. Throws DomainError if
/// min w <= 0.
AuditReport pointwise_log_identity_audit(const ScalarField& w);

} // namespace cns
