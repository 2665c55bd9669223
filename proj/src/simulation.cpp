#include "cns/simulation.hpp"

#include "cns/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cns {

namespace {

std::string describe(const StepReport& r) {
    std::ostringstream os;
    if (!r.n_nonnegative) os << "min n = " << r.min_n << "; ";
    if (!r.c_bounds) os << "c outside [0, max c0]: [" << r.min_c << ", " << r.max_c << "]; ";
    if (!r.divergence_ok) os << "max |div u| = " << r.divergence << "; ";
    if (!r.finite) os << "non-finite field; ";
    if (!r.energy_budget_ok) os << "kinetic energy budget exceeded; ";
    return os.str();
}

} // namespace

RunResult run_to_time(Stepper& stepper, const State& s0, int cadence, const RunCallbacks& cb) {
    const double T = stepper.time().horizon;
    if (!(T >= 0.0) || !std::isfinite(T)) throw DomainError("horizon must be finite and nonnegative");
    if (cadence < 1) throw DomainError("diagnostics cadence must be >= 1");
    RunResult res;
    res.state = s0;
    res.min_n = s0.n.min();
    if (T == 0.0) return res;

    const ModelParams& p = stepper.params();
    const double t_end = s0.t + T;
    DissipationRates budgets{};
    auto push = [&](const State& s) {
        SeriesRecord rec{s.t, s.step, compute_functionals(s, p), budgets};
        res.series.append(rec);
        if (cb.on_record) cb.on_record(s, rec);
    };
    push(res.state);

    long since_record = 0;
    while (res.state.t < t_end && t_end - res.state.t > 1e-13 * std::max(1.0, std::abs(t_end))) {
        State& s = res.state;
        double dt = stepper.time().fixed_dt ? *stepper.time().fixed_dt : stepper.stable_dt(s);
        dt = std::min(dt, t_end - s.t);
        const DissipationRates rates = dissipation_rates(s, p);
        std::pair<State, StepReport> out;
        try {
            out = stepper.step_coupled(s, dt);
        } catch (const StepRejected& e) {
            res.blowup = true;
            res.blowup_reason = e.what();
            break;
        }
        const StepReport& rep = out.second;
        for (std::size_t i = 0; i < budgets.size(); ++i) budgets[i] += rep.dt * rates[i];
        if (t_end - out.first.t < 1e-13 * std::max(1.0, std::abs(t_end))) out.first.t = t_end;
        res.state = std::move(out.first);
        ++res.steps;
        res.halvings += rep.halvings;
        res.min_n = std::min(res.min_n, rep.min_n);
        res.max_yosida_sweeps = std::max<double>(res.max_yosida_sweeps, rep.yosida_sweeps);
        if (!rep.all_ok() && res.invariants_ok) {
            res.invariants_ok = false;
            std::ostringstream os;
            os << "step " << res.state.step << " (t = " << res.state.t << "): " << describe(rep);
            res.first_violation = os.str();
        }
        if (cb.on_step) cb.on_step(res.state, rep);
        if (++since_record == cadence) {
            push(res.state);
            since_record = 0;
        }
    }
    if (since_record != 0) push(res.state);
    return res;
}

} // namespace cns
