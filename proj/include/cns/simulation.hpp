#pragma once

#include "cns/diagnostics.hpp"
#include "cns/timestepper.hpp"

#include <functional>
#include <string>

namespace cns {

struct RunCallbacks {
    /// After every accepted step, with the new state.
    std::function<void(const State&, const StepReport&)> on_step;
    /// After every appended record.
    std::function<void(const State&, const SeriesRecord&)> on_record;
};

struct RunResult {
    State state;
    FunctionalSeries series;
    long steps = 0;
    long halvings = 0;
    bool blowup = false;          ///< no step accepted within the halving cap
    std::string blowup_reason;
    bool invariants_ok = true;    ///< every StepReport passed all_ok()
    std::string first_violation;
    double min_n = 0.0;           ///< smallest density over all accepted states
    double max_yosida_sweeps = 0.0;
};

/// Steps from `s0` to the stepper's horizon with adaptive (or fixed) dt.
/// Records every `cadence` accepted steps plus the initial and the final
/// state. Budgets accumulate left-endpoint quadrature every step, so they do
/// not depend on the cadence. A horizon of 0 returns `s0` and an empty series.
RunResult run_to_time(Stepper& stepper, const State& s0, int cadence = 1, const RunCallbacks& cb = {});

} // namespace cns
