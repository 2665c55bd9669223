#pragma once

#include "cns/config.hpp"
#include "cns/diagnostics.hpp"
#include "cns/error.hpp"
#include "cns/simulation.hpp"

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace cns {

struct RunArtifacts {
    std::string dir;
    std::string series_csv;
    std::string audit_json;
    std::string checkpoint;  ///< empty when checkpoints are disabled
};

struct RunOutcome {
    Status status = Status::ok;
    std::string message;
    ValidationReport validation;
    std::optional<RunResult> result;
    AuditReport audit;
    RunArtifacts files;
    double seconds = 0.0;
};

/// Validates, simulates and writes series.csv, audit.json and final.ckpt into
/// <output.root>/<output.name>. Failures are mapped to a Status rather than
/// thrown: validation, solver, blowup (no accepted step), acceptance (a step
/// invariant, mass conservation or the c maximum principle failed), io.
RunOutcome run(const RunConfig& config);

/// Same as run() but with given initial data and output directory.
RunOutcome run_with(const RunConfig& config, const InitialData& init, const std::string& dir);

struct SweepMember {
    double epsilon = 0.0;
    Status status = Status::ok;
    std::string message;
    std::string dir;
    double min_n = 0.0;
    std::optional<State> final_state;
};

struct SweepResult {
    std::vector<double> ladder;
    std::vector<SweepMember> members;
    std::vector<double> diff_n_l1;  ///< |n_i - n_{i+1}|_1
    std::vector<double> diff_c_l2;
    std::vector<double> diff_u_l2;
    bool trend_n = true;
    bool trend_c = true;
    bool trend_u = true;
    bool all_members_ok = true;
    /// Every member succeeded and the n differences are nonincreasing up to
    /// the slack.
    bool pass = true;

    nlohmann::json to_json() const;
};

/// Throws ValidationError unless the ladder is nonempty, strictly
/// decreasing and inside (0, 1].
void check_ladder(const std::vector<double>& ladder);

/// True if v[i+1] <= (1 + slack) v[i] for all i (and every entry finite).
bool nonincreasing_within(const std::vector<double>& v, double slack = 0.2);

/// Runs the configured scenario once per epsilon (initial data generated once),
/// members concurrently up to config.workers threads, each writing to
/// <root>/<name>/eps_<index>. Writes sweep.json next to them.
SweepResult sweep_epsilon(const RunConfig& config, const std::vector<double>& ladder);

} // namespace cns
