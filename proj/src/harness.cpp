#include "cns/harness.hpp"

#include "cns/checkpoint.hpp"
#include "cns/operators.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace cns {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    os << text;
    os.flush();
    if (!os) throw IoError("failed writing '" + path.string() + "'");
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

nlohmann::json provenance(const RunConfig& c) {
    return {{"seed", c.seed}, {"rng", kRngAlgorithm}, {"config", to_json(c)}};
}

} // namespace

RunOutcome run_with(const RunConfig& config, const InitialData& init, const std::string& dir) {
    const auto t0 = std::chrono::steady_clock::now();
    RunOutcome out;
    auto finish = [&](Status st, std::string msg) {
        out.status = st;
        out.message = std::move(msg);
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    };
    try {
        out.validation = validate_params(config.params, config.sensitivity, config.potential, init);
        if (!out.validation.may_run(config.allow_subthreshold))
            return finish(Status::validation, out.validation.summary());

        Stepper stepper(config.grid, config.params, config.sensitivity, config.potential, config.solvers, config.time);
        RunResult res = run_to_time(stepper, State::from_initial(init), config.cadence);

        Status status = Status::ok;
        std::string msg = "ok";
        if (!res.series.empty()) {
            out.audit = audit_bounds(res.series);
            for (const char* name : {"mass_conserved", "c_sup_nonincreasing"}) {
                const AuditCheck* chk = out.audit.find(name);
                if (chk && !chk->pass) {
                    status = Status::acceptance;
                    msg = std::string("audit check ") + name + " failed";
                }
            }
        }
        if (!res.invariants_ok) {
            status = Status::acceptance;
            msg = "step invariant failed at " + res.first_violation;
        }
        if (res.blowup) {
            status = Status::blowup;
            msg = "blow-up suspected: " + res.blowup_reason;
        }

        const fs::path d(dir);
        make_dir(d);
        out.files.dir = d.string();
        out.files.series_csv = (d / "series.csv").string();
        out.files.audit_json = (d / "audit.json").string();
        {
            std::ostringstream csv;
            res.series.write_csv(csv);
            write_text(out.files.series_csv, csv.str());
        }
        nlohmann::json audit = out.audit.to_json();
        audit["run"] = {{"status", static_cast<int>(status)},
                        {"message", msg},
                        {"steps", res.steps},
                        {"halvings", res.halvings},
                        {"blowup", res.blowup},
                        {"invariants_ok", res.invariants_ok},
                        {"final_time", res.state.t},
                        {"min_n", res.min_n},
                        {"theorem_regime", out.validation.theorem_regime},
                        {"warnings", out.validation.warnings}};
        audit["provenance"] = provenance(config);
        write_text(out.files.audit_json, audit.dump(2) + "\n");
        if (config.output.checkpoint) {
            out.files.checkpoint = (d / "final.ckpt").string();
            save_checkpoint(out.files.checkpoint, res.state, provenance(config));
        }
        out.result = std::move(res);
        return finish(status, msg);
    } catch (const Error& e) {
        return finish(e.status(), e.what());
    } catch (const std::exception& e) {
        return finish(Status::internal, e.what());
    }
}

RunOutcome run(const RunConfig& config) {
    InitialData init;
    try {
        init = make_initial(config.initial, config.grid, config.params, config.potential, config.seed);
    } catch (const Error& e) {
        RunOutcome out;
        out.status = e.status();
        out.message = e.what();
        return out;
    }
    return run_with(config, init, (fs::path(config.output.root) / config.output.name).string());
}

// ---------------------------------------------------------------------------

void check_ladder(const std::vector<double>& ladder) {
    if (ladder.empty()) throw ValidationError("epsilon ladder is empty");
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!(ladder[i] > 0.0 && ladder[i] <= 1.0)) throw ValidationError("epsilon ladder entries must lie in (0, 1]");
        if (i > 0 && !(ladder[i] < ladder[i - 1])) throw ValidationError("epsilon ladder must be strictly decreasing");
    }
}

bool nonincreasing_within(const std::vector<double>& v, double slack) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > (1.0 + slack) * v[i - 1]) return false;
    return true;
}

nlohmann::json SweepResult::to_json() const {
    nlohmann::json members_json = nlohmann::json::array();
    for (const auto& m : members)
        members_json.push_back({{"epsilon", m.epsilon},
                                {"status", static_cast<int>(m.status)},
                                {"message", m.message},
                                {"dir", m.dir},
                                {"ok", m.status == Status::ok}});
    auto nums = [](const std::vector<double>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (double x : v) a.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr));
        return a;
    };
    return {{"ladder", ladder},
            {"members", members_json},
            {"diff_n_l1", nums(diff_n_l1)},
            {"diff_c_l2", nums(diff_c_l2)},
            {"diff_u_l2", nums(diff_u_l2)},
            {"trend_n", trend_n},
            {"trend_c", trend_c},
            {"trend_u", trend_u},
            {"all_members_ok", all_members_ok},
            {"pass", pass}};
}

SweepResult sweep_epsilon(const RunConfig& config, const std::vector<double>& ladder) {
    check_ladder(ladder);
    SweepResult out;
    out.ladder = ladder;
    out.members.resize(ladder.size());
    const InitialData init = make_initial(config.initial, config.grid, config.params, config.potential, config.seed);
    const fs::path base = fs::path(config.output.root) / config.output.name;

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < ladder.size();) {
            RunConfig member = config;
            member.params.epsilon = ladder[i];
            SweepMember& m = out.members[i];
            m.epsilon = ladder[i];
            m.dir = (base / ("eps_" + std::to_string(i))).string();
            RunOutcome r = run_with(member, init, m.dir);
            m.status = r.status;
            m.message = r.message;
            if (r.result) {
                m.min_n = r.result->min_n;
                m.final_state = std::move(r.result->state);
            }
        }
    };
    unsigned threads = config.workers > 0 ? static_cast<unsigned>(config.workers) : std::thread::hardware_concurrency();
    threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(ladder.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i + 1 < ladder.size(); ++i) {
        const auto& a = out.members[i].final_state;
        const auto& b = out.members[i + 1].final_state;
        const bool usable = a && b && out.members[i].status == Status::ok && out.members[i + 1].status == Status::ok;
        if (!usable) {
            out.diff_n_l1.push_back(NAN);
            out.diff_c_l2.push_back(NAN);
            out.diff_u_l2.push_back(NAN);
            continue;
        }
        out.diff_n_l1.push_back(norm_lp(a->n - b->n, 1.0));
        out.diff_c_l2.push_back(norm_lp(a->c - b->c, 2.0));
        out.diff_u_l2.push_back(norm_l2(a->stokes.u - b->stokes.u));
    }
    out.all_members_ok = std::all_of(out.members.begin(), out.members.end(),
                                     [](const SweepMember& m) { return m.status == Status::ok; });
    out.trend_n = nonincreasing_within(out.diff_n_l1);
    out.trend_c = nonincreasing_within(out.diff_c_l2);
    out.trend_u = nonincreasing_within(out.diff_u_l2);
    out.pass = out.all_members_ok && out.trend_n;

    make_dir(base);
    write_text(base / "sweep.json", out.to_json().dump(2) + "\n");
    return out;
}

} // namespace cns
