#include "cns/cns.h"

#include "cns/acceptance.hpp"
#include "cns/checkpoint.hpp"
#include "cns/config.hpp"
#include "cns/harness.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

struct cns_config {
    nlohmann::json doc;
    cns::RunConfig parsed;
};

struct cns_sim {
    cns::RunConfig config;
    std::unique_ptr<cns::Stepper> stepper;
    cns::State state;
};

namespace {

thread_local std::string g_last_error;

cns_status fail(cns_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

char* dup(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (p) std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

template <class F>
cns_status guarded(F&& f) {
    try {
        g_last_error.clear();
        return f();
    } catch (const cns::Error& e) {
        return fail(static_cast<cns_status>(e.status()), e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(CNS_ERR_VALIDATION, e.what());
    } catch (const std::bad_alloc&) {
        return fail(CNS_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CNS_ERR_INTERNAL, e.what());
    }
}

cns_status make_config(nlohmann::json doc, cns_config** out) {
    auto cfg = std::make_unique<cns_config>();
    cfg->parsed = cns::parse_config(doc);
    cfg->doc = std::move(doc);
    *out = cfg.release();
    return CNS_OK;
}

} // namespace

extern "C" {

const char* cns_version(void) { return "1.0.0"; }

const char* cns_last_error(void) { return g_last_error.c_str(); }

const char* cns_status_name(cns_status s) {
    switch (s) {
    case CNS_OK: return "ok";
    case CNS_ERR_USAGE: return "usage";
    case CNS_ERR_VALIDATION: return "validation";
    case CNS_ERR_SOLVER: return "solver";
    case CNS_ERR_BLOWUP: return "blowup";
    case CNS_ERR_IO: return "io";
    case CNS_ERR_ACCEPTANCE: return "acceptance";
    case CNS_ERR_FORMAT: return "format";
    case CNS_ERR_DOMAIN: return "domain";
    case CNS_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

void cns_string_free(char* s) { std::free(s); }

cns_status cns_config_load(const char* path, cns_config** out) {
    if (!path || !out) return fail(CNS_ERR_USAGE, "null argument");
    *out = nullptr;
    return guarded([&] {
        std::ifstream is(path);
        if (!is) return fail(CNS_ERR_IO, std::string("cannot open configuration '") + path + "'");
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(is);
        } catch (const nlohmann::json::exception& e) {
            return fail(CNS_ERR_VALIDATION, std::string("configuration is not valid JSON: ") + e.what());
        }
        cns::apply_environment(doc);
        return make_config(std::move(doc), out);
    });
}

cns_status cns_config_parse(const char* json_text, cns_config** out) {
    if (!json_text || !out) return fail(CNS_ERR_USAGE, "null argument");
    *out = nullptr;
    return guarded([&] {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(json_text);
        } catch (const nlohmann::json::exception& e) {
            return fail(CNS_ERR_VALIDATION, std::string("configuration is not valid JSON: ") + e.what());
        }
        return make_config(std::move(doc), out);
    });
}

cns_status cns_config_set(cns_config* cfg, const char* dotted_key, const char* json_value) {
    if (!cfg || !dotted_key || !json_value) return fail(CNS_ERR_USAGE, "null argument");
    return guarded([&] {
        nlohmann::json value;
        try {
            value = nlohmann::json::parse(json_value);
        } catch (const nlohmann::json::exception&) {
            value = std::string(json_value);  // bare strings such as paths
        }
        nlohmann::json doc = cfg->doc;
        cns::set_config_value(doc, dotted_key, value);
        cfg->parsed = cns::parse_config(doc);
        cfg->doc = std::move(doc);
        return CNS_OK;
    });
}

cns_status cns_config_to_json(const cns_config* cfg, char** out) {
    if (!cfg || !out) return fail(CNS_ERR_USAGE, "null argument");
    return guarded([&] {
        *out = dup(cns::to_json(cfg->parsed).dump(2));
        return *out ? CNS_OK : fail(CNS_ERR_INTERNAL, "out of memory");
    });
}

void cns_config_free(cns_config* cfg) { delete cfg; }

cns_status cns_run(const cns_config* cfg, char** summary_json) {
    if (!cfg) return fail(CNS_ERR_USAGE, "null argument");
    if (summary_json) *summary_json = nullptr;
    return guarded([&] {
        const cns::RunOutcome r = cns::run(cfg->parsed);
        nlohmann::json s{{"status", static_cast<int>(r.status)},
                         {"message", r.message},
                         {"seconds", r.seconds},
                         {"dir", r.files.dir},
                         {"series_csv", r.files.series_csv},
                         {"audit_json", r.files.audit_json},
                         {"checkpoint", r.files.checkpoint},
                         {"audit", r.audit.to_json()},
                         {"validation", r.validation.summary()}};
        if (r.result) {
            s["steps"] = r.result->steps;
            s["final_time"] = r.result->state.t;
            s["blowup"] = r.result->blowup;
        }
        if (summary_json) *summary_json = dup(s.dump(2));
        if (r.status != cns::Status::ok) return fail(static_cast<cns_status>(r.status), r.message);
        return CNS_OK;
    });
}

cns_status cns_sweep(const cns_config* cfg, const double* ladder, size_t count, char** result_json) {
    if (!cfg || (!ladder && count)) return fail(CNS_ERR_USAGE, "null argument");
    if (result_json) *result_json = nullptr;
    return guarded([&] {
        const cns::SweepResult r = cns::sweep_epsilon(cfg->parsed, std::vector<double>(ladder, ladder + count));
        if (result_json) *result_json = dup(r.to_json().dump(2));
        if (!r.all_members_ok) {
            for (const auto& m : r.members)
                if (m.status != cns::Status::ok)
                    return fail(static_cast<cns_status>(m.status), "sweep member eps=" + std::to_string(m.epsilon) +
                                                                       " failed: " + m.message);
        }
        if (!r.pass) return fail(CNS_ERR_ACCEPTANCE, "epsilon-sweep differences are not nonincreasing");
        return CNS_OK;
    });
}

cns_status cns_verify(const char* scratch_dir, const int* only, size_t only_count, int workers,
                      cns_line_callback on_line, void* user, int* failed) {
    if (only_count && !only) return fail(CNS_ERR_USAGE, "null argument");
    return guarded([&] {
        cns::AcceptanceOptions opts;
        if (scratch_dir) opts.scratch_dir = scratch_dir;
        opts.only.assign(only, only + only_count);
        opts.workers = workers;
        int nfail = 0;
        cns::run_acceptance(opts, [&](const cns::CriterionResult& r) {
            if (!r.pass) ++nfail;
            if (on_line) on_line(cns::format_result(r).c_str(), user);
        });
        if (failed) *failed = nfail;
        return nfail == 0 ? CNS_OK : fail(CNS_ERR_ACCEPTANCE, std::to_string(nfail) + " acceptance criteria failed");
    });
}

cns_status cns_inspect(const char* checkpoint_path, char** header_json) {
    if (!checkpoint_path || !header_json) return fail(CNS_ERR_USAGE, "null argument");
    *header_json = nullptr;
    return guarded([&] {
        *header_json = dup(cns::inspect_checkpoint(checkpoint_path).dump(2));
        return CNS_OK;
    });
}

cns_status cns_sim_create(const cns_config* cfg, cns_sim** out) {
    if (!cfg || !out) return fail(CNS_ERR_USAGE, "null argument");
    *out = nullptr;
    return guarded([&] {
        const cns::RunConfig& c = cfg->parsed;
        const cns::InitialData init = cns::make_initial(c.initial, c.grid, c.params, c.potential, c.seed);
        const cns::ValidationReport rep = cns::validate_params(c.params, c.sensitivity, c.potential, init);
        if (!rep.may_run(c.allow_subthreshold)) return fail(CNS_ERR_VALIDATION, rep.summary());
        auto sim = std::make_unique<cns_sim>();
        sim->config = c;
        sim->stepper = std::make_unique<cns::Stepper>(c.grid, c.params, c.sensitivity, c.potential, c.solvers, c.time);
        sim->state = cns::State::from_initial(init);
        *out = sim.release();
        return CNS_OK;
    });
}

cns_status cns_sim_step(cns_sim* sim, double* dt_taken) {
    if (!sim) return fail(CNS_ERR_USAGE, "null argument");
    return guarded([&] {
        const auto& t = sim->config.time;
        const double dt = t.fixed_dt ? *t.fixed_dt : sim->stepper->stable_dt(sim->state);
        std::pair<cns::State, cns::StepReport> r;
        try {
            r = sim->stepper->step_coupled(sim->state, dt);
        } catch (const cns::StepRejected& e) {
            return fail(CNS_ERR_BLOWUP, e.what());
        }
        sim->state = std::move(r.first);
        if (dt_taken) *dt_taken = r.second.dt;
        if (!r.second.all_ok()) return fail(CNS_ERR_ACCEPTANCE, "step invariant check failed");
        return CNS_OK;
    });
}

cns_status cns_sim_advance(cns_sim* sim, double t_end) {
    if (!sim) return fail(CNS_ERR_USAGE, "null argument");
    while (sim->state.t < t_end) {
        const cns_status s = cns_sim_step(sim, nullptr);
        if (s != CNS_OK) return s;
    }
    return CNS_OK;
}

cns_status cns_sim_time(const cns_sim* sim, double* t, long* step) {
    if (!sim) return fail(CNS_ERR_USAGE, "null argument");
    if (t) *t = sim->state.t;
    if (step) *step = sim->state.step;
    return CNS_OK;
}

cns_status cns_sim_functionals(const cns_sim* sim, double out[8]) {
    if (!sim || !out) return fail(CNS_ERR_USAGE, "null argument");
    return guarded([&] {
        const cns::Functionals f = cns::compute_functionals(sim->state, sim->config.params);
        const double v[8] = {f.mass, f.c_sup, f.entropy, f.sqrt_dirichlet, f.kinetic, f.energy, f.power_mass, f.c_squared};
        std::copy(v, v + 8, out);
        return CNS_OK;
    });
}

cns_status cns_sim_save(const cns_sim* sim, const char* path) {
    if (!sim || !path) return fail(CNS_ERR_USAGE, "null argument");
    return guarded([&] {
        cns::save_checkpoint(path, sim->state, {{"seed", sim->config.seed}, {"rng", cns::kRngAlgorithm}});
        return CNS_OK;
    });
}

void cns_sim_free(cns_sim* sim) { delete sim; }

} // extern "C"
