// Command-line front end over the C API.
#include "cns/cns.h"

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

struct Overrides {
    std::optional<double> m, epsilon, horizon, safety;
    std::optional<int> max_halvings, cadence, workers;
    std::optional<long long> seed;
    std::optional<std::string> output_root, name;
    std::vector<std::string> sets;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--m", o.m, "porous-medium exponent (m)");
    cmd->add_option("--epsilon", o.epsilon, "regularisation parameter (epsilon)");
    cmd->add_option("--horizon", o.horizon, "final time (time.horizon)");
    cmd->add_option("--safety", o.safety, "step safety factor (time.safety)");
    cmd->add_option("--max-halvings", o.max_halvings, "rejected-step cap (time.max_halvings)");
    cmd->add_option("--cadence", o.cadence, "record every k steps (diagnostics.cadence)");
    cmd->add_option("--workers", o.workers, "sweep concurrency (workers)");
    cmd->add_option("--seed", o.seed, "random seed (seed)");
    cmd->add_option("--output-root", o.output_root, "output directory root (output.root)");
    cmd->add_option("--name", o.name, "run directory name (output.name)");
    cmd->add_option("--set", o.sets, "KEY=JSON override for any config key, repeatable");
}

int report_error(cns_status s) {
    std::fprintf(stderr, "error (%s): %s\n", cns_status_name(s), cns_last_error());
    return static_cast<int>(s);
}

cns_status set(cns_config* cfg, const char* key, const std::string& json) { return cns_config_set(cfg, key, json.c_str()); }

cns_status apply(cns_config* cfg, const Overrides& o) {
    cns_status s = CNS_OK;
    auto num = [](double v) { return nlohmann::json(v).dump(); };
    auto str = [](const std::string& v) { return nlohmann::json(v).dump(); };
    if (s == CNS_OK && o.m) s = set(cfg, "m", num(*o.m));
    if (s == CNS_OK && o.epsilon) s = set(cfg, "epsilon", num(*o.epsilon));
    if (s == CNS_OK && o.horizon) s = set(cfg, "time.horizon", num(*o.horizon));
    if (s == CNS_OK && o.safety) s = set(cfg, "time.safety", num(*o.safety));
    if (s == CNS_OK && o.max_halvings) s = set(cfg, "time.max_halvings", std::to_string(*o.max_halvings));
    if (s == CNS_OK && o.cadence) s = set(cfg, "diagnostics.cadence", std::to_string(*o.cadence));
    if (s == CNS_OK && o.workers) s = set(cfg, "workers", std::to_string(*o.workers));
    if (s == CNS_OK && o.seed) s = set(cfg, "seed", std::to_string(*o.seed));
    if (s == CNS_OK && o.output_root) s = set(cfg, "output.root", str(*o.output_root));
    if (s == CNS_OK && o.name) s = set(cfg, "output.name", str(*o.name));
    for (const auto& kv : o.sets) {
        if (s != CNS_OK) break;
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::fprintf(stderr, "error (usage): --set expects KEY=VALUE, got '%s'\n", kv.c_str());
            return CNS_ERR_USAGE;
        }
        s = set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1));
    }
    return s;
}

struct ConfigHandle {
    cns_config* p = nullptr;
    ~ConfigHandle() { cns_config_free(p); }
};

int load(const std::string& path, const Overrides& o, ConfigHandle& cfg) {
    cns_status s = cns_config_load(path.c_str(), &cfg.p);
    if (s == CNS_OK) s = apply(cfg.p, o);
    return s == CNS_OK ? 0 : report_error(s);
}

void print_owned(char* text) {
    if (text) std::printf("%s\n", text);
    cns_string_free(text);
}

std::vector<double> parse_ladder(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string part = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        std::size_t used = 0;
        out.push_back(std::stod(part, &used));
        if (used != part.size()) throw std::invalid_argument(part);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chemotaxis-Navier-Stokes simulator with estimate audits"};
    app.require_subcommand(1);
    app.set_version_flag("--version", cns_version());

    std::string config_path, checkpoint_path, ladder_text, scratch;
    std::vector<int> only;
    Overrides run_o, sweep_o, verify_o;

    auto* run_cmd = app.add_subcommand("run", "run one simulation and write its artifacts");
    run_cmd->add_option("config", config_path, "configuration JSON")->required();
    add_override_flags(run_cmd, run_o);

    auto* sweep_cmd = app.add_subcommand("sweep", "epsilon sweep with pairwise differences");
    sweep_cmd->add_option("config", config_path, "configuration JSON")->required();
    sweep_cmd->add_option("--ladder", ladder_text, "comma separated, strictly decreasing epsilons")->required();
    add_override_flags(sweep_cmd, sweep_o);

    auto* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");
    verify_cmd->add_option("config", config_path, "configuration JSON (output root and workers)")->required();
    verify_cmd->add_option("--only", only, "criterion numbers to run")->delimiter(',');
    verify_cmd->add_option("--scratch", scratch, "directory for run artifacts (default <output.root>/acceptance)");
    add_override_flags(verify_cmd, verify_o);

    auto* inspect_cmd = app.add_subcommand("inspect", "print a checkpoint header");
    inspect_cmd->add_option("checkpoint", checkpoint_path, "checkpoint file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(CNS_ERR_USAGE);
    }

    if (*run_cmd) {
        ConfigHandle cfg;
        if (int rc = load(config_path, run_o, cfg)) return rc;
        char* summary = nullptr;
        const cns_status s = cns_run(cfg.p, &summary);
        print_owned(summary);
        return s == CNS_OK ? 0 : report_error(s);
    }
    if (*sweep_cmd) {
        std::vector<double> ladder;
        try {
            ladder = parse_ladder(ladder_text);
        } catch (const std::exception&) {
            std::fprintf(stderr, "error (usage): cannot parse ladder '%s'\n", ladder_text.c_str());
            return CNS_ERR_USAGE;
        }
        ConfigHandle cfg;
        if (int rc = load(config_path, sweep_o, cfg)) return rc;
        char* result = nullptr;
        const cns_status s = cns_sweep(cfg.p, ladder.data(), ladder.size(), &result);
        print_owned(result);
        return s == CNS_OK ? 0 : report_error(s);
    }
    if (*verify_cmd) {
        ConfigHandle cfg;
        if (int rc = load(config_path, verify_o, cfg)) return rc;
        char* text = nullptr;
        if (cns_status s = cns_config_to_json(cfg.p, &text); s != CNS_OK) return report_error(s);
        const auto doc = nlohmann::json::parse(text);
        cns_string_free(text);
        if (scratch.empty()) scratch = doc["output"]["root"].get<std::string>() + "/acceptance";
        int failed = 0;
        const cns_status s = cns_verify(
            scratch.c_str(), only.data(), only.size(), doc["workers"].get<int>(),
            [](const char* line, void*) {
                std::printf("%s\n", line);
                std::fflush(stdout);
            },
            nullptr, &failed);
        return s == CNS_OK ? 0 : report_error(s);
    }
    char* header = nullptr;
    const cns_status s = cns_inspect(checkpoint_path.c_str(), &header);
    print_owned(header);
    return s == CNS_OK ? 0 : report_error(s);
}
