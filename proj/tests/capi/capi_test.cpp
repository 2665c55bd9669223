#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cns/cns.h"

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const char* kConfig = R"({
    "m": 1.5, "epsilon": 0.1,
    "sensitivity": {"family": "rotational", "theta": 0.5, "s0": [0.5]},
    "grad_phi": [0.0, -1.0],
    "grid": {"cells": [16, 16], "extents": [4.0, 4.0]},
    "time": {"horizon": 0.02},
    "initial": {"n_mean": 0.2, "n_amplitude": 0.1, "modes": 2},
    "output": {"name": "capi"}
})";

fs::path scratch() {
    const fs::path p = fs::temp_directory_path() / ("cns_capi_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
}

int cli(const std::string& args) {
    const std::string cmd = std::string(CNS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

} // namespace

TEST_SUITE("harness_cli") {

TEST_CASE("c api config and run") {
    CHECK(std::string(cns_status_name(CNS_ERR_FORMAT)) == "format");
    CHECK(std::string(cns_version()).size() > 0);

    cns_config* cfg = nullptr;
    REQUIRE(cns_config_parse(kConfig, &cfg) == CNS_OK);
    const fs::path root = scratch();
    CHECK(cns_config_set(cfg, "output.root", ("\"" + root.string() + "\"").c_str()) == CNS_OK);
    CHECK(cns_config_set(cfg, "time.horizn", "1") == CNS_ERR_VALIDATION);
    CHECK(std::string(cns_last_error()).find("time.horizn") != std::string::npos);
    CHECK(cns_config_set(cfg, "m", "1.0") == CNS_OK);

    char* summary = nullptr;
    CHECK(cns_run(cfg, &summary) == CNS_ERR_VALIDATION);
    cns_string_free(summary);

    CHECK(cns_config_set(cfg, "m", "1.5") == CNS_OK);
    summary = nullptr;
    CHECK(cns_run(cfg, &summary) == CNS_OK);
    REQUIRE(summary);
    CHECK(std::string(summary).find("series.csv") != std::string::npos);
    cns_string_free(summary);
    CHECK(fs::exists(root / "capi" / "final.ckpt"));

    char* header = nullptr;
    CHECK(cns_inspect((root / "capi" / "final.ckpt").c_str(), &header) == CNS_OK);
    CHECK(std::string(header).find("\"version\"") != std::string::npos);
    CHECK(std::string(header).find("\"payload_bytes\"") != std::string::npos);
    cns_string_free(header);
    CHECK(cns_inspect((root / "missing.ckpt").c_str(), &header) == CNS_ERR_IO);

    const double bad_ladder[] = {0.1, 0.2};
    char* sweep = nullptr;
    CHECK(cns_sweep(cfg, bad_ladder, 2, &sweep) == CNS_ERR_VALIDATION);

    cns_config_free(cfg);
    fs::remove_all(root);
}

TEST_CASE("c api simulation handle") {
    cns_config* cfg = nullptr;
    REQUIRE(cns_config_parse(kConfig, &cfg) == CNS_OK);
    cns_sim* sim = nullptr;
    REQUIRE(cns_sim_create(cfg, &sim) == CNS_OK);
    double f0[8], f1[8], dt = 0.0, t = -1.0;
    long step = -1;
    CHECK(cns_sim_functionals(sim, f0) == CNS_OK);
    CHECK(cns_sim_step(sim, &dt) == CNS_OK);
    CHECK(dt > 0.0);
    CHECK(cns_sim_advance(sim, 10.0 * dt) == CNS_OK);
    CHECK(cns_sim_time(sim, &t, &step) == CNS_OK);
    CHECK(t >= 10.0 * dt);
    CHECK(step >= 10);
    CHECK(cns_sim_functionals(sim, f1) == CNS_OK);
    CHECK(f1[0] == doctest::Approx(f0[0]).epsilon(1e-12));
    CHECK(f1[1] <= f0[1] + 1e-12);
    CHECK(cns_sim_save(sim, "/nonexistent/dir/x.ckpt") == CNS_ERR_IO);
    cns_sim_free(sim);
    cns_config_free(cfg);

    CHECK(cns_config_parse("{\"m\": 1.5}", &cfg) == CNS_ERR_VALIDATION);
    CHECK(cns_config_parse("not json", &cfg) == CNS_ERR_VALIDATION);
}

TEST_CASE("cli exit codes") {
    const fs::path root = scratch();
    const std::string env = "CNS_OUTPUT_ROOT=" + root.string() + " ";
    const std::string cfg = std::string(CNS_SOURCE_DIR) + "/configs/minimal_2d.json";
    CHECK(cli("") == 1);
    CHECK(cli("frobnicate") == 1);
    CHECK(cli("run /nonexistent.json") == 5);
    CHECK(std::system((env + CNS_CLI_PATH + " run " + cfg + " --horizon 0.02 --name cli >/dev/null 2>&1").c_str()) == 0);
    CHECK(fs::exists(root / "cli" / "series.csv"));
    CHECK(fs::exists(root / "cli" / "audit.json"));
    CHECK(fs::exists(root / "cli" / "final.ckpt"));
    CHECK(cli("inspect " + (root / "cli" / "final.ckpt").string()) == 0);
    CHECK(cli("run " + cfg + " --m 1.0 --output-root " + root.string()) == 2);
    CHECK(cli("run " + cfg + " --set time.horizn=1 --output-root " + root.string()) == 2);
    CHECK(cli("sweep " + cfg + " --ladder 0.1,0.2 --output-root " + root.string()) == 2);
    fs::remove_all(root);
}

} // TEST_SUITE
