#include "doctest.h"
#include "support.hpp"

#include "cns/checkpoint.hpp"
#include "cns/config.hpp"
#include "cns/error.hpp"
#include "cns/harness.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

using namespace cns;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("cns_unit_" + tag + "_" + std::to_string(std::random_device{}()));
    fs::create_directories(p);
    return p;
}

json small_config(const fs::path& root) {
    json j = json::parse(R"({
        "m": 1.5, "epsilon": 0.1,
        "sensitivity": {"family": "rotational", "theta": 0.5, "s0": [0.5]},
        "grad_phi": [0.0, -1.0],
        "grid": {"cells": [16, 16], "extents": [4.0, 4.0]},
        "time": {"horizon": 0.05},
        "initial": {"n_mean": 0.2, "n_amplitude": 0.1, "c_amplitude": 0.3, "modes": 2, "velocity": "stokes"},
        "seed": 3
    })");
    j["output"] = {{"root", root.string()}, {"name", "smoke"}};
    return j;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

State random_state(const Grid& g) {
    State s = State::zeros(g);
    s.n = testing::noise(g, 200, 0.0, 2.0);
    s.c = testing::noise(g, 201, 0.0, 1.0);
    s.stokes.pressure = testing::noise(g, 202);
    s.stokes.u = testing::face_noise(g, 203);
    s.t = 0.123456789;
    s.step = 42;
    return s;
}

// Splits a serialized checkpoint into its header and payload.
std::pair<json, std::string> split(const std::string& bytes) {
    std::uint64_t len = 0;
    std::memcpy(&len, bytes.data() + 8, 8);
    return {json::parse(bytes.substr(16, len)), bytes.substr(16 + len)};
}

std::string join(const json& header, const std::string& payload) {
    const std::string h = header.dump();
    const std::uint64_t len = h.size();
    std::string out = "CNSCKPT1";
    out.append(reinterpret_cast<const char*>(&len), 8);
    return out + h + payload;
}

template <class F>
std::string format_error_field(F&& f) {
    try {
        f();
    } catch (const FormatError& e) {
        return e.field().empty() ? std::string("<none>") : e.field();
    }
    return "<no error>";
}

} // namespace

TEST_SUITE("harness_cli") {

TEST_CASE("config parsing is strict") {
    const json base = small_config("/tmp/unused");
    const RunConfig c = parse_config(base);
    CHECK(c.params.m == 1.5);
    CHECK(c.grid.cells(0) == 16);
    CHECK(c.grid.extent(1) == 4.0);
    CHECK(c.sensitivity.family == SensitivityFamily::rotational);
    CHECK(c.time.horizon == 0.05);
    CHECK(c.seed == 3);

    json typo = base;
    typo["time"]["horizn"] = 1.0;
    try {
        parse_config(typo);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("time.horizn") != std::string::npos);
    }
    json missing = base;
    missing.erase("m");
    CHECK_THROWS_AS(parse_config(missing), ValidationError);
    json wrong = base;
    wrong["seed"] = "three";
    CHECK_THROWS_AS(parse_config(wrong), ValidationError);

    // Round trip through to_json.
    const RunConfig again = parse_config(to_json(c));
    CHECK(to_json(again) == to_json(c));

    json doc = base;
    set_config_value(doc, "solvers.yosida_tolerance", 1e-8);
    CHECK(parse_config(doc).solvers.yosida_tolerance == 1e-8);
}

TEST_CASE("output root from the environment") {
    json doc = small_config("/from/config");
    ::setenv(kOutputRootEnv, "/from/env", 1);
    apply_environment(doc);
    ::unsetenv(kOutputRootEnv);
    CHECK(parse_config(doc).output.root == "/from/env");
    json untouched = small_config("/from/config");
    apply_environment(untouched);
    CHECK(parse_config(untouched).output.root == "/from/config");
}

TEST_CASE("checkpoint round trip is bit exact") {
    for (const Grid& g : {Grid(2, {12, 8, 1}, {3.0, 2.0, 1.0}), Grid::cube(6)}) {
        const State s = random_state(g);
        std::stringstream buf;
        write_checkpoint(buf, s, {{"note", "unit"}});
        json meta;
        const State r = read_checkpoint(buf, &meta);
        CHECK(meta["note"] == "unit");
        CHECK(r.grid() == g);
        CHECK(r.t == s.t);
        CHECK(r.step == s.step);
        CHECK(r.n.data() == s.n.data());
        CHECK(r.c.data() == s.c.data());
        CHECK(r.stokes.pressure.data() == s.stokes.pressure.data());
        for (int a = 0; a < g.dim(); ++a) {
            const auto x = r.stokes.u.component(a), y = s.stokes.u.component(a);
            CHECK(std::equal(x.begin(), x.end(), y.begin(), y.end()));
        }
    }
}

TEST_CASE("checkpoint format errors") {
    const State s = random_state(Grid::square(8));
    std::stringstream buf;
    write_checkpoint(buf, s);
    const std::string bytes = buf.str();
    auto read = [](const std::string& b) {
        std::istringstream in(b);
        read_checkpoint(in);
    };
    auto [header, payload] = split(bytes);

    CHECK(format_error_field([&] { read("XXXXXXXX" + bytes.substr(8)); }) == "magic");

    json shape = header;
    shape["fields"][1]["shape"] = {9, 8};
    CHECK(format_error_field([&] { read(join(shape, payload)); }) == "c");

    json version = header;
    version["version"] = 99;
    try {
        read(join(version, payload));
        FAIL("expected a format error");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("unsupported checkpoint version 99") != std::string::npos);
    }

    CHECK(format_error_field([&] { read(bytes.substr(0, bytes.size() - 16)); }) == "u.y");
    CHECK(format_error_field([&] { read(bytes + "x"); }) == "payload");
    CHECK(format_error_field([&] { read(bytes.substr(0, 20)); }) != "<no error>");

    CHECK_THROWS_AS(load_checkpoint("/nonexistent/dir/x.ckpt"), IoError);
}

TEST_CASE("run writes three artifacts and is reproducible") {
    const fs::path root = scratch("run");
    const RunConfig cfg = parse_config(small_config(root));
    const RunOutcome a = run(cfg);
    REQUIRE(a.status == Status::ok);
    CHECK(fs::exists(a.files.series_csv));
    CHECK(fs::exists(a.files.audit_json));
    CHECK(fs::exists(a.files.checkpoint));
    CHECK(a.audit.all_pass());
    const std::string csv_a = slurp(a.files.series_csv);

    const json audit = json::parse(slurp(a.files.audit_json));
    CHECK(audit["provenance"]["seed"] == 3);
    CHECK(audit["provenance"]["rng"] == kRngAlgorithm);

    const State final_state = load_checkpoint(a.files.checkpoint);
    CHECK(final_state.t == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(inspect_checkpoint(a.files.checkpoint)["payload_bytes"].get<std::size_t>() > 0);

    const RunOutcome b = run(cfg);
    REQUIRE(b.status == Status::ok);
    CHECK(slurp(b.files.series_csv) == csv_a);
    fs::remove_all(root);
}

TEST_CASE("sub-threshold m is refused") {
    const fs::path root = scratch("sub");
    json doc = small_config(root);
    doc["m"] = 1.0;
    RunConfig cfg = parse_config(doc);
    const RunOutcome r = run(cfg);
    CHECK(r.status == Status::validation);
    CHECK_FALSE(r.result.has_value());
    CHECK_FALSE(fs::exists(root / "smoke" / "series.csv"));

    cfg.allow_subthreshold = true;
    cfg.time.horizon = 0.01;
    CHECK(run(cfg).status == Status::ok);
    fs::remove_all(root);
}

TEST_CASE("ladder preconditions") {
    CHECK_NOTHROW(check_ladder({0.4, 0.2, 0.1}));
    CHECK_THROWS_AS(check_ladder({0.1, 0.2}), ValidationError);
    CHECK_THROWS_AS(check_ladder({0.2, 0.2}), ValidationError);
    CHECK_THROWS_AS(check_ladder({}), ValidationError);
    CHECK_THROWS_AS(check_ladder({1.5, 0.5}), ValidationError);

    CHECK(nonincreasing_within({3.0, 2.0, 2.2, 1.0}));
    CHECK_FALSE(nonincreasing_within({1.0, 2.0}));
    CHECK_FALSE(nonincreasing_within({1.0, NAN}));
    CHECK(nonincreasing_within({}));

    const fs::path root = scratch("sweep");
    RunConfig cfg = parse_config(small_config(root));
    cfg.time.horizon = 0.02;
    const SweepResult one = sweep_epsilon(cfg, {0.1});
    CHECK(one.pass);
    CHECK(one.diff_n_l1.empty());
    CHECK(one.members.size() == 1);

    const SweepResult three = sweep_epsilon(cfg, {0.4, 0.2, 0.1});
    CHECK(three.all_members_ok);
    CHECK(three.diff_n_l1.size() == 2);
    CHECK(fs::exists(root / "smoke" / "sweep.json"));
    CHECK(fs::exists(root / "smoke" / "eps_2" / "series.csv"));
    CHECK_THROWS_AS(sweep_epsilon(cfg, {0.1, 0.2}), ValidationError);
    fs::remove_all(root);
}

TEST_CASE("exit codes are distinct") {
    std::set<int> codes;
    for (Status s : {Status::ok, Status::usage, Status::validation, Status::solver, Status::blowup, Status::io,
                     Status::acceptance, Status::format, Status::domain, Status::internal})
        codes.insert(static_cast<int>(s));
    CHECK(codes.size() == 10);
    CHECK(DomainError("x").status() == Status::domain);
    CHECK(FormatError("x").status() == Status::format);
    CHECK(IoError("x").status() == Status::io);
}

} // TEST_SUITE
