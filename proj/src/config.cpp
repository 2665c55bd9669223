#include "cns/config.hpp"

#include "cns/error.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

namespace cns {

namespace {

using json = nlohmann::json;

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ValidationError("configuration entry '" + where + "' must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items())
        if (!ok.count(k)) throw ValidationError("unknown configuration key '" + (where.empty() ? k : where + "." + k) + "'");
}

std::string path_of(const std::string& where, const char* key) { return where.empty() ? key : where + "." + key; }

double get_number(const json& obj, const std::string& where, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj[key];
    if (!v.is_number()) throw ValidationError("configuration key '" + path_of(where, key) + "' must be a number");
    return v.get<double>();
}

long get_integer(const json& obj, const std::string& where, const char* key, long fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj[key];
    if (!v.is_number_integer()) throw ValidationError("configuration key '" + path_of(where, key) + "' must be an integer");
    return v.get<long>();
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj[key];
    if (!v.is_boolean()) throw ValidationError("configuration key '" + path_of(where, key) + "' must be a boolean");
    return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const char* key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj[key];
    if (!v.is_string()) throw ValidationError("configuration key '" + path_of(where, key) + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> get_numbers(const json& v, const std::string& where) {
    if (!v.is_array()) throw ValidationError("configuration key '" + where + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ValidationError("configuration key '" + where + "' must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

const char* family_name(SensitivityFamily f) {
    switch (f) {
    case SensitivityFamily::scalar: return "scalar";
    case SensitivityFamily::rotational: return "rotational";
    case SensitivityFamily::saturating: return "saturating";
    }
    return "?";
}

} // namespace

RunConfig parse_config(const json& j) {
    check_keys(j, "", {"m", "kappa", "epsilon", "dim", "c_d", "c_d_upper", "sensitivity", "grad_phi", "grid", "time",
                       "solvers", "diagnostics", "output", "initial", "seed", "allow_subthreshold", "workers"});
    if (!j.contains("m")) throw ValidationError("configuration key 'm' is required");
    if (!j.contains("grid")) throw ValidationError("configuration key 'grid' is required");
    RunConfig c;
    ModelParams& p = c.params;
    p.m = get_number(j, "", "m", p.m);
    p.kappa = get_number(j, "", "kappa", p.kappa);
    p.epsilon = get_number(j, "", "epsilon", p.epsilon);
    p.c_d_lower = get_number(j, "", "c_d", p.c_d_lower);
    p.c_d_upper = get_number(j, "", "c_d_upper", std::max(p.c_d_upper, p.c_d_lower));
    p.dim = static_cast<int>(get_integer(j, "", "dim", 2));
    if (p.dim != 2 && p.dim != 3) throw ValidationError("configuration key 'dim' must be 2 or 3");

    if (j.contains("sensitivity")) {
        const auto& s = j["sensitivity"];
        check_keys(s, "sensitivity", {"family", "s0", "theta", "axis"});
        const std::string fam = get_string(s, "sensitivity", "family", "scalar");
        if (fam == "scalar")
            c.sensitivity.family = SensitivityFamily::scalar;
        else if (fam == "rotational")
            c.sensitivity.family = SensitivityFamily::rotational;
        else if (fam == "saturating")
            c.sensitivity.family = SensitivityFamily::saturating;
        else
            throw ValidationError("unknown sensitivity family '" + fam + "'");
        if (s.contains("s0")) c.sensitivity.s0_coeffs = get_numbers(s["s0"], "sensitivity.s0");
        c.sensitivity.theta = get_number(s, "sensitivity", "theta", 0.0);
        if (s.contains("axis")) {
            const auto ax = get_numbers(s["axis"], "sensitivity.axis");
            if (ax.size() != 3) throw ValidationError("configuration key 'sensitivity.axis' needs 3 entries");
            c.sensitivity.axis = {ax[0], ax[1], ax[2]};
        }
    }

    if (j.contains("grad_phi")) {
        const auto g = get_numbers(j["grad_phi"], "grad_phi");
        if (g.size() != static_cast<std::size_t>(p.dim))
            throw ValidationError("configuration key 'grad_phi' needs one entry per dimension");
        for (std::size_t a = 0; a < g.size(); ++a) c.potential.grad_phi[a] = g[a];
    }

    {
        const auto& g = j["grid"];
        check_keys(g, "grid", {"cells", "extents"});
        if (!g.contains("cells")) throw ValidationError("configuration key 'grid.cells' is required");
        const auto cells = get_numbers(g["cells"], "grid.cells");
        if (cells.size() != static_cast<std::size_t>(p.dim))
            throw ValidationError("configuration key 'grid.cells' needs one entry per dimension");
        std::vector<double> ext(p.dim, 1.0);
        if (g.contains("extents")) ext = get_numbers(g["extents"], "grid.extents");
        if (ext.size() != static_cast<std::size_t>(p.dim))
            throw ValidationError("configuration key 'grid.extents' needs one entry per dimension");
        std::array<int, 3> n{1, 1, 1};
        std::array<double, 3> L{1.0, 1.0, 1.0};
        for (int a = 0; a < p.dim; ++a) {
            if (cells[a] != static_cast<int>(cells[a])) throw ValidationError("grid.cells must be integers");
            n[a] = static_cast<int>(cells[a]);
            L[a] = ext[a];
        }
        c.grid = Grid(p.dim, n, L);
    }

    if (j.contains("time")) {
        const auto& t = j["time"];
        check_keys(t, "time", {"horizon", "safety", "max_halvings", "dt"});
        c.time.horizon = get_number(t, "time", "horizon", c.time.horizon);
        c.time.safety = get_number(t, "time", "safety", c.time.safety);
        c.time.max_halvings = static_cast<int>(get_integer(t, "time", "max_halvings", c.time.max_halvings));
        if (t.contains("dt")) c.time.fixed_dt = get_number(t, "time", "dt", 0.0);
    }
    if (!(c.time.horizon >= 0.0)) throw ValidationError("time.horizon must be nonnegative");
    if (!(c.time.safety > 0.0 && c.time.safety <= 1.0)) throw ValidationError("time.safety must lie in (0, 1]");
    if (c.time.max_halvings < 0) throw ValidationError("time.max_halvings must be nonnegative");
    if (c.time.fixed_dt && !(*c.time.fixed_dt > 0.0)) throw ValidationError("time.dt must be positive");

    if (j.contains("solvers")) {
        const auto& s = j["solvers"];
        check_keys(s, "solvers", {"poisson_tolerance", "poisson_max_iterations", "spectral_preconditioner",
                                  "yosida_tolerance", "yosida_max_sweeps"});
        auto& v = c.solvers;
        v.poisson_tolerance = get_number(s, "solvers", "poisson_tolerance", v.poisson_tolerance);
        v.poisson_max_iterations = static_cast<int>(get_integer(s, "solvers", "poisson_max_iterations", v.poisson_max_iterations));
        v.spectral_preconditioner = get_bool(s, "solvers", "spectral_preconditioner", v.spectral_preconditioner);
        v.yosida_tolerance = get_number(s, "solvers", "yosida_tolerance", v.yosida_tolerance);
        v.yosida_max_sweeps = static_cast<int>(get_integer(s, "solvers", "yosida_max_sweeps", v.yosida_max_sweeps));
        if (!(v.poisson_tolerance > 0.0) || !(v.yosida_tolerance > 0.0) || v.poisson_max_iterations < 1 ||
            v.yosida_max_sweeps < 1)
            throw ValidationError("solver tolerances and iteration caps must be positive");
    }

    if (j.contains("diagnostics")) {
        check_keys(j["diagnostics"], "diagnostics", {"cadence"});
        c.cadence = static_cast<int>(get_integer(j["diagnostics"], "diagnostics", "cadence", 1));
        if (c.cadence < 1) throw ValidationError("diagnostics.cadence must be >= 1");
    }

    if (j.contains("output")) {
        const auto& o = j["output"];
        check_keys(o, "output", {"root", "name", "checkpoint"});
        c.output.root = get_string(o, "output", "root", c.output.root);
        c.output.name = get_string(o, "output", "name", c.output.name);
        c.output.checkpoint = get_bool(o, "output", "checkpoint", c.output.checkpoint);
        if (c.output.root.empty() || c.output.name.empty()) throw ValidationError("output.root and output.name must be nonempty");
    }

    if (j.contains("initial")) {
        const auto& i = j["initial"];
        check_keys(i, "initial", {"kind", "n_mean", "n_amplitude", "c_mean", "c_amplitude", "u_amplitude", "modes",
                                  "velocity", "barenblatt_time", "barenblatt_height"});
        auto& s = c.initial;
        s.kind = initial_kind_from_string(get_string(i, "initial", "kind", to_string(s.kind)));
        s.n_mean = get_number(i, "initial", "n_mean", s.n_mean);
        s.n_amplitude = get_number(i, "initial", "n_amplitude", s.n_amplitude);
        s.c_mean = get_number(i, "initial", "c_mean", s.c_mean);
        s.c_amplitude = get_number(i, "initial", "c_amplitude", s.c_amplitude);
        s.u_amplitude = get_number(i, "initial", "u_amplitude", s.u_amplitude);
        s.modes = static_cast<int>(get_integer(i, "initial", "modes", s.modes));
        s.velocity = velocity_init_from_string(get_string(i, "initial", "velocity", to_string(s.velocity)));
        s.barenblatt_time = get_number(i, "initial", "barenblatt_time", s.barenblatt_time);
        s.barenblatt_height = get_number(i, "initial", "barenblatt_height", s.barenblatt_height);
        if (s.modes < 1) throw ValidationError("initial.modes must be >= 1");
    }

    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
            throw ValidationError("configuration key 'seed' must be a nonnegative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    c.allow_subthreshold = get_bool(j, "", "allow_subthreshold", false);
    c.workers = static_cast<int>(get_integer(j, "", "workers", 0));
    if (c.workers < 0) throw ValidationError("configuration key 'workers' must be nonnegative");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open configuration '" + path + "'");
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::exception& e) {
        throw ValidationError("configuration '" + path + "' is not valid JSON: " + e.what());
    }
    apply_environment(doc);
    return parse_config(doc);
}

json to_json(const RunConfig& c) {
    const int d = c.params.dim;
    json cells = json::array(), ext = json::array(), gphi = json::array();
    for (int a = 0; a < d; ++a) {
        cells.push_back(c.grid.cells(a));
        ext.push_back(c.grid.extent(a));
        gphi.push_back(c.potential.grad_phi[a]);
    }
    json time{{"horizon", c.time.horizon}, {"safety", c.time.safety}, {"max_halvings", c.time.max_halvings}};
    if (c.time.fixed_dt) time["dt"] = *c.time.fixed_dt;
    const auto& i = c.initial;
    return {
        {"m", c.params.m},
        {"kappa", c.params.kappa},
        {"epsilon", c.params.epsilon},
        {"dim", d},
        {"c_d", c.params.c_d_lower},
        {"c_d_upper", c.params.c_d_upper},
        {"sensitivity",
         {{"family", family_name(c.sensitivity.family)},
          {"s0", c.sensitivity.s0_coeffs},
          {"theta", c.sensitivity.theta},
          {"axis", c.sensitivity.axis}}},
        {"grad_phi", gphi},
        {"grid", {{"cells", cells}, {"extents", ext}}},
        {"time", time},
        {"solvers",
         {{"poisson_tolerance", c.solvers.poisson_tolerance},
          {"poisson_max_iterations", c.solvers.poisson_max_iterations},
          {"spectral_preconditioner", c.solvers.spectral_preconditioner},
          {"yosida_tolerance", c.solvers.yosida_tolerance},
          {"yosida_max_sweeps", c.solvers.yosida_max_sweeps}}},
        {"diagnostics", {{"cadence", c.cadence}}},
        {"output", {{"root", c.output.root}, {"name", c.output.name}, {"checkpoint", c.output.checkpoint}}},
        {"initial",
         {{"kind", to_string(i.kind)},
          {"n_mean", i.n_mean},
          {"n_amplitude", i.n_amplitude},
          {"c_mean", i.c_mean},
          {"c_amplitude", i.c_amplitude},
          {"u_amplitude", i.u_amplitude},
          {"modes", i.modes},
          {"velocity", to_string(i.velocity)},
          {"barenblatt_time", i.barenblatt_time},
          {"barenblatt_height", i.barenblatt_height}}},
        {"seed", c.seed},
        {"allow_subthreshold", c.allow_subthreshold},
        {"workers", c.workers},
    };
}

void set_config_value(json& doc, const std::string& dotted_key, const json& value) {
    if (dotted_key.empty()) throw ValidationError("empty configuration key");
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = dotted_key.find('.', start);
        const std::string part = dotted_key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ValidationError("malformed configuration key '" + dotted_key + "'");
        if (!node->is_object()) *node = json::object();
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

void apply_environment(json& doc) {
    if (const char* root = std::getenv(kOutputRootEnv); root && *root) set_config_value(doc, "output.root", root);
}

} // namespace cns
