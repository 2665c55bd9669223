#include "cns/checkpoint.hpp"

#include "cns/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

namespace cns {

namespace {

constexpr char kMagic[8] = {'C', 'N', 'S', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint64_t kMaxHeader = 1u << 20;

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

bool get_u64(std::istream& is, std::uint64_t& v) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return true;
}

void put_block(std::ostream& os, std::span<const double> data) {
    std::vector<unsigned char> buf(data.size() * 8);
    for (std::size_t k = 0; k < data.size(); ++k) {
        const auto bits = std::bit_cast<std::uint64_t>(data[k]);
        for (int i = 0; i < 8; ++i) buf[8 * k + i] = static_cast<unsigned char>(bits >> (8 * i));
    }
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

std::vector<double> get_block(std::istream& is, std::size_t count, const std::string& name) {
    std::vector<unsigned char> buf(count * 8);
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(is.gcount()) != buf.size())
        throw FormatError("checkpoint payload truncated in field '" + name + "'", name);
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[8 * k + i]) << (8 * i);
        out[k] = std::bit_cast<double>(bits);
    }
    return out;
}

const char* kComponentNames[3] = {"u.x", "u.y", "u.z"};

struct FieldDesc {
    std::string name;
    std::array<int, 3> shape;
    std::string bc;
};

std::vector<FieldDesc> expected_fields(const Grid& g) {
    std::vector<FieldDesc> f{{"n", g.cells(), "neumann"}, {"c", g.cells(), "neumann"}, {"p", g.cells(), "neumann"}};
    for (int a = 0; a < g.dim(); ++a) f.push_back({kComponentNames[a], g.face_shape(a), "dirichlet"});
    return f;
}

nlohmann::json grid_json(const Grid& g) {
    return {{"dim", g.dim()}, {"cells", g.cells()}, {"extents", g.extents()}};
}

nlohmann::json read_header(std::istream& is) {
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw FormatError("not a checkpoint file (bad magic)", "magic");
    std::uint64_t len = 0;
    if (!get_u64(is, len)) throw FormatError("checkpoint truncated in header length", "header");
    if (len == 0 || len > kMaxHeader) throw FormatError("implausible checkpoint header length", "header");
    std::string text(len, '\0');
    if (!is.read(text.data(), static_cast<std::streamsize>(len))) throw FormatError("checkpoint header truncated", "header");
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("corrupt checkpoint header: ") + e.what(), "header");
    }
    if (!h.is_object() || !h.contains("version") || !h["version"].is_number_integer())
        throw FormatError("checkpoint header lacks an integer version", "version");
    const int version = h["version"].get<int>();
    if (version != kCheckpointVersion)
        throw FormatError("unsupported checkpoint version " + std::to_string(version), "version");
    return h;
}

template <class T>
T header_get(const nlohmann::json& h, const char* key) {
    try {
        return h.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw FormatError(std::string("checkpoint header entry '") + key + "' missing or malformed", key);
    }
}

} // namespace

void write_checkpoint(std::ostream& os, const State& s, const nlohmann::json& meta) {
    const Grid& g = s.grid();
    nlohmann::json fields = nlohmann::json::array();
    for (const auto& f : expected_fields(g)) fields.push_back({{"name", f.name}, {"shape", f.shape}, {"bc", f.bc}});
    const nlohmann::json header{{"format", "cns-checkpoint"}, {"version", kCheckpointVersion}, {"time", s.t},
                                {"step", s.step},             {"grid", grid_json(g)},           {"fields", fields},
                                {"meta", meta}};
    const std::string text = header.dump();
    os.write(kMagic, 8);
    put_u64(os, text.size());
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    put_block(os, s.n.values());
    put_block(os, s.c.values());
    put_block(os, s.stokes.pressure.values());
    for (int a = 0; a < g.dim(); ++a) put_block(os, s.stokes.u.component(a));
}

State read_checkpoint(std::istream& is, nlohmann::json* meta) {
    const nlohmann::json h = read_header(is);
    const nlohmann::json gj = header_get<nlohmann::json>(h, "grid");
    Grid g;
    try {
        g = Grid(gj.at("dim").get<int>(), gj.at("cells").get<std::array<int, 3>>(),
                 gj.at("extents").get<std::array<double, 3>>());
    } catch (const nlohmann::json::exception&) {
        throw FormatError("checkpoint grid entry malformed", "grid");
    } catch (const Error& e) {
        throw FormatError(std::string("checkpoint grid invalid: ") + e.what(), "grid");
    }
    const auto fields = header_get<nlohmann::json>(h, "fields");
    const auto expected = expected_fields(g);
    if (!fields.is_array() || fields.size() != expected.size())
        throw FormatError("checkpoint field list does not match the grid dimension", "fields");
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const auto& f = fields[i];
        const std::string name = f.value("name", std::string{});
        if (name != expected[i].name)
            throw FormatError("unexpected checkpoint field '" + name + "', wanted '" + expected[i].name + "'", name);
        std::array<int, 3> shape{};
        try {
            shape = f.at("shape").get<std::array<int, 3>>();
        } catch (const nlohmann::json::exception&) {
            throw FormatError("malformed shape for field '" + name + "'", name);
        }
        if (shape != expected[i].shape) throw FormatError("shape mismatch for field '" + name + "'", name);
        if (f.value("bc", std::string{}) != expected[i].bc)
            throw FormatError("boundary condition mismatch for field '" + name + "'", name);
    }

    State s = State::zeros(g);
    s.t = header_get<double>(h, "time");
    s.step = header_get<long>(h, "step");
    s.n = ScalarField(g, get_block(is, g.num_cells(), "n"));
    s.c = ScalarField(g, get_block(is, g.num_cells(), "c"));
    s.stokes.pressure = ScalarField(g, get_block(is, g.num_cells(), "p"));
    for (int a = 0; a < g.dim(); ++a) {
        const auto data = get_block(is, g.num_faces(a), kComponentNames[a]);
        s.stokes.u.update(a, [&](std::span<double> c) { std::copy(data.begin(), data.end(), c.begin()); });
    }
    if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after checkpoint payload", "payload");
    if (meta) *meta = h.value("meta", nlohmann::json::object());
    return s;
}

void save_checkpoint(const std::string& path, const State& s, const nlohmann::json& meta) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write_checkpoint(os, s, meta);
    os.flush();
    if (!os) throw IoError("failed writing '" + path + "'");
}

State load_checkpoint(const std::string& path, nlohmann::json* meta) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "'");
    return read_checkpoint(is, meta);
}

nlohmann::json inspect_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is) throw IoError("cannot open '" + path + "'");
    const auto total = static_cast<std::uint64_t>(is.tellg());
    is.seekg(0);
    nlohmann::json h = read_header(is);
    h["payload_bytes"] = total - static_cast<std::uint64_t>(is.tellg());
    return h;
}

} // namespace cns
