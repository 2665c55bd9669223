#pragma once

#include "cns/timestepper.hpp"

#include <iosfwd>
#include <string>

#include "json.hpp"

namespace cns {

inline constexpr int kCheckpointVersion = 1;

/// Layout: 8-byte magic "CNSCKPT1", uint64 little-endian header length, JSON
/// header {format, version, time, step, grid, fields[{name, shape, bc}], meta},
/// then one block of little-endian float64 per field in header order
/// (n, c, p, u.x, u.y[, u.z]).
void write_checkpoint(std::ostream& os, const State& s, const nlohmann::json& meta = nlohmann::json::object());

/// Throws FormatError naming the offending field on a bad magic, unknown
/// version, shape mismatch, truncated block or trailing bytes.
State read_checkpoint(std::istream& is, nlohmann::json* meta = nullptr);

/// File wrappers; IoError when the file cannot be opened or written.
void save_checkpoint(const std::string& path, const State& s, const nlohmann::json& meta = nlohmann::json::object());
State load_checkpoint(const std::string& path, nlohmann::json* meta = nullptr);

/// Header only, with an added "payload_bytes" entry.
nlohmann::json inspect_checkpoint(const std::string& path);

} // namespace cns
