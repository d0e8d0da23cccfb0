#pragma once

// Checkpoint files.
//
//   line 1   TWOFLUID-CHECKPOINT
//   line 2   single-line JSON header (format_version, dim, n, length, time,
//            epsilon, parameters, fields, samples_per_field)
//   payload  little-endian float64 arrays R, Q, u1 .. u_dim, back to back

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <sstream>
#include <string>

#include "twofluid/field.hpp"

namespace twofluid {

inline constexpr int kCheckpointVersion = 1;
inline constexpr const char* kCheckpointMagic = "TWOFLUID-CHECKPOINT";

struct Checkpoint {
  GridPtr grid;
  double time = 0.0;
  double epsilon = 1.0;
  /// Free-form run metadata: physical parameters, dt, step index, accumulators.
  nlohmann::json parameters = nlohmann::json::object();
  ScalarField R;
  ScalarField Q;
  VectorField u;
};

namespace detail {

inline void append_le(std::string& out, std::span<const double> values) {
  const std::size_t start = out.size();
  out.resize(start + values.size() * sizeof(double));
  char* dst = out.data() + start;
  for (double v : values) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    std::memcpy(dst, &bits, sizeof bits);
    dst += sizeof bits;
  }
}

inline void read_le(const char* src, std::span<double> values) {
  for (double& v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, src, sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    v = std::bit_cast<double>(bits);
    src += sizeof bits;
  }
}

}  // namespace detail

inline std::string serialize_checkpoint(const Checkpoint& c) {
  const auto& g = *c.grid;
  nlohmann::json header;
  header["format_version"] = kCheckpointVersion;
  header["dim"] = g.dim();
  header["n"] = g.n();
  header["length"] = g.length();
  header["time"] = c.time;
  header["epsilon"] = c.epsilon;
  header["parameters"] = c.parameters;
  nlohmann::json names = nlohmann::json::array({"R", "Q"});
  for (int d = 0; d < g.dim(); ++d) names.push_back("u" + std::to_string(d + 1));
  header["fields"] = names;
  header["samples_per_field"] = g.size();

  std::string out = std::string(kCheckpointMagic) + "\n" + header.dump() + "\n";
  detail::append_le(out, c.R.values());
  detail::append_le(out, c.Q.values());
  for (const auto& comp : c.u) detail::append_le(out, comp.values());
  return out;
}

inline Checkpoint deserialize_checkpoint(const std::string& bytes) {
  const std::size_t first = bytes.find('\n');
  if (first == std::string::npos || bytes.compare(0, first, kCheckpointMagic) != 0) {
    throw CorruptCheckpoint("missing checkpoint magic line");
  }
  const std::size_t second = bytes.find('\n', first + 1);
  if (second == std::string::npos) throw CorruptCheckpoint("truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(first + 1, second - first - 1));
  } catch (const nlohmann::json::exception& e) {
    throw CorruptCheckpoint(std::string("unreadable header: ") + e.what());
  }
  if (!header.contains("format_version") ||
      header["format_version"].get<int>() != kCheckpointVersion) {
    throw FormatVersionMismatch("checkpoint format version " +
                                header.value("format_version", nlohmann::json()).dump() +
                                ", expected " + std::to_string(kCheckpointVersion));
  }

  Checkpoint c;
  try {
    c.grid = make_grid(header.at("dim").get<int>(), header.at("n").get<int>(),
                       header.at("length").get<double>());
    c.time = header.at("time").get<double>();
    c.epsilon = header.at("epsilon").get<double>();
    c.parameters = header.at("parameters");
  } catch (const nlohmann::json::exception& e) {
    throw CorruptCheckpoint(std::string("incomplete header: ") + e.what());
  }
  const auto& g = *c.grid;
  const auto& names = header.at("fields");
  if (!names.is_array() || static_cast<int>(names.size()) != 2 + g.dim() ||
      names[0] != "R" || names[1] != "Q") {
    throw CorruptCheckpoint("unexpected field order");
  }
  for (int d = 0; d < g.dim(); ++d) {
    if (names[2 + d] != "u" + std::to_string(d + 1)) {
      throw CorruptCheckpoint("unexpected field order");
    }
  }
  if (header.at("samples_per_field").get<std::size_t>() != g.size()) {
    throw CorruptCheckpoint("sample count does not match grid");
  }

  const std::size_t payload = (2 + g.dim()) * g.size() * sizeof(double);
  if (bytes.size() - (second + 1) != payload) {
    throw CorruptCheckpoint("payload is " + std::to_string(bytes.size() - second - 1) +
                            " bytes, expected " + std::to_string(payload));
  }

  const char* src = bytes.data() + second + 1;
  auto read_field = [&](ScalarField& f) {
    f = ScalarField(c.grid);
    detail::read_le(src, f.values());
    src += g.size() * sizeof(double);
  };
  read_field(c.R);
  read_field(c.Q);
  c.u = VectorField(c.grid);
  for (auto& comp : c.u) read_field(comp);
  return c;
}

inline void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const std::string bytes = serialize_checkpoint(c);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

inline Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace twofluid
