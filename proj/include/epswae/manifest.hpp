#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "epswae/errors.hpp"
#include "epswae/version.hpp"

namespace epswae {

/// FNV-1a over a file's bytes; used to pin input datasets in run manifests.
inline std::string fnv1a_file_hex(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot hash missing file: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (f) {
    f.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < f.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

/// Record of one CLI run: command, fully resolved configuration, seed, and
/// the produced files. Written last; a run is reproducible from its manifest.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::vector<std::string> outputs;
  std::map<std::string, std::string> input_hashes;
  double wall_seconds = 0.0;
};

inline void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
  // Every listed output must exist before the manifest is written.
  for (const std::string& out : m.outputs)
    if (!std::filesystem::exists(out))
      throw IoError("manifest lists missing output: " + out);
  nlohmann::json j;
  j["command"] = m.command;
  j["config"] = m.config;
  j["seed"] = m.seed;
  j["version"] = m.version;
  j["outputs"] = m.outputs;
  j["input_hashes"] = m.input_hashes;
  j["wall_seconds"] = m.wall_seconds;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << j.dump(2) << '\n';
  if (!f) throw IoError("write failed: " + path.string());
}

}  // namespace epswae
