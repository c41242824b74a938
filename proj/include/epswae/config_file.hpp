#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "epswae/errors.hpp"

namespace epswae {

/// Flat `section.key = value` configuration, kept ordered so it can be echoed
/// back into run manifests key-for-key.
using ConfigMap = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
inline ConfigMap parse_config_text(const std::string& text,
                                   const std::string& origin = "<string>") {
  ConfigMap out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? nl : nl - pos);
    pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value' in " + origin, line_no);
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key in " + origin, line_no);
    out[key] = value;
  }
  return out;
}

inline ConfigMap parse_config_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open config: " + path.string());
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_config_text(text, path.string());
}

// Typed getters; every getter falls back to the given default when the key is
// absent and throws ParseError on malformed values.

inline std::string config_get(const ConfigMap& c, const std::string& key,
                              const std::string& fallback) {
  const auto it = c.find(key);
  return it == c.end() ? fallback : it->second;
}

inline double config_get(const ConfigMap& c, const std::string& key, double fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError("key '" + key + "': expected a number, got '" + it->second + "'");
  }
}

inline std::uint64_t config_get(const ConfigMap& c, const std::string& key,
                                std::uint64_t fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError("key '" + key + "': expected an integer, got '" + it->second + "'");
  }
}

inline std::size_t config_get_size(const ConfigMap& c, const std::string& key,
                                   std::size_t fallback) {
  return static_cast<std::size_t>(
      config_get(c, key, static_cast<std::uint64_t>(fallback)));
}

inline bool config_get(const ConfigMap& c, const std::string& key, bool fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  throw ParseError("key '" + key + "': expected a boolean, got '" + it->second + "'");
}

}  // namespace epswae
