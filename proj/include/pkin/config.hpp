#ifndef PKIN_CONFIG_HPP
#define PKIN_CONFIG_HPP

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>

#include "pkin/errors.hpp"

namespace pkin {

enum class OutputFormat { Table, Machine };

struct RunConfig {
  static constexpr std::uint64_t kMemoryCeiling = std::uint64_t{1} << 32;

  std::uint64_t bound = 1000000;
  std::uint64_t segment_size = std::uint64_t{1} << 24;
  std::optional<unsigned> imax;  // unset: default budget for the subject
  unsigned rounds = 64;
  unsigned threads = 1;
  std::optional<std::filesystem::path> cache_dir;
  OutputFormat format = OutputFormat::Table;

  void validate() const {
    if (bound == 0) throw domain_error("config: bound must be positive");
    if (segment_size == 0) throw domain_error("config: segment_size must be positive");
    if (segment_size > kMemoryCeiling) {
      throw domain_error("config: segment_size exceeds the memory ceiling " + std::to_string(kMemoryCeiling));
    }
    if (imax && *imax == 0) throw domain_error("config: imax must be positive");
    if (rounds == 0) throw domain_error("config: rounds must be positive");
    if (threads == 0) throw domain_error("config: threads must be positive");
  }
};

inline OutputFormat parse_format(std::string_view s) {
  if (s == "table") return OutputFormat::Table;
  if (s == "machine") return OutputFormat::Machine;
  throw domain_error("unknown output format '" + std::string(s) + "' (expected table or machine)");
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw domain_error("config: " + std::string(key) + " expects a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

}  // namespace detail

// Applies one key=value setting.
inline void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  using detail::parse_number;
  if (key == "bound") {
    cfg.bound = parse_number<std::uint64_t>(key, value);
  } else if (key == "segment_size") {
    cfg.segment_size = parse_number<std::uint64_t>(key, value);
  } else if (key == "imax") {
    cfg.imax = parse_number<unsigned>(key, value);
  } else if (key == "rounds") {
    cfg.rounds = parse_number<unsigned>(key, value);
  } else if (key == "threads") {
    cfg.threads = parse_number<unsigned>(key, value);
  } else if (key == "cache_dir") {
    cfg.cache_dir = std::filesystem::path(std::string(value));
  } else if (key == "format") {
    cfg.format = parse_format(value);
  } else {
    throw domain_error("config: unknown key '" + std::string(key) + "'");
  }
}

// Line-oriented key=value; '#' starts a comment.
inline RunConfig load_config(const std::filesystem::path& path, RunConfig cfg = {}) {
  std::ifstream in(path);
  if (!in) throw domain_error("config: cannot read " + path.string());
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    std::string_view s = line;
    if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw domain_error("config: " + path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    apply_setting(cfg, detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)));
  }
  return cfg;
}

}  // namespace pkin

#endif  // PKIN_CONFIG_HPP
