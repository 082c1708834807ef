#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hanzi/trainer.hpp"

namespace hanzi {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Flat `key = value` record of a run, in insertion order. Training keys use
/// the `train.<flag>` form so the file can be fed back to the CLI as a
/// config file.
class RunManifest {
 public:
  /// Replaces an existing key in place, otherwise appends.
  void set(std::string key, std::string value);
  std::optional<std::string> get(std::string_view key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
    return entries_;
  }

  std::string to_string() const;
  void write(const std::filesystem::path& path) const;

  static RunManifest parse(std::istream& in, const std::string& source);
  static RunManifest load(const std::filesystem::path& path);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Every field of `cfg`, defaults included, under `train.` keys.
RunManifest train_manifest(const TrainConfig& cfg);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace hanzi
