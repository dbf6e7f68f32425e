#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace opgrowth::cli {

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Shortest decimal that round-trips is not enough for downstream diffing; always 17 digits.
std::string format_real(double x);

/// Collects the artifacts of one run and writes manifest.json last.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);

  const std::filesystem::path& path() const { return dir_; }

  /// Writes a CSV whose numeric cells use 17 significant digits.
  void write_csv(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows);
  void write_json(const std::string& name, const nlohmann::json& j);

  void warn(std::string message) { warnings_.push_back(std::move(message)); }
  void warn_all(const std::vector<std::string>& messages, const std::string& prefix = {});
  void note(const std::string& key, nlohmann::json value) { extra_[key] = std::move(value); }

  /// manifest.json: config echo, per-file checksums, tool version, wall time, warnings.
  void finish(const std::string& command, const nlohmann::json& config);

 private:
  void record(const std::string& name);

  std::filesystem::path dir_;
  std::vector<std::string> files_;
  std::vector<std::string> warnings_;
  nlohmann::json extra_ = nlohmann::json::object();
  std::chrono::steady_clock::time_point start_;
};

}  // namespace opgrowth::cli
