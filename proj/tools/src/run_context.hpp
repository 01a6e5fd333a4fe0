#pragma once

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace homog::cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 1, kSolverError = 2, kPropertyFailure = 3 };

/// Flags shared by every subcommand.
struct GlobalOptions {
  std::string config;
  std::string out;
  int threads = 0;
  double tol = 1e-8;
  bool strict = false;
  unsigned long long seed = 0;
};

/// Output directory, written files and the manifest of one run.
class RunContext {
 public:
  RunContext(std::string command, const GlobalOptions& global);

  const std::filesystem::path& out_dir() const { return out_dir_; }
  std::filesystem::path output(const std::string& name);
  /// Hashes an input file and records it.
  void add_input(const std::filesystem::path& path);
  void set_config(nlohmann::json config) { config_ = std::move(config); }
  nlohmann::json& results() { return results_; }

  /// Writes manifest.json; lists every file recorded through output().
  void finish(int exit_code, const std::string& error = {});

 private:
  std::string command_;
  GlobalOptions global_;
  std::filesystem::path out_dir_;
  std::string out_source_;
  std::string started_;
  nlohmann::json config_;
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json results_ = nlohmann::json::object();
  std::vector<std::string> outputs_;
};

std::string utc_timestamp();
/// Hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace homog::cli
