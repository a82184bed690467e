#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpp/config.hpp"

namespace dpp {

inline constexpr const char* kVersion = "dpplab 1.0.0";

/// One verified statement. `margin` is the signed slack of the measured
/// quantity against its bound (positive is good) and the check passes iff
/// margin >= -tolerance.
struct CheckRecord {
  std::string name;
  nlohmann::json parameters = nlohmann::json::object();
  double value = 0.0;
  double margin = 0.0;
  double tolerance = 0.0;
  std::optional<std::uint64_t> seed;
  /// What is being checked, in words.
  std::string reference;

  bool pass() const { return margin >= -tolerance; }
};

class Report {
 public:
  explicit Report(const RunConfig& config);

  void add_check(CheckRecord check);
  /// Free-form measured results under `measurements.<key>`.
  void measure(const std::string& key, nlohmann::json value);
  void add_artifact(const std::string& name);
  void set_timing(double wall_seconds, unsigned threads);

  bool pass() const;
  const std::vector<CheckRecord>& checks() const { return checks_; }

  /// The timing block is the only part that may differ between reruns.
  nlohmann::json to_json(bool with_timing = true) const;

 private:
  nlohmann::json config_;
  std::string command_;
  nlohmann::json domain_;
  std::vector<CheckRecord> checks_;
  nlohmann::json measurements_ = nlohmann::json::object();
  std::vector<std::string> artifacts_;
  double wall_seconds_ = 0.0;
  unsigned threads_ = 1;
};

void write_report(const std::filesystem::path& path, const Report& report);

}  // namespace dpp
