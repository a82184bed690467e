#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dpp/boundary.hpp"
#include "dpp/operators.hpp"
#include "dpp/params.hpp"

namespace dpp {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class Command { Solve, Simulate, VerifyExpansion, VerifyRegularity, VerifyBarrier, VerifyAux };

std::string command_name(Command c);

enum class Provenance { Default, User };

using ConfigValue = std::variant<double, std::int64_t, std::uint64_t, std::string, std::vector<double>>;

struct ConfigEntry {
  ConfigValue value;
  Provenance provenance = Provenance::Default;
  bool operator==(const ConfigEntry&) const = default;
};

/// A fully resolved run configuration. Keys are dotted (`params.alpha`);
/// every known key that has a value carries its provenance.
class RunConfig {
 public:
  Command command() const { return command_; }
  const std::map<std::string, ConfigEntry>& entries() const { return entries_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::uint64_t seed() const;
  const std::string& text(const std::string& key) const;
  const std::vector<double>& list(const std::string& key) const;
  Vec vec(const std::string& key) const;
  Provenance provenance(const std::string& key) const;

  void set_seed(std::uint64_t seed);
  void set_output(const std::string& dir);

  int dim() const { return static_cast<int>(integer("params.dim")); }
  Box box() const;
  DppParams params() const;
  /// The same problem with a different epsilon; h follows the coupling if one is set.
  DppParams params_with_epsilon(double eps) const;
  SpatialGrid grid() const;
  SpatialGrid grid_for(const DppParams& p) const;
  BoundaryData boundary() const;
  DppStencil stencil() const;
  DppStencil stencil_for(const DppParams& p) const;

  nlohmann::json to_json() const;

  bool operator==(const RunConfig&) const = default;

 private:
  friend RunConfig parse_config(std::string_view text);
  Command command_ = Command::Solve;
  std::map<std::string, ConfigEntry> entries_;
  std::vector<std::string> warnings_;
};

/// Line-oriented `key = value` text with `[section]` headers; `#` starts a
/// comment. A key inside section `s` is the dotted key `s.key`, and dotted
/// keys may also be written directly. Lists are comma separated.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Text that parses back to an equal config: user-set keys only.
std::string render(const RunConfig& config);

/// Every key the parser accepts, in rendering order.
std::vector<std::string> known_config_keys();

}  // namespace dpp
