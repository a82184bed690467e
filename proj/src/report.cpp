#include "dpp/report.hpp"

#include <fstream>

#include "dpp/field_io.hpp"

namespace dpp {

Report::Report(const RunConfig& config) : config_(config.to_json()), command_(command_name(config.command())) {
  const Box box = config.box();
  domain_["description"] = box.describe();
  domain_["center"] = std::vector<double>(box.center().data(), box.center().data() + box.dim());
  domain_["half_width"] = box.half_width();
  domain_["time_lattice"] = {
      {"anchor", 0.0},
      {"step", "eps^2/2"},
      {"initial_slice", "F(x, 0) represents the initial strip (-eps^2/2, 0]"},
  };
}

void Report::add_check(CheckRecord check) { checks_.push_back(std::move(check)); }

void Report::measure(const std::string& key, nlohmann::json value) { measurements_[key] = std::move(value); }

void Report::add_artifact(const std::string& name) { artifacts_.push_back(name); }

void Report::set_timing(double wall_seconds, unsigned threads) {
  wall_seconds_ = wall_seconds;
  threads_ = threads;
}

bool Report::pass() const {
  for (const CheckRecord& c : checks_) {
    if (!c.pass()) return false;
  }
  return true;
}

nlohmann::json Report::to_json(bool with_timing) const {
  nlohmann::json j;
  j["version"] = kVersion;
  j["command"] = command_;
  j["config"] = config_;
  j["domain"] = domain_;
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckRecord& c : checks_) {
    checks.push_back({
        {"name", c.name},
        {"parameters", c.parameters},
        {"value", c.value},
        {"margin", c.margin},
        {"tolerance", c.tolerance},
        {"pass", c.pass()},
        {"seed", c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr)},
        {"reference", c.reference},
    });
  }
  j["checks"] = checks;
  j["measurements"] = measurements_;
  j["artifacts"] = artifacts_;
  j["pass"] = pass();
  if (with_timing) j["timing"] = {{"wall_seconds", wall_seconds_}, {"threads", threads_}};
  return j;
}

void write_report(const std::filesystem::path& path, const Report& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report " + path.string());
  out << report.to_json().dump(2) << '\n';
}

}  // namespace dpp
