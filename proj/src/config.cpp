#include "dpp/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "dpp/directions.hpp"
#include "dpp/expression.hpp"
#include "dpp/field_io.hpp"
#include "dpp/quadrature.hpp"

namespace dpp {

namespace {

enum class Type { Real, Integer, Seed, Text, List };

using Entries = std::map<std::string, ConfigEntry>;
using DefaultFn = std::function<std::optional<ConfigValue>(const Entries&)>;

struct KeySpec {
  std::string name;
  Type type;
  DefaultFn fallback;
};

DefaultFn none() {
  return [](const Entries&) { return std::optional<ConfigValue>(); };
}
DefaultFn real(double v) {
  return [v](const Entries&) { return std::optional<ConfigValue>(v); };
}
DefaultFn integer(std::int64_t v) {
  return [v](const Entries&) { return std::optional<ConfigValue>(v); };
}
DefaultFn text(std::string v) {
  return [v](const Entries&) { return std::optional<ConfigValue>(v); };
}
DefaultFn list(std::vector<double> v) {
  return [v](const Entries&) { return std::optional<ConfigValue>(v); };
}

int dim_of(const Entries& e) { return static_cast<int>(std::get<std::int64_t>(e.at("params.dim").value)); }

// A point of the given per-dimension pattern, shifted by the box center.
DefaultFn point_near_center(std::vector<double> offset) {
  return [offset](const Entries& e) {
    const int n = dim_of(e);
    const auto& c = std::get<std::vector<double>>(e.at("box.center").value);
    std::vector<double> p(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) p[a] = c[a] + (a < static_cast<int>(offset.size()) ? offset[a] : 0.0);
    return std::optional<ConfigValue>(p);
  };
}

const std::vector<KeySpec>& registry() {
  static const std::vector<KeySpec> keys = {
      {"command", Type::Text, none()},
      {"seed", Type::Seed, [](const Entries&) { return std::optional<ConfigValue>(std::uint64_t{1}); }},
      {"out", Type::Text, text("out")},
      {"params.dim", Type::Integer, integer(2)},
      {"params.alpha", Type::Real, real(0.5)},
      {"params.epsilon", Type::Real, real(0.1)},
      {"params.T", Type::Real, real(0.05)},
      {"box.center", Type::List,
       [](const Entries& e) { return std::optional<ConfigValue>(std::vector<double>(dim_of(e), 0.0)); }},
      {"box.half_width", Type::Real, real(1.0)},
      {"grid.h", Type::Real, none()},
      {"grid.h_coupling", Type::Real,
       [](const Entries& e) {
         return e.count("grid.h") ? std::optional<ConfigValue>() : std::optional<ConfigValue>(0.5);
       }},
      {"stencil.K", Type::Integer, integer(64)},
      {"stencil.m", Type::Integer, integer(2)},
      {"F.expr", Type::Text, none()},
      {"F.kind", Type::Text,
       [](const Entries& e) { return std::optional<ConfigValue>(std::string(e.count("F.expr") ? "expression" : "exp_heat")); }},
      {"F.c", Type::Real, real(0.0)},
      {"F.a", Type::List, [](const Entries& e) {
         std::vector<double> a(dim_of(e), 0.0);
         a[0] = 1.0;
         return std::optional<ConfigValue>(a);
       }},
      {"F.k", Type::Real, real(1.0)},
      {"game.start", Type::List, point_near_center({0.2, 0.1})},
      {"game.start_time", Type::Real, none()},
      {"game.trials", Type::Integer, integer(10000)},
      {"game.player1", Type::Text, text("greedy_max")},
      {"game.player2", Type::Text, text("greedy_min")},
      {"game.nu1", Type::List, none()},
      {"game.nu2", Type::List, none()},
      {"game.target1", Type::List, none()},
      {"game.target2", Type::List, none()},
      {"expansion.quadratics", Type::Integer, integer(20)},
      {"expansion.min_gradient", Type::Real, real(0.5)},
      {"expansion.directions", Type::List, list({16, 32, 64, 128})},
      {"expansion.epsilons", Type::List, list({0.1, 0.05, 0.025})},
      {"expansion.x", Type::List, point_near_center({0.3, 0.2, 0.1})},
      {"expansion.t", Type::Real, real(0.5)},
      {"regularity.epsilons", Type::List, list({0.1, 0.05})},
      {"regularity.radius", Type::Real, real(0.15)},
      {"regularity.delta", Type::Real, real(1.0)},
      {"regularity.samples", Type::Integer, integer(2000)},
      {"regularity.osc_radius", Type::Real, real(0.4)},
      {"barrier.A", Type::List, list({0.5, 1.0, 2.0})},
      {"barrier.r", Type::List, list({0.25, 0.5})},
      {"barrier.epsilons", Type::List, list({0.1, 0.05})},
      {"barrier.c", Type::Real, real(0.0)},
      {"barrier.side", Type::Text, text("both")},
      {"barrier.h", Type::Real, real(0.05)},
      {"aux.C", Type::Real, real(2.0)},
      {"aux.M", Type::Real, real(2.0)},
      {"aux.N", Type::Integer, integer(5)},
      {"aux.r", Type::Real, real(0.25)},
      {"aux.delta", Type::Real, real(0.5)},
      {"aux.gammas", Type::List, list({1.25, 1.5, 1.75})},
      {"aux.omega0s", Type::List, list({1.0, 10.0})},
      {"aux.samples", Type::Integer, integer(1000)},
      {"aux.pairs", Type::Integer, integer(1000)},
  };
  return keys;
}

const KeySpec* find_key(const std::string& name) {
  for (const KeySpec& k : registry()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Strips a trailing comment, leaving `#` inside quotes alone.
std::string strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && quoted) {
      ++i;
    } else if (line[i] == '"') {
      quoted = !quoted;
    } else if (line[i] == '#' && !quoted) {
      return std::string(line.substr(0, i));
    }
  }
  return std::string(line);
}

std::optional<double> to_real(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string unquote(const std::string& raw, int line) {
  if (raw.size() < 2 || raw.front() != '"') return raw;
  if (raw.back() != '"') throw ConfigError("unterminated string", line);
  std::string out;
  for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
    if (raw[i] == '\\' && i + 2 < raw.size()) {
      out += raw[++i];
    } else if (raw[i] == '"') {
      throw ConfigError("unexpected quote inside string", line);
    } else {
      out += raw[i];
    }
  }
  return out;
}

ConfigValue convert(const KeySpec& spec, const std::string& raw, int line) {
  auto mismatch = [&](const char* what) {
    return ConfigError(spec.name + ": expected " + what + ", got '" + raw + "'", line);
  };
  switch (spec.type) {
    case Type::Real: {
      const auto v = to_real(raw);
      if (!v) throw mismatch("a real number");
      return *v;
    }
    case Type::Integer: {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
      if (ec != std::errc() || p != raw.data() + raw.size()) throw mismatch("an integer");
      return v;
    }
    case Type::Seed: {
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
      if (ec != std::errc() || p != raw.data() + raw.size()) throw mismatch("an unsigned 64-bit integer");
      return v;
    }
    case Type::Text: return unquote(raw, line);
    case Type::List: {
      std::string body = raw;
      if (body.size() >= 2 && ((body.front() == '(' && body.back() == ')') || (body.front() == '[' && body.back() == ']'))) {
        body = body.substr(1, body.size() - 2);
      }
      std::vector<double> out;
      std::stringstream ss(body);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto v = to_real(trim(item));
        if (!v) throw mismatch("a comma-separated list of numbers");
        out.push_back(*v);
      }
      if (out.empty()) throw mismatch("a non-empty list");
      return out;
    }
  }
  throw mismatch("a value");
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string render_value(const ConfigValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(x);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return quote(x);
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          std::string s;
          for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + format_double(x[i]);
          return s;
        } else {
          return std::to_string(x);
        }
      },
      v);
}

const std::vector<std::pair<Command, std::string>>& command_names() {
  static const std::vector<std::pair<Command, std::string>> names = {
      {Command::Solve, "solve"},
      {Command::Simulate, "simulate"},
      {Command::VerifyExpansion, "verify-expansion"},
      {Command::VerifyRegularity, "verify-regularity"},
      {Command::VerifyBarrier, "verify-barrier"},
      {Command::VerifyAux, "verify-aux"},
  };
  return names;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

bool is_unit(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::abs(std::sqrt(s) - 1.0) <= 1e-10;
}

void validate(const RunConfig& c, std::vector<std::string>& warnings) {
  const int n = c.dim();
  require(n == 2 || n == 3, "params.dim must be 2 or 3");
  const double alpha = c.real("params.alpha");
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  const double eps = c.real("params.epsilon");
  const double hw = c.real("box.half_width");
  require(c.real("params.T") > 0.0, "params.T must be positive");
  require(hw > 0.0, "box.half_width must be positive");
  require(eps > 0.0 && eps < hw, "params.epsilon must lie in (0, box.half_width)");
  require(static_cast<int>(c.list("box.center").size()) == n, "box.center must have params.dim entries");

  if (c.provenance("grid.h") == Provenance::User && c.has("grid.h_coupling") &&
      c.provenance("grid.h_coupling") == Provenance::User) {
    throw ConfigError("set either grid.h or grid.h_coupling, not both");
  }
  if (c.has("grid.h_coupling")) require(c.real("grid.h_coupling") > 0.0, "grid.h_coupling must be positive");
  const double h = c.grid().spacing();
  require(h > 0.0 && h <= hw, "grid spacing must lie in (0, box.half_width]");
  if (h > 0.5 * eps * eps * (1.0 + 1e-12)) {
    warnings.push_back("grid spacing " + format_double(h) +
                       " exceeds eps^2/2; interpolation error accumulates as T h^2 / eps^2");
  }

  const std::int64_t K = c.integer("stencil.K");
  require(K >= 4 && K % 2 == 0, "stencil.K must be even and at least 4");
  require(c.integer("stencil.m") >= 2, "stencil.m must be at least 2");

  const std::string& kind = c.text("F.kind");
  require(kind == "constant" || kind == "linear" || kind == "exp_heat" || kind == "quadratic" || kind == "expression",
          "F.kind must be one of constant, linear, exp_heat, quadratic, expression");
  require(static_cast<int>(c.list("F.a").size()) == n, "F.a must have params.dim entries");
  if (kind == "expression") {
    require(c.has("F.expr"), "F.kind = expression needs F.expr");
    try {
      Expression::parse(c.text("F.expr"), n);
    } catch (const ExpressionError& e) {
      throw ConfigError("F.expr: " + std::string(e.what()) + ", column " + std::to_string(e.position() + 1));
    }
  } else {
    require(!c.has("F.expr"), "F.expr is only used with F.kind = expression");
  }

  require(static_cast<int>(c.list("game.start").size()) == n, "game.start must have params.dim entries");
  require(c.integer("game.trials") >= 1, "game.trials must be at least 1");
  for (int player : {1, 2}) {
    const std::string id = std::to_string(player);
    const std::string& kind_p = c.text("game.player" + id);
    if (kind_p == "fixed") {
      require(c.has("game.nu" + id), "game.player" + id + " = fixed needs game.nu" + id);
      require(static_cast<int>(c.list("game.nu" + id).size()) == n && is_unit(c.list("game.nu" + id)),
              "game.nu" + id + " must be a unit vector of dimension params.dim");
    } else if (kind_p == "pull") {
      require(c.has("game.target" + id), "game.player" + id + " = pull needs game.target" + id);
      require(static_cast<int>(c.list("game.target" + id).size()) == n,
              "game.target" + id + " must have params.dim entries");
    } else {
      require(kind_p == "greedy_max" || kind_p == "greedy_min",
              "game.player" + id + " must be one of greedy_max, greedy_min, fixed, pull");
    }
  }

  require(c.integer("expansion.quadratics") >= 1, "expansion.quadratics must be at least 1");
  require(c.real("expansion.min_gradient") > 0.0, "expansion.min_gradient must be positive");
  for (double k : c.list("expansion.directions")) {
    require(k >= 4 && k == std::floor(k) && std::fmod(k, 2.0) == 0.0,
            "expansion.directions must list even integers of at least 4");
  }
  for (const char* key : {"expansion.epsilons", "regularity.epsilons", "barrier.epsilons"}) {
    for (double e : c.list(key)) require(e > 0.0 && e < hw, std::string(key) + " must lie in (0, box.half_width)");
  }
  require(static_cast<int>(c.list("expansion.x").size()) == n, "expansion.x must have params.dim entries");

  require(c.real("regularity.radius") > 0.0, "regularity.radius must be positive");
  const double delta = c.real("regularity.delta");
  require(delta > 0.0 && delta <= 1.0, "regularity.delta must lie in (0,1]");
  require(c.integer("regularity.samples") >= 0, "regularity.samples must be non-negative");
  require(c.real("regularity.osc_radius") > 0.0, "regularity.osc_radius must be positive");

  for (double A : c.list("barrier.A")) require(A >= 0.0, "barrier.A must be non-negative");
  for (double r : c.list("barrier.r")) require(r > 0.0 && r < 1.0, "barrier.r must lie in (0,1)");
  const std::string& side = c.text("barrier.side");
  require(side == "upper" || side == "lower" || side == "both", "barrier.side must be upper, lower or both");
  require(c.real("barrier.h") > 0.0, "barrier.h must be positive");

  require(c.real("aux.C") > 1.0 && c.real("aux.M") > 1.0, "aux.C and aux.M must exceed 1");
  require(c.integer("aux.N") >= 1, "aux.N must be at least 1");
  require(c.real("aux.r") > 0.0, "aux.r must be positive");
  const double aux_delta = c.real("aux.delta");
  require(aux_delta > 0.0 && aux_delta <= 1.0, "aux.delta must lie in (0,1]");
  for (double g : c.list("aux.gammas")) require(g > 1.0 && g < 2.0, "aux.gammas must lie in (1,2)");
  for (double w : c.list("aux.omega0s")) require(w > 0.0, "aux.omega0s must be positive");
  require(c.integer("aux.samples") >= 2, "aux.samples must be at least 2");
  require(c.integer("aux.pairs") >= 1, "aux.pairs must be at least 1");
}

}  // namespace

std::string command_name(Command c) {
  for (const auto& [cmd, name] : command_names()) {
    if (cmd == c) return name;
  }
  return "?";
}

std::vector<std::string> known_config_keys() {
  std::vector<std::string> out;
  for (const KeySpec& k : registry()) out.push_back(k.name);
  return out;
}

double RunConfig::real(const std::string& key) const { return std::get<double>(entries_.at(key).value); }
std::int64_t RunConfig::integer(const std::string& key) const {
  return std::get<std::int64_t>(entries_.at(key).value);
}
std::uint64_t RunConfig::seed() const { return std::get<std::uint64_t>(entries_.at("seed").value); }
const std::string& RunConfig::text(const std::string& key) const {
  return std::get<std::string>(entries_.at(key).value);
}
const std::vector<double>& RunConfig::list(const std::string& key) const {
  return std::get<std::vector<double>>(entries_.at(key).value);
}
Vec RunConfig::vec(const std::string& key) const {
  const auto& v = list(key);
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}
Provenance RunConfig::provenance(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? Provenance::Default : it->second.provenance;
}

void RunConfig::set_seed(std::uint64_t seed) { entries_["seed"] = ConfigEntry{seed, Provenance::User}; }
void RunConfig::set_output(const std::string& dir) { entries_["out"] = ConfigEntry{dir, Provenance::User}; }

Box RunConfig::box() const { return Box(vec("box.center"), real("box.half_width")); }

DppParams RunConfig::params() const { return params_with_epsilon(real("params.epsilon")); }

DppParams RunConfig::params_with_epsilon(double eps) const {
  return DppParams::make(real("params.alpha"), ParabolicCylinder(box(), real("params.T"), eps));
}

SpatialGrid RunConfig::grid() const { return grid_for(params()); }

SpatialGrid RunConfig::grid_for(const DppParams& p) const {
  const double eps = p.epsilon();
  const double h = has("grid.h_coupling") ? real("grid.h_coupling") * eps * eps : real("grid.h");
  return make_grid(p.box(), h);
}

BoundaryData RunConfig::boundary() const {
  const std::string& kind = text("F.kind");
  if (kind == "constant") return BoundaryData::constant(real("F.c"));
  if (kind == "linear") return BoundaryData::linear(vec("F.a"), real("F.c"));
  if (kind == "exp_heat") return BoundaryData::exp_heat(real("F.k"), real("params.alpha"));
  if (kind == "quadratic") return BoundaryData::quadratic();
  return BoundaryData::expression(text("F.expr"), dim());
}

DppStencil RunConfig::stencil() const { return stencil_for(params()); }

DppStencil RunConfig::stencil_for(const DppParams& p) const {
  return DppStencil(p, direction_set(dim(), static_cast<int>(integer("stencil.K"))),
                    disk_quadrature(dim(), static_cast<int>(integer("stencil.m"))));
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json values = nlohmann::json::object();
  nlohmann::json provenance = nlohmann::json::object();
  for (const auto& [key, entry] : entries_) {
    std::visit([&](const auto& x) { values[key] = x; }, entry.value);
    provenance[key] = entry.provenance == Provenance::User ? "user" : "default";
  }
  nlohmann::json j;
  j["command"] = command_name(command_);
  j["values"] = values;
  j["provenance"] = provenance;
  j["warnings"] = warnings_;
  return j;
}

RunConfig parse_config(std::string_view text) {
  Entries user;
  std::map<std::string, int> lines;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw_line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string line = trim(strip_comment(raw_line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header '" + line + "'", line_no);
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("empty section name", line_no);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + line + "'", line_no);
    const std::string local = trim(std::string_view(line).substr(0, eq));
    const std::string raw = trim(std::string_view(line).substr(eq + 1));
    if (local.empty()) throw ConfigError("missing key", line_no);
    if (raw.empty()) throw ConfigError(local + ": missing value", line_no);
    const std::string key = section.empty() ? local : section + "." + local;
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError("unknown key '" + key + "'", line_no);
    if (user.count(key)) throw ConfigError("duplicate key '" + key + "' (first set on line " + std::to_string(lines[key]) + ")", line_no);
    user[key] = ConfigEntry{convert(*spec, raw, line_no), Provenance::User};
    lines[key] = line_no;
  }

  RunConfig cfg;
  if (!user.count("command")) throw ConfigError("missing required key 'command'");
  const std::string& cmd = std::get<std::string>(user.at("command").value);
  bool found = false;
  for (const auto& [c, name] : command_names()) {
    if (name == cmd) {
      cfg.command_ = c;
      found = true;
    }
  }
  if (!found) throw ConfigError("unknown command '" + cmd + "'", lines["command"]);

  for (const KeySpec& spec : registry()) {
    if (user.count(spec.name)) {
      cfg.entries_[spec.name] = user.at(spec.name);
    } else if (auto v = spec.fallback(cfg.entries_)) {
      cfg.entries_[spec.name] = ConfigEntry{*v, Provenance::Default};
    }
  }
  try {
    validate(cfg, cfg.warnings_);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string render(const RunConfig& config) {
  std::string top, sections;
  std::string current;
  for (const KeySpec& spec : registry()) {
    const auto it = config.entries().find(spec.name);
    if (it == config.entries().end() || it->second.provenance != Provenance::User) continue;
    const std::size_t dot = spec.name.find('.');
    if (dot == std::string::npos) {
      top += spec.name + " = " + render_value(it->second.value) + "\n";
      continue;
    }
    const std::string sec = spec.name.substr(0, dot);
    if (sec != current) {
      sections += "\n[" + sec + "]\n";
      current = sec;
    }
    sections += spec.name.substr(dot + 1) + " = " + render_value(it->second.value) + "\n";
  }
  return top + sections;
}

}  // namespace dpp
