#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <doctest.h>

#include "dpp/config.hpp"
#include "dpp/field_io.hpp"
#include "dpp/run.hpp"

using namespace dpp;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dpplab_cli_" + name);
  fs::remove_all(p);
  return p;
}

const char* kAux = R"(command = verify-aux
[aux]
samples = 200
pairs = 50
)";

}  // namespace

TEST_CASE("config: defaults and provenance") {
  const RunConfig c = parse_config("command = solve\n");
  CHECK(c.command() == Command::Solve);
  CHECK(c.real("params.alpha") == 0.5);
  CHECK(c.real("params.epsilon") == 0.1);
  CHECK(c.integer("stencil.K") == 64);
  CHECK(c.seed() == 1);
  CHECK(c.text("F.kind") == "exp_heat");
  CHECK(c.provenance("params.alpha") == Provenance::Default);
  CHECK(c.provenance("command") == Provenance::User);
  CHECK(c.grid().spacing() == doctest::Approx(0.005));
  CHECK(!c.has("grid.h"));
  CHECK(c.warnings().empty());
  CHECK(c.list("game.start") == std::vector<double>{0.2, 0.1});
}

TEST_CASE("config: sections, dotted keys, comments and quoting") {
  const RunConfig c = parse_config(R"cfg(
# a comment
command = "simulate"   # trailing comment
params.alpha = 0.25
out = "runs/#1"
[params]
epsilon = 0.2
dim = 3
[F]
expr = "exp(x1)"   # a comment
[game]
player1 = fixed
nu1 = (0, 0, 1)
)cfg");
  CHECK(c.command() == Command::Simulate);
  CHECK(c.real("params.alpha") == 0.25);
  CHECK(c.real("params.epsilon") == 0.2);
  CHECK(c.dim() == 3);
  CHECK(c.text("F.kind") == "expression");
  CHECK(c.text("F.expr") == "exp(x1)");
  CHECK(c.text("out") == "runs/#1");
  CHECK(c.vec("game.nu1")[2] == 1.0);
  CHECK(c.list("box.center").size() == 3);
  CHECK(c.params().alpha == 0.25);
  CHECK(c.params().beta == 0.75);
}

TEST_CASE("config: errors") {
  CHECK(error_of("") == "missing required key 'command'");
  CHECK(error_of("command = solve\nfoo = 1\n") == "line 2: unknown key 'foo'");
  CHECK(error_of("command = solve\n[params]\nalpha = 0.5\nalpha = 0.4\n").find("line 4: duplicate key") == 0);
  CHECK(error_of("command = solve\nparams.alpha = abc\n").find("line 2: params.alpha: expected a real number") == 0);
  CHECK(error_of("command = solve\nstencil.K = 1.5\n").find("expected an integer") != std::string::npos);
  CHECK(error_of("command = bogus\n") == "line 1: unknown command 'bogus'");
  CHECK(error_of("command = solve\nparams.alpha = 1\n") == "alpha must lie in (0,1)");
  CHECK(error_of("command = solve\nparams.alpha = 0\n") == "alpha must lie in (0,1)");
  CHECK(error_of("command = solve\ngrid.h = 0.01\ngrid.h_coupling = 1\n") ==
        "set either grid.h or grid.h_coupling, not both");
  CHECK(error_of("command = solve\nF.expr = \"1 + \"\n").find("F.expr:") == 0);
  CHECK(error_of("command = solve\nF.expr = \"1 + \"\n").find("column 5") != std::string::npos);
  CHECK(error_of("command = solve\nstencil.K = 7\n") == "stencil.K must be even and at least 4");
  CHECK(error_of("command = solve\n[params\n").find("line 2: malformed section header") == 0);
  CHECK(error_of("command = solve\njust words\n").find("line 2: expected 'key = value'") == 0);
  CHECK(error_of("command = simulate\ngame.player1 = fixed\ngame.nu1 = 1, 1\n").find("unit vector") !=
        std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/dpplab.ini"), ConfigError);
}

TEST_CASE("config: coarse grids are accepted with a warning") {
  const RunConfig c = parse_config("command = solve\ngrid.h = 0.05\n");
  REQUIRE(c.warnings().size() == 1);
  CHECK(c.warnings()[0].find("exceeds eps^2/2") != std::string::npos);
  CHECK(c.grid().spacing() == doctest::Approx(0.05));
}

TEST_CASE("config: render round trip on random configs") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  const std::vector<std::string> commands = {"solve", "simulate", "verify-expansion", "verify-regularity",
                                             "verify-barrier", "verify-aux"};
  for (int trial = 0; trial < 200; ++trial) {
    std::ostringstream os;
    os << "command = " << commands[trial % commands.size()] << "\n";
    if (gen() % 2) os << "seed = " << gen() << "\n";
    if (gen() % 2) os << "params.alpha = " << format_double(u(gen)) << "\n";
    if (gen() % 2) os << "params.epsilon = " << format_double(0.5 * u(gen)) << "\n";
    if (gen() % 2) os << "grid.h = " << format_double(0.1 * u(gen)) << "\n";
    if (gen() % 2) os << "stencil.K = " << 2 * (2 + gen() % 60) << "\n";
    if (gen() % 2) os << "box.center = " << format_double(u(gen)) << ", " << format_double(-u(gen)) << "\n";
    if (gen() % 3 == 0) os << "F.expr = \"sin(x1) * 2\"\n";
    if (gen() % 2) os << "[expansion]\nepsilons = " << format_double(u(gen)) << ", " << format_double(u(gen)) << "\n";
    if (gen() % 2) os << "[aux]\nN = " << 1 + gen() % 9 << "\n";
    const std::string text = os.str();
    const RunConfig a = parse_config(text);
    const std::string rendered = render(a);
    const RunConfig b = parse_config(rendered);
    CHECK(a == b);
    CHECK(render(b) == rendered);
    CHECK(a.to_json() == b.to_json());
  }
}

TEST_CASE("run: exit codes and report") {
  const fs::path out = scratch("pass");
  std::ostringstream err;
  RunOptions opt{out, 1, nullptr};
  CHECK(run(parse_config(kAux), opt, err) == kExitPass);
  REQUIRE(fs::exists(out / "report.json"));
  std::ifstream in(out / "report.json");
  const auto report = nlohmann::json::parse(in);
  CHECK(report["version"] == kVersion);
  CHECK(report["command"] == "verify-aux");
  CHECK(report["pass"] == true);
  CHECK(report["config"]["provenance"]["aux.samples"] == "user");
  CHECK(report["config"]["provenance"]["aux.C"] == "default");
  for (const auto& c : report["checks"]) {
    CHECK(c["pass"] == (c["margin"].get<double>() >= -c["tolerance"].get<double>()));
  }
  fs::remove_all(out);
}

TEST_CASE("run: failing check gives exit code 2 and keeps artifacts") {
  const fs::path out = scratch("fail");
  std::ostringstream err;
  const RunConfig cfg = parse_config(R"(command = verify-expansion
[expansion]
quadratics = 3
directions = 16, 32
epsilons = 0.1, 0.05
)");
  CHECK(run(cfg, {out, 1, nullptr}, err) == kExitCheckFailed);
  CHECK(fs::exists(out / "report.json"));
  CHECK(err.str().find("check failed: exp_heat_rate") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("run: errors give exit code 1 and remove partial artifacts") {
  const fs::path out = scratch("error");
  std::ostringstream err;
  const RunConfig cfg = parse_config("command = solve\nF.expr = \"sqrt(0.007 - t)\"\ngrid.h = 0.1\n");
  CHECK(run(cfg, {out, 1, nullptr}, err) == kExitError);
  CHECK(!fs::exists(out));
  CHECK(err.str().find("error") != std::string::npos);

  const fs::path existing = scratch("existing");
  fs::create_directories(existing);
  std::ofstream(existing / "keep.txt") << "x";
  CHECK(run(cfg, {existing, 1, nullptr}, err) == kExitError);
  CHECK(fs::exists(existing / "keep.txt"));
  CHECK(!fs::exists(existing / "field.csv"));
  CHECK(!fs::exists(existing / "report.json"));
  fs::remove_all(existing);
}

TEST_CASE("run: reports do not depend on the thread count") {
  const RunConfig solve_cfg = parse_config("command = solve\ngrid.h = 0.02\nstencil.K = 16\nF.kind = quadratic\n");
  const RunConfig sim_cfg = parse_config(R"(command = simulate
grid.h = 0.02
stencil.K = 16
[game]
trials = 300
)");
  for (const RunConfig& cfg : {solve_cfg, sim_cfg, parse_config(kAux)}) {
    const fs::path a = scratch("threads_a"), b = scratch("threads_b");
    const Report r1 = execute(cfg, {a, 1, nullptr});
    const Report r4 = execute(cfg, {b, 4, nullptr});
    CHECK(r1.to_json(false).dump() == r4.to_json(false).dump());
    fs::remove_all(a);
    fs::remove_all(b);
  }
}
