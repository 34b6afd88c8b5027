#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "herm/cli/commands.hpp"
#include "herm/cli/config.hpp"
#include "herm/cli/field_io.hpp"
#include "herm/cli/report.hpp"
#include "herm/laplace.hpp"
#include "support/fixtures.hpp"

using namespace herm;
using namespace herm::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "herm_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_text(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path.string();
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "run.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

int count_lines(const std::string& path, char skip) {
  std::ifstream in(path);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != skip) ++n;
  }
  return n;
}

// small and fast: flat torus at N = 16 with reduced sampling; the random conformal factor
// of the scalar-curvature law is only resolved to about 1e-6 at this size
const char* kSmallFlat = R"(version: 1
command: curvature
grid: {n: 2, N: 16}
tolerances: {conformal: 1e-5}
sampling: {berger_points: 3, berger_samples: 2000, hsc_points: 4, hsc_directions: 4, hsc_refine: 2}
)";

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig cfg = parse_config(kSmallFlat);
  CHECK(cfg.command == "curvature");
  CHECK(cfg.n == 2);
  CHECK(cfg.N == 16);
  CHECK(cfg.tol.conformal == 1e-5);
  CHECK(cfg.sampling.berger_points == 3);
  CHECK(cfg.metric.terms.empty());

  // JSON is the same schema
  const RunConfig js = parse_config(R"({"version": 1, "command": "curvature", "grid": {"n": 2, "N": 16},
    "tolerances": {"conformal": 1e-5}, "sampling": {"berger_points": 3, "berger_samples": 2000, "hsc_points": 4, "hsc_directions": 4,
    "hsc_refine": 2}})");
  CHECK(canonical_json(js) == canonical_json(cfg));
  CHECK(config_digest(js) == config_digest(cfg));
}

TEST_CASE("config errors name the line and key") {
  const std::string unknown = error_of("version: 1\ncommand: curvature\ngrid: {n: 2, N: 8}\nmetrc: {}\n");
  CHECK(unknown.find("run.yaml:4") != std::string::npos);
  CHECK(unknown.find("metrc") != std::string::npos);

  const std::string nested = error_of("version: 1\ncommand: curvature\ngrid:\n  n: 2\n  N: eight\n");
  CHECK(nested.find("run.yaml:5") != std::string::npos);
  CHECK(nested.find("grid.N") != std::string::npos);

  CHECK(error_of("version: 1\ncommand: curvature\ngrid: {n: 2, N: 8}\nsampling: {hsc_pts: 3}\n")
            .find("sampling") != std::string::npos);
  CHECK(error_of("version: 1\ncommand: curvature\ngrid: [n, 2\n").find("syntax") != std::string::npos);
  CHECK(error_of("version: 1\ncommand: shear\ngrid: {n: 2, N: 8}\n").find("unknown command") != std::string::npos);
  CHECK(error_of("version: 1\ncommand: curvature\ngrid: {n: 2, N: 9}\n").find("grid.N") != std::string::npos);
  CHECK_FALSE(error_of("version: 1\ncommand: bundle-cert\ngrid: {n: 2, N: 8}\n").empty());
  CHECK_FALSE(error_of("version: 7\ncommand: curvature\ngrid: {n: 2, N: 8}\n").empty());
}

TEST_CASE("shipped configurations parse") {
  const char* dir = std::getenv("HERM_CONFIG_DIR");
  REQUIRE(dir != nullptr);
  int count = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".yaml") continue;
    INFO(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path().string()));
    ++count;
  }
  CHECK(count >= 3);
}

TEST_CASE("overrides") {
  RunConfig cfg = parse_config(kSmallFlat);
  const std::string digest = config_digest(cfg);
  Overrides o;
  o.out_dir = "elsewhere";
  apply_overrides(cfg, o);
  CHECK(cfg.output.dir == "elsewhere");
  CHECK(config_digest(cfg) == digest);

  Overrides s;
  s.seed = 99;
  s.tol = 1e-9;
  s.grid = 32;
  s.emit_fields = true;
  apply_overrides(cfg, s);
  CHECK(cfg.seeds.berger == 99);
  CHECK(cfg.seeds.hsc == 99);
  CHECK(cfg.seeds.identities == 99);
  CHECK(cfg.seeds.conformal == 99);
  CHECK(cfg.tol.gauduchon == 1e-9);
  CHECK(cfg.tol.poisson == 1e-9);
  CHECK(cfg.N == 32);
  CHECK(cfg.output.emit_fields);
  CHECK(config_digest(cfg) != digest);

  Overrides bad;
  bad.grid = 7;
  CHECK_THROWS_AS(apply_overrides(cfg, bad), ConfigError);
}

TEST_CASE("curvature command on the flat torus") {
  RunConfig cfg = parse_config(kSmallFlat);
  cfg.output.dir = scratch("flat").string();
  const Report a = run_command(cfg);
  CHECK(a.status == "ok");
  CHECK(a.all_passed());
  CHECK(a.exit_code() == ExitCode::ok);
  CHECK(a.values["S"]["min"].get<double>() == 0.0);
  CHECK(a.values["S"]["max"].get<double>() == 0.0);
  CHECK(a.values["S_hat"]["max"].get<double>() == 0.0);
  CHECK(a.values["hsc_range"]["min"].get<double>() == 0.0);
  CHECK(a.values["hsc_range"]["max"].get<double>() == 0.0);
  for (const auto& c : a.checks) {
    INFO(c.name);
    CHECK_FALSE(c.identity.empty());
    CHECK((c.relation == "<=" || c.relation == ">="));
  }

  // byte-identical reports for the same configuration
  const Report b = run_command(cfg);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.digest == config_digest(cfg));
}

TEST_CASE("field files") {
  const fs::path dir = scratch("fields");
  const TorusGrid g = make_grid(2, 8);
  {
    const std::string path = (dir / "c.csv").string();
    write_field(ScalarField::constant(g, 2.5), path, FieldFormat::csv);
    CHECK(count_lines(path, '#') == 1 + 8 * 8 * 8 * 8);
    const ScalarField back = read_field(path);
    CHECK(back.size() == g.size());
    CHECK(back.is_real());
    CHECK(max_abs_diff(back, ScalarField::constant(g, 2.5)) == 0.0);
  }
  {
    // f0 of the conformally flat metric survives a round trip as c e^{-u}
    const TorusGrid g16 = make_grid(2, 16);
    const GauduchonFactor f = gauduchon_factor(build_metric(test::conformally_flat(), g16));
    const double c = std::cyl_bessel_i(0.0, 0.2) / std::cyl_bessel_i(0.0, 0.1);
    const ScalarField expected = ScalarField::sample(g16, [c](const Point& x) {
      return cd{c * std::exp(-test::conformally_flat_u(x)), 0.0};
    }, true);
    for (FieldFormat fmt : {FieldFormat::csv, FieldFormat::json}) {
      const std::string path = (dir / ("f0." + to_string(fmt))).string();
      write_field(f.f0, path, fmt);
      CHECK(max_abs_diff(read_field(path), expected) <= 1e-7);
      CHECK(max_abs_diff(read_field(path), f.f0) == 0.0);
    }
  }
  {
    const ScalarField z = ScalarField::constant(g, cd{1.0, -2.0});
    const std::string path = (dir / "z.json").string();
    write_field(z, path, FieldFormat::json);
    CHECK(max_abs_diff(read_field(path), z) == 0.0);
  }
  {
    const std::string path = (dir / "slice.csv").string();
    write_slice_csv(ScalarField::constant(g, 1.0), 0, path);
    CHECK(count_lines(path, '#') == 1 + 8);
  }
  CHECK_THROWS_AS(write_field(ScalarField::constant(g, 1.0), "/nonexistent/dir/f.csv", FieldFormat::csv), IoError);
  CHECK_THROWS_AS(read_field((dir / "missing.csv").string()), IoError);
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("main");
  std::ostringstream out, err;

  const std::string ok = write_text(dir / "ok.yaml", kSmallFlat);
  CHECK(run_main({"--config", ok, "--out", (dir / "ok").string()}, out, err) == 0);
  CHECK(fs::exists(dir / "ok" / "report.json"));
  CHECK(fs::exists(dir / "ok" / "timings.json"));
  CHECK(out.str().find("PASS") != std::string::npos);

  const std::string broken = write_text(dir / "broken.yaml", "version: 1\ncommand: curvature\ngrid: {n: 2, N: 8}\nbogus: 1\n");
  CHECK(run_main({"--config", broken}, out, err) == 4);
  CHECK(err.str().find("bogus") != std::string::npos);
  CHECK(run_main({"--config", (dir / "absent.yaml").string()}, out, err) == 4);
  CHECK(run_main({"--config", ok, "--grid", "9"}, out, err) == 4);

  // gamma = 1 + cos(2 pi x1) >= 0 violates the integral hypothesis
  const std::string positive = write_text(dir / "positive.yaml", R"(version: 1
command: bundle-cert
grid: {n: 2, N: 8}
bundle:
  rank: 1
  weight:
    terms:
      - {k: [1, 0, 0, 0], c: 0.05066059182116889}
  background: [[0.5, 0], [0, 0.5]]
)");
  CHECK(run_main({"--config", positive, "--out", (dir / "positive").string()}, out, err) == 3);

  // --command replaces the configured command
  CHECK(run_main({"--config", ok, "--command", "identities", "--out", (dir / "id").string()}, out, err) == 0);
  std::ifstream report(dir / "id" / "report.json");
  std::stringstream text;
  text << report.rdbuf();
  CHECK(text.str().find("\"command\": \"identities\"") != std::string::npos);
}
