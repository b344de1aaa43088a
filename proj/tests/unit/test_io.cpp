#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "conewave/config.hpp"
#include "conewave/report.hpp"
#include "conewave/serialize.hpp"

using namespace conewave;

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(R"(
experiment = "lattice"
cone = "product"
cone_dim = 2
delta = 0.25
p = "inf"
q = 1.5
s = [0.5, 0.0]
grid_count = 64
seed = 42
weighted = true
)");
  CHECK(c.experiment == "lattice");
  CHECK(c.cone_dim == 2);
  CHECK(c.delta == 0.25);
  CHECK(std::isinf(c.p));
  CHECK(c.q == 1.5);
  CHECK(c.s == std::vector<double>{0.5, 0.0});
  CHECK(c.grid_count == std::vector<int>{64});
  CHECK(c.seed == 42u);
  CHECK(c.weighted);

  CHECK_THROWS_AS(parse_config("delat = 0.3"), ConfigError);
  CHECK_THROWS_AS(parse_config("delta = \"big\""), ConfigError);
  CHECK_THROWS_AS(parse_config("delta = -0.3"), ConfigError);
  CHECK_THROWS_AS(parse_config("trials = 2.5"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed = -1"), ConfigError);
  CHECK_THROWS_AS(parse_config("delta = ["), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/x.toml"), ConfigError);
  try {
    parse_config("\n\ncone = 3", "bad.toml");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("shipped configs parse") {
  for (const auto& entry : std::filesystem::directory_iterator(CONEWAVE_CONFIG_DIR)) {
    if (entry.path().extension() != ".toml") continue;
    CAPTURE(entry.path().string());
    const ExperimentConfig c = load_config(entry.path().string());
    const auto names = experiment_names();
    CHECK(std::find(names.begin(), names.end(), c.experiment) != names.end());
  }
}

TEST_CASE("trial seeds and helpers") {
  CHECK(trial_seed(1, 0) != trial_seed(1, 1));
  CHECK(trial_seed(1, 0) != trial_seed(2, 0));
  CHECK(trial_seed(7, 3) == trial_seed(7, 3));
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](int i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](int i) { if (i == 5) throw DomainError("x"); }), DomainError);
  CHECK(least_squares_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(least_squares_slope({1}, {1}), DomainError);
}

TEST_CASE("reports") {
  TrialReport r;
  r.experiment = "demo";
  r.rows = {{0, 11, 1.0 / 3.0, 1.0, 3.0, {{"extra", 0.1}}}, {1, 12, 2.0, 4.0, 2.0, {{"extra", kInf}}}};
  r.finalize();
  CHECK(r.max_ratio == 2.0);
  CHECK(r.min_ratio == doctest::Approx(1.0 / 3.0));
  r.trajectory = {{1.0, 1.0}, {10.0, 3.0}};
  r.sweep_label = "k";
  r.add_check("bound", true, 2.0, 3.0);
  r.summary = {{"slope", 0.5}};
  CHECK(r.passed());
  CHECK(r.summary_value("slope") == 0.5);
  CHECK_THROWS_AS(r.summary_value("nope"), DomainError);

  const std::string csv = report_csv(r);
  CHECK(csv.rfind("trial,seed,ratio,lhs,rhs,extra\n0,11,0.33333333333333331,1,3,0.10000000000000001\n", 0) == 0);
  CHECK(csv == report_csv(r));

  const auto j = nlohmann::json::parse(report_json(r));
  CHECK(j["label"] == "empirical");
  CHECK(j["rows"][1]["extra"] == "inf");
  CHECK(j["summary_statistics"]["max"] == 2.0);
  CHECK(j["passed"] == true);
  CHECK(report_svg(r).find("<polyline") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "conewave_report_test";
  std::filesystem::remove_all(dir);
  const std::string path = emit_report(r, ReportFormat::csv, dir.string());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == csv);
  CHECK_THROWS_AS(emit_report(r, ReportFormat::json, "/proc/definitely/not/writable"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("serialization round trips") {
  const SiegelData h = heisenberg_siegel();
  const SiegelData h2 = siegel_from_json(to_json(h));
  CHECK(h2.n == 1);
  CHECK(std::abs(h2.phi[0][0] - h.phi[0][0]) == 0.0);
  CHECK(h2.b[0] == doctest::Approx(-1.0));
  CHECK_THROWS_AS(siegel_from_json("{}"), ConfigError);

  const Grid g = make_grid(1, 4, 2.0, {8}, {3.0});
  CHECK(grid_from_json(to_json(g)) == g);
  const auto cj = nlohmann::json::parse(to_json(make_cone(ConeKind::lorentz, 3)));
  CHECK(cj["kind"] == "lorentz");
  CHECK(cj["d"][1] == -1.5);

  GridFunction u(g);
  for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] = cplx(std::sin(i * 0.3), 1.0 / (i + 1.0));
  std::stringstream buf;
  write_dump(buf, u);
  const GridFunction back = read_grid_dump(buf);
  CHECK(back.grid == g);
  CHECK(back.values == u.values);

  ScalarSymbol s;
  s.axes = {SymbolAxis{0.5, 0.25, 5}};
  s.values = {1.0, cplx(0, 2), 3.0, 4.0, 5.0};
  std::stringstream sbuf;
  write_dump(sbuf, s);
  const ScalarSymbol sb = read_symbol_dump(sbuf);
  CHECK(sb.same_lattice(s));
  CHECK(sb.values == s.values);

  std::stringstream wrong;
  write_dump(wrong, s);
  CHECK_THROWS_AS(read_grid_dump(wrong), IoError);
  std::stringstream junk("not a dump");
  CHECK_THROWS_AS(read_symbol_dump(junk), IoError);
  std::stringstream again;
  write_dump(again, u);
  std::stringstream truncated(again.str().substr(0, again.str().size() - 5));
  CHECK_THROWS_AS(read_grid_dump(truncated), IoError);

  const auto dj = nlohmann::json::parse(dump_json(s));
  CHECK(dj["kind"] == "symbol");
  CHECK(dj["values"].size() == 5);
}
