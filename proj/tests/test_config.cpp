#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pmeflow/fieldio.hpp"
#include "pmeflow/runner.hpp"
#include "support.hpp"

using namespace pmeflow;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string tmp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("pmeflow_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

} // namespace

TEST_CASE("minimal config gets documented defaults") {
    RunConfig cfg = parse_config("[manifold]\nbackend = torus\n[pme]\np = 2.0\n");
    CHECK(cfg.mode == RunMode::Simulate);
    CHECK(cfg.resolution == 64);
    CHECK(cfg.length == 1.0);
    CHECK(cfg.p == 2.0);
    CHECK(cfg.harnack.b == 2.0);
    CHECK(cfg.harnack.d == 2.0);
    CHECK(cfg.seed == 1);
}

TEST_CASE("constraint violations are rejected with the offending line") {
    CHECK_THROWS_WITH_AS(parse_config("[pme]\np = 1.0\n"),
                         doctest::Contains("p must exceed 1"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[harnack]\nb = 3\nd = 2\n"),
                         doctest::Contains("d >= b"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[harnack]\nb = 1\n"),
                         doctest::Contains("b must be >= 2"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[manifold]\nresolution = 4\n"),
                         doctest::Contains("resolution"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[pme]\nnope = 1\n"),
                         doctest::Contains("config line 2"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[nope]\nx = 1\n"),
                         doctest::Contains("unknown section"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("x = 1\n"),
                         doctest::Contains("before any"), ConfigError);
    // mode names
    CHECK(parse_config("[run]\nmode = flow-zoo\n").mode == RunMode::FlowZoo);
    CHECK_THROWS_AS(parse_config("[run]\nmode = bogus\n"), ConfigError);
}

TEST_CASE("time tables parse") {
    TimeTable t = TimeTable::parse("0:2.0,1:1.5,2:1.0");
    CHECK(t(0.0) == 2.0);
    CHECK(t(0.5) == doctest::Approx(1.75));
    CHECK(t(5.0) == 1.0);
    TimeTable c = TimeTable::parse("0.7");
    CHECK(c(3.0) == 0.7);
    CHECK_THROWS_AS(TimeTable::parse("1:2,0:3"), ConfigError);
}

TEST_CASE("field snapshots round-trip bit-exactly") {
    GridSpec g = GridSpec::torus(8, 12, 1.0, 2.5);
    ScalarField f = pmeflow::test::make_field(g, [](double x, double y) {
        return std::sin(2 * M_PI * x) + 0.123456789012345 * y;
    });
    std::stringstream ss;
    write_field(ss, f, 0.375, std::string("ricci"), true);
    FieldFile back = read_field(ss);
    CHECK(back.grid == g);
    CHECK(back.t == 0.375);
    CHECK(back.kind.value() == "ricci");
    CHECK(back.has_f.value());
    for (int i = 0; i < g.node_count(); ++i) CHECK(back.values[i] == f[i]);

    // 1D header without the optional fields
    GridSpec gc = GridSpec::circle(16, 1.0);
    std::stringstream s1;
    write_field(s1, ScalarField(gc, 0.25), 1.5);
    FieldFile b1 = read_field(s1);
    CHECK(b1.grid == gc);
    CHECK(!b1.kind);
}

TEST_CASE("csv round-trips under the documented schema") {
    std::string dir = tmp_dir("csv");
    {
        CsvWriter csv(dir + "/t.csv", {"a", "b"});
        csv.row({1.0, 2.0});
        csv.row({0.1234567890123456789, -3.5e-17});
    }
    CsvTable t = read_csv(dir + "/t.csv");
    CHECK(t.columns == std::vector<std::string>{"a", "b"});
    CHECK(t.rows.size() == 2);
    CHECK(std::stod(t.rows[1][0]) == 0.1234567890123456789);
    CHECK(std::stod(t.rows[1][1]) == -3.5e-17);
}

TEST_CASE("runs are byte-identical for identical config and seed") {
    std::string base = "[run]\nmode = simulate\nseed = 9\n"
                       "[manifold]\nbackend = circle\nresolution = 32\n"
                       "[flow]\nkind = static\n"
                       "[pme]\ninitial = random-smooth\n"
                       "[time]\ndt = 1e-4\nhorizon = 0.01\nsnapshot_stride = 20\n";
    RunConfig cfg = parse_config(base);
    std::string d1 = tmp_dir("det1"), d2 = tmp_dir("det2");
    std::ostringstream sink;
    cfg.output = d1;
    CHECK(run_config(cfg, sink) == 0);
    cfg.output = d2;
    CHECK(run_config(cfg, sink) == 0);
    for (const char* name : {"/series.csv", "/summary.txt", "/u_final.txt"})
        CHECK(slurp(d1 + name) == slurp(d2 + name));
    CHECK(!slurp(d1 + "/series.csv").empty());
}

TEST_CASE("hypothesis failure exits zero with a not-applicable flag") {
    std::string text = "[run]\nmode = check-harnack\n"
                       "[manifold]\nbackend = torus\nresolution = 16\n"
                       "[flow]\nkind = scaled-identity\nlambda = -1.0\n"
                       "[pme]\ninitial = constant\nconstant_value = 1.0\n"
                       "[time]\ndt = 1e-3\nhorizon = 0.4\nsnapshot_stride = 40\n"
                       "[harnack]\nt_start = 0.1\npairs = 2\n";
    RunConfig cfg = parse_config(text);
    cfg.output = tmp_dir("na");
    std::ostringstream sink;
    CHECK(run_config(cfg, sink) == 0);
    std::string summary = slurp(cfg.output + "/summary.txt");
    CHECK(summary.find("differential.status = not-applicable") != std::string::npos);
}

TEST_CASE("solver errors surface as exit code 3 with diagnostics") {
    std::string text = "[run]\nmode = simulate\n"
                       "[manifold]\nbackend = sphere\nsphere_dim = 2\nsphere_r2 = 0.1\n"
                       "[flow]\nkind = ricci\n"
                       "[pme]\nenabled = true\ninitial = constant\n"
                       "[time]\ndt = 1e-3\nhorizon = 1.0\n";
    RunConfig cfg = parse_config(text);
    cfg.output = tmp_dir("ext");
    std::ostringstream sink;
    CHECK(run_config(cfg, sink) == 3); // sphere collapses at t = 0.05
    CHECK(slurp(cfg.output + "/summary.txt").find("extinction") != std::string::npos);
}

TEST_CASE("output root env var prefixes relative outputs") {
    std::string root = tmp_dir("root");
    setenv("PMEFLOW_OUTPUT_ROOT", root.c_str(), 1);
    RunConfig cfg;
    cfg.output = "nested/exp";
    CHECK(resolve_output_dir(cfg) == root + "/nested/exp");
    unsetenv("PMEFLOW_OUTPUT_ROOT");
    cfg.output = "/abs/path";
    CHECK(resolve_output_dir(cfg) == "/abs/path");
}

TEST_CASE("flow zoo closed forms agree") {
    for (const ZooRow& row : flow_zoo()) {
        CAPTURE(row.kind);
        CAPTURE(row.quantity);
        CHECK(row.pass);
    }
}
