#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "nmep/series.hpp"

using namespace nmep;

namespace {

std::string cli() {
    const char* p = std::getenv("NMEP_CLI");
    REQUIRE_MESSAGE(p != nullptr, "NMEP_CLI must point at the executable");
    return p;
}

int run(const std::string& args) {
    const std::string cmd = cli() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE_MESSAGE(in.good(), "cannot open ", path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

const std::string tiny_config =
    "[model]\n"
    "kind = spin_star\n"
    "[solver]\n"
    "kind = nmep\n"
    "t_max = 0.2\n"
    "dt = 1e-3\n"
    "n_ensemble = 2000\n"
    "seed = 3\n"
    "[initial]\n"
    "state = 0.7071067811865476, 0.5+0.5j\n"
    "[output]\n"
    "observables = rho01, sigma_z\n";

} // namespace

TEST_CASE("export-analytic matches the closed form") {
    // alpha = 1, 4 bath spins: |f| is 1 at t = 0 and t = pi/2, minimal at pi/4
    const std::string out = "/tmp/nmep_cli_export.csv";
    CHECK(run("export-analytic --model spin_star --grid 0:1.5707963267948966:3 --output " + out) ==
          0);
    const auto table = read_csv_file(out);
    REQUIRE(table.rows.size() == 3);
    const auto abs_f = table.column_index("abs_f");
    const auto f_re = table.column_index("f_re");
    const auto f_im = table.column_index("f_im");
    CHECK(table.rows[0][abs_f] == doctest::Approx(1.0));
    CHECK(table.rows[1][abs_f] == doctest::Approx(0.33642976438608246));
    CHECK(table.rows[2][abs_f] == doctest::Approx(1.0));
    for (const auto& row : table.rows) {
        const double mag = std::hypot(row[f_re], row[f_im]);
        CHECK(std::abs(mag - row[abs_f]) < 1e-12);
    }
    // default initial coherence 0.5
    CHECK(table.rows[0][table.column_index("rho01")] == doctest::Approx(0.5));
}

TEST_CASE("export-analytic respects a params file") {
    const std::string params = "/tmp/nmep_cli_params.ini";
    spit(params, "[model]\nbeta_omega = 0.5\n[initial]\nrho01 = 0.25j\n");
    const std::string out = "/tmp/nmep_cli_export2.csv";
    CHECK(run("export-analytic --model spin_star --params " + params +
              " --grid 0:1:2 --output " + out) == 0);
    const auto table = read_csv_file(out);
    CHECK(table.rows[0][table.column_index("rho01_im")] == doctest::Approx(0.25));
    CHECK(table.rows[0][table.column_index("rho01")] == doctest::Approx(0.0));
}

TEST_CASE("export-analytic rejects models without a closed form") {
    CHECK(run("export-analytic --model transmon --grid 0:1:5 --output /tmp/nope.csv") == 2);
    CHECK(run("export-analytic --model spin_star --grid 0:1 --output /tmp/nope.csv") == 2);
    CHECK(run("export-analytic --model spin_star --grid 1:0:5 --output /tmp/nope.csv") == 2);
}

TEST_CASE("simulate runs and is reproducible") {
    const std::string cfg = "/tmp/nmep_cli_run.ini";
    spit(cfg, tiny_config);
    const std::string out1 = "/tmp/nmep_cli_run1.csv";
    const std::string out2 = "/tmp/nmep_cli_run2.csv";
    CHECK(run("simulate --config " + cfg + " --output " + out1) == 0);
    CHECK(run("simulate --config " + cfg + " --output " + out2) == 0);
    CHECK(slurp(out1) == slurp(out2));

    const auto table = read_csv_file(out1);
    const auto t = table.column_index("t");
    REQUIRE(table.rows.size() == 201);
    for (std::size_t r = 1; r < table.rows.size(); ++r)
        CHECK(table.rows[r][t] > table.rows[r - 1][t]);
    CHECK(table.column_index("rho01") < table.columns.size());
    CHECK(table.column_index("sigma_z") < table.columns.size());
    CHECK(table.column_index("n_distinct_members") < table.columns.size());
    CHECK(table.column_index("total_count") < table.columns.size());
    CHECK(!table.trailing_comment.has_value());
    // counts conserved in the file as written
    const auto tc = table.column_index("total_count");
    for (const auto& row : table.rows) CHECK(row[tc] == 2000.0);
}

TEST_CASE("simulate exit codes") {
    CHECK(run("simulate --config /tmp/does_not_exist.ini --output /tmp/x.csv") == 2);

    const std::string bad = "/tmp/nmep_cli_bad.ini";
    spit(bad, "[model]\nkind = bogus\n");
    CHECK(run("simulate --config " + bad + " --output /tmp/x.csv") == 2);

    CHECK(run("simulate --config-file missing") == 2); // unknown flag
    CHECK(run("simulate --help") == 0);
    CHECK(run("") == 2); // subcommand required
}

TEST_CASE("simulate flushes partial output when a run aborts") {
    // mcwf on a model whose rate turns negative: abort mid-run with exit 3
    const std::string cfg = "/tmp/nmep_cli_abort.ini";
    spit(cfg,
         "[model]\n"
         "kind = spin_star\n"
         "[solver]\n"
         "kind = mcwf\n"
         "t_max = 1.2\n"   // gamma goes negative after t = pi/4
         "dt = 1e-3\n"
         "n_ensemble = 500\n"
         "[initial]\n"
         "state = 0.7071067811865476, 0.5+0.5j\n"
         "[output]\n"
         "observables = rho01\n");
    const std::string out = "/tmp/nmep_cli_abort.csv";
    CHECK(run("simulate --config " + cfg + " --output " + out) == 3);
    const auto table = read_csv_file(out);
    CHECK(!table.rows.empty());
    REQUIRE(table.trailing_comment.has_value());
    CHECK(table.trailing_comment->find("terminated:") != std::string::npos);
    // stopped near the sign change of the rate, well before t_max
    CHECK(table.rows.back()[table.column_index("t")] < 1.0);
}

TEST_CASE("compare verdicts") {
    const std::string a = "/tmp/nmep_cmp_a.csv";
    const std::string b = "/tmp/nmep_cmp_b.csv";
    const std::string c = "/tmp/nmep_cmp_c.csv";
    spit(a, "t,v\n0,1\n1,2\n");
    spit(b, "t,v\n0,1.05\n1,2\n");
    spit(c, "t,v\n0,1\n0.5,2\n");
    CHECK(run("compare --a " + a + " --b " + a + " --columns v --tol 0") == 0);
    CHECK(run("compare --a " + a + " --b " + b + " --columns v --tol 0.1") == 0);
    CHECK(run("compare --a " + a + " --b " + b + " --columns v --tol 0.01") == 1);
    CHECK(run("compare --a " + a + " --b " + c + " --columns v --tol 1") == 2);
    CHECK(run("compare --a " + a + " --b /tmp/missing.csv --columns v --tol 1") == 2);
    CHECK(run("compare --a " + a + " --b " + b + " --columns w --tol 1") == 2);
}

TEST_CASE("csv round trip through the library writer") {
    TimeSeries s;
    s.observable_names = {"x"};
    s.times = {0.0, 0.1};
    s.observables = {{cplx(0.1234567890123, -2.0)}, {cplx(1e-300, 3.5)}};
    s.distinct_members = {1, 2};
    s.total_counts = {10, 10};
    const std::string path = "/tmp/nmep_roundtrip.csv";
    write_csv_file(path, s);
    const auto table = read_csv_file(path);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0][table.column_index("x")] == 0.1234567890123);
    CHECK(table.rows[0][table.column_index("x_im")] == -2.0);
    CHECK(table.rows[1][table.column_index("x")] == 1e-300);
}
