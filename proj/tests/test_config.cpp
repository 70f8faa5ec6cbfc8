#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nmep/config.hpp"

using namespace nmep;

TEST_CASE("ini parsing") {
    std::istringstream in(
        "top = 1\n"
        "[solver]\n"
        "kind = nmep   # trailing comment\n"
        "dt = 1e-3\n"
        "n_ensemble = 5000\n"
        "[empty]\n");
    const IniFile f = IniFile::parse(in, "demo.ini");
    CHECK(f.get("", "top") == "1");
    CHECK(f.get("solver", "kind") == "nmep");
    CHECK(f.get_double("solver", "dt") == 1e-3);
    CHECK(f.get_int("solver", "n_ensemble") == 5000);
    CHECK(f.get_or("solver", "missing", "fallback") == "fallback");
    CHECK(f.get_double_or("solver", "missing", 2.5) == 2.5);
    CHECK(f.has("empty", "anything") == false);
    CHECK_THROWS_AS(f.get("solver", "missing"), ConfigError);
    CHECK_THROWS_AS(f.get_double("solver", "kind"), ConfigError);
    CHECK_THROWS_AS(f.get_int("solver", "dt"), ConfigError);
}

TEST_CASE("ini errors carry line numbers") {
    auto expect_error = [](const std::string& text, const std::string& fragment) {
        std::istringstream in(text);
        try {
            IniFile::parse(in, "bad.ini");
            FAIL("expected ConfigError for: ", text);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };
    expect_error("a = 1\n[open\n", "bad.ini:2");
    expect_error("\nnot a pair\n", "bad.ini:2");
    expect_error("= value\n", "bad.ini:1");
    expect_error("[]\n", "empty section");
}

TEST_CASE("semicolons are data, not comments") {
    std::istringstream in("[initial]\ndensity = 1, 0; 0, 0\n");
    const IniFile f = IniFile::parse(in, "d.ini");
    CHECK(f.get("initial", "density") == "1, 0; 0, 0");
}

TEST_CASE("observables by name") {
    CHECK((observable_by_name("sigma_x", 2) - sigma_x()).max_abs() == 0.0);
    CHECK((observable_by_name("sigma_y", 2) - sigma_y()).max_abs() == 0.0);
    CHECK((observable_by_name("sigma_z", 2) - sigma_z()).max_abs() == 0.0);
    CHECK(observable_by_name("identity", 3).trace() == cplx(3.0));

    const Matrix pop2 = observable_by_name("pop2", 3);
    CHECK(pop2(2, 2) == cplx(1.0));
    CHECK(pop2.trace() == cplx(1.0));

    // tr(rho01-observable * rho) must give rho_01 itself
    const Matrix o = observable_by_name("rho01", 2);
    DensityMatrix rho(2);
    rho(0, 0) = 0.6;
    rho(1, 1) = 0.4;
    rho(0, 1) = cplx(0.1, 0.2);
    rho(1, 0) = std::conj(rho(0, 1));
    CHECK((o * rho).trace() == rho(0, 1));

    CHECK_THROWS_AS(observable_by_name("sigma_x", 3), ConfigError);
    CHECK_THROWS_AS(observable_by_name("pop5", 3), ConfigError);
    CHECK_THROWS_AS(observable_by_name("rho03", 2), ConfigError);
    CHECK_THROWS_AS(observable_by_name("popx", 2), ConfigError);
    CHECK_THROWS_AS(observable_by_name("nonsense", 2), ConfigError);
}

TEST_CASE("full stochastic run config") {
    std::istringstream in(
        "[model]\n"
        "kind = spin_star\n"
        "alpha = 1.5\n"
        "n_spins = 6\n"
        "beta_omega = 1.0\n"
        "[solver]\n"
        "kind = nmep\n"
        "t_max = 2.0\n"
        "dt = 1e-3\n"
        "n_ensemble = 4000\n"
        "seed = 11\n"
        "consolidation_tol = 1e-5\n"
        "consolidation_stride = 2\n"
        "record_stride = 5\n"
        "monitor_positivity = yes\n"
        "[initial]\n"
        "state = 0.6, 0.8j\n"
        "[output]\n"
        "observables = rho01, sigma_z\n");
    const RunConfig rc = parse_run_config(in, "run.ini");
    CHECK(rc.solver == RunSolver::nmep);
    CHECK(rc.solver_config.kind == SolverKind::nmep);
    CHECK(rc.solver_config.t_max == 2.0);
    CHECK(rc.solver_config.dt == 1e-3);
    CHECK(rc.solver_config.n_ensemble == 4000);
    CHECK(rc.solver_config.seed == 11);
    CHECK(rc.solver_config.consolidation_tol == 1e-5);
    CHECK(rc.solver_config.consolidation_stride == 2);
    CHECK(rc.solver_config.record_stride == 5);
    CHECK(rc.solver_config.monitor_positivity);
    CHECK(rc.model.dim == 2);
    // alpha = 1.5 must reach the model's rate function
    CHECK(rc.model.channels.size() == 1);
    SpinStarParams p;
    p.alpha = 1.5;
    p.n_spins = 6;
    p.beta_omega = 1.0;
    CHECK(rc.model.channels[0].rate_at(0.3) == doctest::Approx(spin_star_rate(p, 0.3)));
    REQUIRE(rc.initial_state.size() == 2);
    CHECK(rc.initial_state[0] == cplx(0.6));
    CHECK(rc.initial_state[1] == cplx(0.0, 0.8));
    REQUIRE(rc.observables.size() == 2);
    CHECK(rc.observables[0].first == "rho01");
    CHECK(rc.observables[1].first == "sigma_z");
}

TEST_CASE("full rk4 run config") {
    std::istringstream in(
        "[model]\n"
        "kind = spin_star\n"
        "[solver]\n"
        "kind = rk4\n"
        "t0 = 0.5\n"
        "t_max = 1.5\n"
        "dt = 1e-3\n"
        "monitor_positivity = on\n"
        "positivity_tol = 1e-8\n"
        "[initial]\n"
        "density = 0.5, 0.5; 0.5, 0.5\n"
        "[output]\n"
        "observables = rho01\n");
    const RunConfig rc = parse_run_config(in, "run.ini");
    CHECK(rc.solver == RunSolver::rk4);
    CHECK(rc.ref_config.t0 == 0.5);
    CHECK(rc.ref_config.t_max == 1.5);
    CHECK(rc.ref_config.monitor_positivity);
    CHECK(rc.ref_config.positivity_tol == 1e-8);
    CHECK(rc.initial_state.empty());
    CHECK(rc.initial_density.dim() == 2);
    CHECK(rc.initial_density(0, 1) == cplx(0.5));
}

TEST_CASE("config validation errors") {
    auto expect_error = [](const std::string& text, const std::string& fragment) {
        std::istringstream in(text);
        try {
            parse_run_config(in, "run.ini");
            FAIL("expected ConfigError, fragment: ", fragment);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };
    const std::string model = "[model]\nkind = spin_star\n";
    const std::string solver = "[solver]\nkind = nmep\nt_max = 1\ndt = 1e-3\nn_ensemble = 10\n";
    const std::string state = "[initial]\nstate = 1, 0\n";
    const std::string output = "[output]\nobservables = rho01\n";

    expect_error("[model]\nkind = bogus\n" + solver + state + output, "unknown model kind");
    expect_error(model + "[solver]\nkind = bogus\nt_max = 1\ndt = 1e-3\n" + state + output,
                 "unknown solver kind");
    expect_error(model + solver + output, "missing key 'state'");
    expect_error(model + "[solver]\nkind = rk4\nt_max = 1\ndt = 1e-3\n" + state + output,
                 "missing key 'density'");
    expect_error(model + solver + "[initial]\nstate = 1, 0, 0\n" + output,
                 "dim does not match");
    expect_error(model + "[solver]\nkind = rk4\nt_max = 1\ndt = 1e-3\n" +
                     "[initial]\ndensity = 1, 0, 0; 0, 0, 0\n" + output,
                 "square");
    expect_error(model + solver + state + "[output]\nobservables = rho01,,sigma_z\n",
                 "empty observable");
    expect_error(model + solver + state, "missing key 'observables'");
}

TEST_CASE("tabulated model resolved relative to the config path") {
    // written against a file path that does not exist: the error must mention
    // the resolved location
    std::istringstream in(
        "[model]\nkind = tabulated\nfile = missing_model.txt\n"
        "[solver]\nkind = nmep\nt_max = 1\ndt = 1e-3\nn_ensemble = 10\n"
        "[initial]\nstate = 1, 0\n"
        "[output]\nobservables = rho01\n");
    try {
        parse_run_config(in, "/nonexistent/dir/run.ini");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("/nonexistent/dir/missing_model.txt") !=
              std::string::npos);
    }
}
