// Command-line front end: simulate / compare / export-analytic.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "nmep/config.hpp"
#include "nmep/reference.hpp"
#include "nmep/solvers.hpp"
#include "nmep/util.hpp"

namespace {

unsigned worker_threads() {
    if (const char* env = std::getenv("NMEP_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return static_cast<unsigned>(n);
        } catch (...) {
        }
        std::cerr << "warning: ignoring bad NMEP_THREADS value '" << env << "'\n";
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

int run_simulate(const std::string& config_path, const std::string& output_path) {
    nmep::RunConfig rc;
    try {
        rc = nmep::load_run_config(config_path);
    } catch (const nmep::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    const auto start = std::chrono::steady_clock::now();
    auto finish = [&](const nmep::TimeSeries& s, std::size_t distinct) {
        nmep::write_csv_file(output_path, s);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << "final distinct members: " << distinct
                  << ", wall time: " << nmep::format_double(secs) << " s\n";
    };

    try {
        if (rc.solver == nmep::RunSolver::rk4) {
            try {
                const auto res = nmep::rk4_run(rc.model, rc.ref_config, rc.initial_density,
                                               rc.observables);
                finish(res.series, 1);
            } catch (const nmep::Rk4Aborted& e) {
                finish(e.partial.series, 1);
                std::cerr << "run terminated: " << e.what() << "\n";
                return 3;
            }
        } else {
            rc.solver_config.n_threads = worker_threads();
            try {
                const auto res =
                    nmep::run(rc.model, rc.solver_config, rc.initial_state, rc.observables);
                finish(res.series, res.final_ensemble.members.size());
            } catch (const nmep::RunAborted& e) {
                finish(e.partial.series, e.partial.final_ensemble.members.size());
                std::cerr << "run terminated: " << e.what() << "\n";
                return 3;
            }
        }
    } catch (const nmep::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int run_compare(const std::string& a_path, const std::string& b_path, const std::string& columns,
                double tol) {
    try {
        const auto a = nmep::read_csv_file(a_path);
        const auto b = nmep::read_csv_file(b_path);
        std::vector<std::string> cols;
        for (const auto& c : nmep::split(columns, ','))
            if (!nmep::trim(c).empty()) cols.push_back(nmep::trim(c));
        if (cols.empty()) {
            std::cerr << "compare: no columns requested\n";
            return 2;
        }
        const auto report = nmep::compare_series(a, b, cols);
        bool ok = true;
        for (const auto& d : report) {
            std::cout << d.column << ": max_abs=" << nmep::format_double(d.max_abs)
                      << " rmse=" << nmep::format_double(d.rmse) << "\n";
            if (!(d.max_abs <= tol)) ok = false;
        }
        return ok ? 0 : 1;
    } catch (const nmep::Error& e) {
        std::cerr << "compare error: " << e.what() << "\n";
        return 2;
    }
}

int run_export(const std::string& model, const std::string& params_path, const std::string& grid,
               const std::string& output_path) {
    if (model != "spin_star") {
        std::cerr << "export-analytic: no closed-form solution for model '" << model << "'\n";
        return 2;
    }
    try {
        nmep::SpinStarParams p;
        nmep::cplx rho01 = 0.5;
        if (!params_path.empty()) {
            const auto ini = nmep::IniFile::load(params_path);
            auto pick = [&ini](const std::string& key, double fallback) {
                if (ini.has("model", key)) return ini.get_double("model", key);
                return ini.get_double_or("", key, fallback);
            };
            p.alpha = pick("alpha", p.alpha);
            p.n_spins = static_cast<int>(std::llround(pick("n_spins", p.n_spins)));
            p.beta_omega = pick("beta_omega", p.beta_omega);
            if (ini.has("initial", "rho01"))
                rho01 = nmep::parse_complex(ini.get("initial", "rho01"));
            else if (ini.has("", "rho01"))
                rho01 = nmep::parse_complex(ini.get("", "rho01"));
        }

        const auto parts = nmep::split(grid, ':');
        if (parts.size() != 3) throw nmep::ConfigError("grid must be t0:t_max:n");
        const double t0 = std::stod(parts[0]);
        const double t_max = std::stod(parts[1]);
        const long n = std::stol(parts[2]);
        if (n < 2 || !(t_max > t0)) throw nmep::ConfigError("grid needs t_max > t0 and n >= 2");

        nmep::TimeSeries s;
        s.observable_names = {"rho01", "abs_f", "f_re", "f_im"};
        for (long i = 0; i < n; ++i) {
            const double t = t0 + (t_max - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
            const nmep::cplx f = nmep::spin_star_f(p, t);
            s.times.push_back(t);
            s.observables.push_back({rho01 * f, std::abs(f), f.real(), f.imag()});
            s.distinct_members.push_back(1);
            s.total_counts.push_back(1);
        }
        nmep::write_csv_file(output_path, s);
        return 0;
    } catch (const nmep::Error& e) {
        std::cerr << "export-analytic error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "export-analytic error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte-Carlo toolkit for time-local (non-)Markovian master equations"};
    app.require_subcommand(1);

    std::string config_path, output_path;
    auto* simulate = app.add_subcommand("simulate", "Run a solver described by an INI config");
    simulate->add_option("--config", config_path, "run configuration")->required();
    simulate->add_option("--output", output_path, "output CSV path")->required();

    std::string a_path, b_path, columns;
    double tol = 0.0;
    auto* compare = app.add_subcommand("compare", "Column-wise comparison of two series files");
    compare->add_option("--a", a_path)->required();
    compare->add_option("--b", b_path)->required();
    compare->add_option("--columns", columns, "comma-separated column names")->required();
    compare->add_option("--tol", tol, "max-abs tolerance")->required();

    std::string model, params_path, grid, export_output;
    auto* exporter = app.add_subcommand("export-analytic", "Write a closed-form solution series");
    exporter->add_option("--model", model)->required();
    exporter->add_option("--params", params_path, "INI file with model parameters");
    exporter->add_option("--grid", grid, "t0:t_max:n")->required();
    exporter->add_option("--output", export_output)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (simulate->parsed()) return run_simulate(config_path, output_path);
    if (compare->parsed()) return run_compare(a_path, b_path, columns, tol);
    return run_export(model, params_path, grid, export_output);
}
