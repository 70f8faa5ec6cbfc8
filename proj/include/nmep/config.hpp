#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nmep/models.hpp"
#include "nmep/reference.hpp"
#include "nmep/solvers.hpp"

namespace nmep {

/// Minimal INI reader: [section] headers, key = value pairs, '#' comments
/// (';' stays available as a data separator). Errors carry the line number.
class IniFile {
public:
    static IniFile parse(std::istream& in, const std::string& name);
    static IniFile load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    /// Throw ConfigError when the key is missing.
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key) const;
    std::int64_t get_int_or(const std::string& section, const std::string& key,
                            std::int64_t fallback) const;

private:
    std::string name_;
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

enum class RunSolver { mcwf, nmep, nmqj, rk4 };

/// Fully resolved run description built from an INI file:
///   [model]   kind = spin_star | transmon | tabulated, plus model parameters
///   [solver]  kind, t_max, dt, n_ensemble, seed, ...
///   [initial] state = comma-separated amplitudes (stochastic solvers) or
///             density = rows separated by ';' (rk4)
///   [output]  observables = comma-separated names
struct RunConfig {
    RunSolver solver = RunSolver::nmep;
    SolverConfig solver_config;   // stochastic solvers
    ReferenceConfig ref_config;   // rk4

    LindbladModel model;
    Vec initial_state;            // empty when a density matrix was given
    DensityMatrix initial_density;
    std::vector<std::pair<std::string, Matrix>> observables;
};

/// Observables by name: sigma_x, sigma_y, sigma_z, identity, popN (population
/// of basis state N) and rhoIJ (matrix element rho_IJ, realized as |J><I|).
Matrix observable_by_name(const std::string& name, std::size_t dim);

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(std::istream& in, const std::string& name);

} // namespace nmep
