#include "nmep/config.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>

#include "nmep/util.hpp"

namespace nmep {

IniFile IniFile::parse(std::istream& in, const std::string& name) {
    IniFile f;
    f.name_ = name;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t cpos = line.find('#');
        if (cpos != std::string::npos) line.erase(cpos);
        const std::string text = trim(line);
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                throw ConfigError(name + ":" + std::to_string(lineno) + ": unterminated section");
            section = trim(text.substr(1, text.size() - 2));
            if (section.empty())
                throw ConfigError(name + ":" + std::to_string(lineno) + ": empty section name");
            f.sections_[section];
            continue;
        }
        const std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(name + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(text.substr(0, eq));
        if (key.empty())
            throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key");
        f.sections_[section][key] = trim(text.substr(eq + 1));
    }
    return f;
}

IniFile IniFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    return parse(in, path);
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string IniFile::get(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    if (s != sections_.end()) {
        auto k = s->second.find(key);
        if (k != s->second.end()) return k->second;
    }
    throw ConfigError(name_ + ": missing key '" + key + "' in section [" + section + "]");
}

std::string IniFile::get_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double IniFile::get_double(const std::string& section, const std::string& key) const {
    const std::string v = get(section, key);
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        throw ConfigError(name_ + ": key '" + key + "' in [" + section + "]: bad number '" + v + "'");
    }
}

double IniFile::get_double_or(const std::string& section, const std::string& key,
                              double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

std::int64_t IniFile::get_int(const std::string& section, const std::string& key) const {
    const std::string v = get(section, key);
    try {
        std::size_t used = 0;
        const std::int64_t i = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (...) {
        throw ConfigError(name_ + ": key '" + key + "' in [" + section + "]: bad integer '" + v +
                          "'");
    }
}

std::int64_t IniFile::get_int_or(const std::string& section, const std::string& key,
                                 std::int64_t fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

namespace {

bool parse_bool(const std::string& v, const std::string& what) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError(what + ": bad boolean '" + v + "'");
}

std::size_t parse_index(const std::string& digits, std::size_t dim, const std::string& name) {
    for (char c : digits)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw ConfigError("unknown observable '" + name + "'");
    const std::size_t i = static_cast<std::size_t>(std::stoul(digits));
    if (i >= dim)
        throw ConfigError("observable '" + name + "' indexes outside dim " + std::to_string(dim));
    return i;
}

Vec parse_state(const std::string& text) {
    Vec v;
    for (const auto& part : split(text, ',')) v.push_back(parse_complex(trim(part)));
    return v;
}

Matrix parse_density(const std::string& text, const std::string& name) {
    const auto rows = split(text, ';');
    Matrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto cells = split(rows[i], ',');
        if (cells.size() != rows.size())
            throw ConfigError(name + ": density matrix must be square");
        for (std::size_t j = 0; j < cells.size(); ++j) m(i, j) = parse_complex(trim(cells[j]));
    }
    return m;
}

} // namespace

Matrix observable_by_name(const std::string& name, std::size_t dim) {
    if (name == "identity") return Matrix::identity(dim);
    if (name == "sigma_x" || name == "sigma_y" || name == "sigma_z") {
        if (dim != 2) throw ConfigError("observable '" + name + "' needs a two-level model");
        if (name == "sigma_x") return sigma_x();
        if (name == "sigma_y") return sigma_y();
        return sigma_z();
    }
    if (name.rfind("pop", 0) == 0 && name.size() > 3) {
        const std::size_t i = parse_index(name.substr(3), dim, name);
        Matrix m(dim);
        m(i, i) = 1.0;
        return m;
    }
    // rhoIJ records the matrix element rho_IJ: tr(|J><I| rho) = rho_IJ.
    if (name.rfind("rho", 0) == 0 && name.size() == 5) {
        const std::size_t i = parse_index(name.substr(3, 1), dim, name);
        const std::size_t j = parse_index(name.substr(4, 1), dim, name);
        Matrix m(dim);
        m(j, i) = 1.0;
        return m;
    }
    throw ConfigError("unknown observable '" + name + "'");
}

RunConfig parse_run_config(std::istream& in, const std::string& name) {
    const IniFile ini = IniFile::parse(in, name);
    RunConfig rc;

    const std::string model_kind = ini.get("model", "kind");
    if (model_kind == "spin_star") {
        SpinStarParams p;
        p.alpha = ini.get_double_or("model", "alpha", p.alpha);
        p.n_spins = static_cast<int>(ini.get_int_or("model", "n_spins", p.n_spins));
        p.beta_omega = ini.get_double_or("model", "beta_omega", p.beta_omega);
        rc.model = spin_star_model(p);
    } else if (model_kind == "transmon") {
        TransmonParams p;
        p.alpha = ini.get_double_or("model", "alpha", p.alpha);
        p.c = ini.get_double_or("model", "c", p.c);
        p.s_max = ini.get_double_or("model", "s_max", p.s_max);
        p.table_points =
            static_cast<std::size_t>(ini.get_int_or("model", "table_points",
                                                    static_cast<std::int64_t>(p.table_points)));
        rc.model = transmon_lindblad_model(p);
    } else if (model_kind == "tabulated") {
        std::filesystem::path file = ini.get("model", "file");
        if (file.is_relative()) file = std::filesystem::path(name).parent_path() / file;
        rc.model = tabulated_model(load_tabulated_model(file.string()));
    } else {
        throw ConfigError(name + ": unknown model kind '" + model_kind + "'");
    }

    const std::string solver_kind = ini.get("solver", "kind");
    if (solver_kind == "mcwf") rc.solver = RunSolver::mcwf;
    else if (solver_kind == "nmep") rc.solver = RunSolver::nmep;
    else if (solver_kind == "nmqj") rc.solver = RunSolver::nmqj;
    else if (solver_kind == "rk4") rc.solver = RunSolver::rk4;
    else throw ConfigError(name + ": unknown solver kind '" + solver_kind + "'");

    const double t0 = ini.get_double_or("solver", "t0", 0.0);
    const double t_max = ini.get_double("solver", "t_max");
    const double dt = ini.get_double("solver", "dt");
    const bool monitor = parse_bool(ini.get_or("solver", "monitor_positivity", "0"),
                                    name + ": monitor_positivity");
    const auto record_stride =
        static_cast<std::size_t>(ini.get_int_or("solver", "record_stride", 1));

    if (rc.solver == RunSolver::rk4) {
        rc.ref_config.t0 = t0;
        rc.ref_config.t_max = t_max;
        rc.ref_config.dt = dt;
        rc.ref_config.record_stride = record_stride;
        rc.ref_config.monitor_positivity = monitor;
        rc.ref_config.positivity_tol =
            ini.get_double_or("solver", "positivity_tol", rc.ref_config.positivity_tol);
        rc.initial_density = parse_density(ini.get("initial", "density"), name);
        if (rc.initial_density.dim() != rc.model.dim)
            throw ConfigError(name + ": initial density dim does not match the model");
    } else {
        SolverConfig& sc = rc.solver_config;
        sc.t0 = t0;
        sc.t_max = t_max;
        sc.dt = dt;
        sc.record_stride = record_stride;
        sc.monitor_positivity = monitor;
        sc.kind = rc.solver == RunSolver::mcwf   ? SolverKind::mcwf
                  : rc.solver == RunSolver::nmqj ? SolverKind::nmqj
                                                 : SolverKind::nmep;
        sc.n_ensemble = ini.get_int("solver", "n_ensemble");
        sc.seed = static_cast<std::uint64_t>(ini.get_int_or("solver", "seed", 0));
        sc.consolidation_tol =
            ini.get_double_or("solver", "consolidation_tol", sc.consolidation_tol);
        sc.consolidation_stride = static_cast<std::size_t>(
            ini.get_int_or("solver", "consolidation_stride",
                           static_cast<std::int64_t>(sc.consolidation_stride)));
        rc.initial_state = parse_state(ini.get("initial", "state"));
        if (rc.initial_state.size() != rc.model.dim)
            throw ConfigError(name + ": initial state dim does not match the model");
    }

    for (const auto& part : split(ini.get("output", "observables"), ',')) {
        const std::string obs = trim(part);
        if (obs.empty()) throw ConfigError(name + ": empty observable name");
        rc.observables.emplace_back(obs, observable_by_name(obs, rc.model.dim));
    }
    if (rc.observables.empty()) throw ConfigError(name + ": no observables requested");
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    return parse_run_config(in, path);
}

} // namespace nmep
