#include "nmep/reference.hpp"

#include <cmath>

#include "nmep/util.hpp"

namespace nmep {

DensityMatrix generator_rhs(const LindbladModel& m, double t, const DensityMatrix& rho) {
    if (rho.dim() != m.dim) throw DimensionMismatch("generator_rhs: state dim mismatch");
    const Matrix h = m.hamiltonian_at(t);
    Matrix out = cplx(0.0, -1.0) * (h * rho - rho * h);
    for (const auto& ch : m.channels) {
        const Matrix a = ch.operator_at(t);
        const double g = ch.rate_at(t);
        if (g == 0.0) continue;
        const Matrix ada = a.adjoint() * a;
        out += cplx(g) * (a * rho * a.adjoint() - cplx(0.5) * (ada * rho + rho * ada));
    }
    return out;
}

namespace {

cplx observable_value(const Matrix& op, const DensityMatrix& rho) {
    return (op * rho).trace();
}

void symmetrize(DensityMatrix& rho) {
    for (std::size_t i = 0; i < rho.dim(); ++i) {
        rho(i, i) = rho(i, i).real();
        for (std::size_t j = i + 1; j < rho.dim(); ++j) {
            const cplx m = 0.5 * (rho(i, j) + std::conj(rho(j, i)));
            rho(i, j) = m;
            rho(j, i) = std::conj(m);
        }
    }
}

} // namespace

Rk4Result rk4_run(const LindbladModel& m, const ReferenceConfig& cfg, const DensityMatrix& rho0,
                  const std::vector<std::pair<std::string, Matrix>>& observables) {
    if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(cfg.t_max > cfg.t0)) throw ConfigError("t_max must exceed t0");
    if (cfg.record_stride == 0) throw ConfigError("record stride must be positive");
    if (rho0.dim() != m.dim) throw DimensionMismatch("initial state dim does not match the model");
    if (!rho0.is_hermitian())
        throw NotHermitian("initial density matrix is not Hermitian");
    for (const auto& [nm, op] : observables)
        if (op.dim() != m.dim)
            throw DimensionMismatch("observable '" + nm + "' dim does not match the model");

    const std::size_t n_steps =
        static_cast<std::size_t>(std::ceil((cfg.t_max - cfg.t0) / cfg.dt - 1e-9));

    Rk4Result res;
    TimeSeries& s = res.series;
    for (const auto& [nm, op] : observables) s.observable_names.push_back(nm);
    s.observable_names.push_back("trace");
    s.observable_names.push_back("herm_defect");
    DensityMatrix rho = rho0;

    auto record = [&](std::size_t i) {
        s.times.push_back(cfg.t0 + static_cast<double>(i) * cfg.dt);
        std::vector<cplx> vals;
        vals.reserve(observables.size() + 2);
        for (const auto& [nm, op] : observables) vals.push_back(observable_value(op, rho));
        vals.push_back(rho.trace());
        vals.push_back(rho.hermiticity_defect());
        s.observables.push_back(std::move(vals));
        s.distinct_members.push_back(1);
        s.total_counts.push_back(1);
        if (cfg.monitor_positivity) s.min_eigenvalues.push_back(min_eigenvalue(rho));
        res.states.push_back(rho);
    };

    record(0);
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double t = cfg.t0 + static_cast<double>(i) * cfg.dt;
        const double h = cfg.dt;
        try {
            const Matrix k1 = generator_rhs(m, t, rho);
            const Matrix k2 = generator_rhs(m, t + h / 2.0, rho + cplx(h / 2.0) * k1);
            const Matrix k3 = generator_rhs(m, t + h / 2.0, rho + cplx(h / 2.0) * k2);
            const Matrix k4 = generator_rhs(m, t + h, rho + cplx(h) * k3);
            rho += cplx(h / 6.0) * (k1 + cplx(2.0) * k2 + cplx(2.0) * k3 + k4);
            symmetrize(rho);
        } catch (const Error& err) {
            s.terminated = true;
            s.termination_reason = err.what();
            s.termination_time = t;
            res.final_state = rho;
            throw Rk4Aborted(err.what(), std::move(res));
        }
        if ((i + 1) % cfg.record_stride == 0 || i + 1 == n_steps) record(i + 1);
    }
    res.final_state = rho;
    return res;
}

std::optional<PositivityViolation> positivity_report(const TimeSeries& s, double tol) {
    for (std::size_t r = 0; r < s.min_eigenvalues.size(); ++r)
        if (s.min_eigenvalues[r] < -tol) return PositivityViolation{s.times[r], s.min_eigenvalues[r]};
    return std::nullopt;
}

std::vector<ColumnDiff> compare_series(const CsvTable& a, const CsvTable& b,
                                       const std::vector<std::string>& columns) {
    if (a.rows.size() != b.rows.size())
        throw GridMismatch("tables have " + std::to_string(a.rows.size()) + " and " +
                           std::to_string(b.rows.size()) + " rows");
    const std::size_t ta = a.column_index("t");
    const std::size_t tb = b.column_index("t");
    for (std::size_t r = 0; r < a.rows.size(); ++r)
        if (std::abs(a.rows[r][ta] - b.rows[r][tb]) > 1e-12)
            throw GridMismatch("time grids differ at row " + std::to_string(r) + ": " +
                               format_double(a.rows[r][ta]) + " vs " +
                               format_double(b.rows[r][tb]));

    std::vector<ColumnDiff> out;
    for (const auto& col : columns) {
        const std::size_t ca = a.column_index(col);
        const std::size_t cb = b.column_index(col);
        double max_abs = 0.0, sq = 0.0;
        for (std::size_t r = 0; r < a.rows.size(); ++r) {
            const double d = std::abs(a.rows[r][ca] - b.rows[r][cb]);
            max_abs = std::max(max_abs, d);
            sq += d * d;
        }
        const double rmse = a.rows.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(a.rows.size()));
        out.push_back({col, max_abs, rmse});
    }
    return out;
}

} // namespace nmep
