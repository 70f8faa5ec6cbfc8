#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nmep/models.hpp"
#include "nmep/series.hpp"

namespace nmep {

struct ReferenceConfig {
    double t0 = 0.0;
    double t_max = 1.0;
    double dt = 1e-3;
    std::size_t record_stride = 1;
    bool monitor_positivity = false;
    double positivity_tol = 1e-9;
};

/// Right-hand side of the time-local master equation:
/// -i[H, rho] + Sum_l gamma_l (A_l rho A_l^dag - {A_l^dag A_l, rho} / 2).
DensityMatrix generator_rhs(const LindbladModel& m, double t, const DensityMatrix& rho);

/// Dense deterministic reference: classic fixed-step RK4 on the generator,
/// with a Hermitian symmetrization after every step. states holds the density
/// matrix at every recorded time.
struct Rk4Result {
    TimeSeries series;
    std::vector<DensityMatrix> states;
    DensityMatrix final_state;
};

struct Rk4Aborted : Error {
    Rk4Aborted(const std::string& msg, Rk4Result p) : Error(msg), partial(std::move(p)) {}
    Rk4Result partial;
};

Rk4Result rk4_run(const LindbladModel& m, const ReferenceConfig& cfg, const DensityMatrix& rho0,
                  const std::vector<std::pair<std::string, Matrix>>& observables);

/// First recorded time whose smallest eigenvalue drops below -tol.
struct PositivityViolation {
    double time;
    double eigenvalue;
};
std::optional<PositivityViolation> positivity_report(const TimeSeries& s, double tol);

/// Column-wise difference of two tables sharing a time grid (per-row time
/// mismatch beyond 1e-12 or different row counts throw GridMismatch).
struct ColumnDiff {
    std::string column;
    double max_abs;
    double rmse;
};
std::vector<ColumnDiff> compare_series(const CsvTable& a, const CsvTable& b,
                                       const std::vector<std::string>& columns);

} // namespace nmep
