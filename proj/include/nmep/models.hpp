#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nmep/core.hpp"

namespace nmep {

/// One dissipative channel: jump operator A_l(t) and real rate gamma_l(t).
/// Rates may be negative in the non-Markovian regime.
struct JumpChannel {
    std::function<Matrix(double)> operator_at;
    std::function<double(double)> rate_at;
};

/// Time-local Lindblad-type model: H_S(t) plus jump channels.
struct LindbladModel {
    std::size_t dim = 0;
    std::function<Matrix(double)> hamiltonian_at;
    std::vector<JumpChannel> channels;
};

/// H_S(t) - (i/2) Sum_l gamma_l(t) A_l^dag(t) A_l(t); non-Hermitian.
Matrix effective_hamiltonian(const LindbladModel& m, double t);

// ---------------------------------------------------------------------------
// Spin-star: central spin ZZ-coupled to a bath of n_spins identical spins.
// Pure dephasing with a closed-form solution, used as the analytic oracle.

struct SpinStarParams {
    double alpha = 1.0;    // coupling strength, unit of frequency
    int n_spins = 4;
    double beta_omega = 2.0;
};

double spin_star_rate(const SpinStarParams& p, double t);
double spin_star_lamb_shift(const SpinStarParams& p, double t);
/// Dephasing factor f(t) multiplying the initial coherence.
cplx spin_star_f(const SpinStarParams& p, double t);

/// dim-2 model: H_S(t) = delta(t) sigma_z, single channel (sigma_z, gamma(t)).
LindbladModel spin_star_model(const SpinStarParams& p);

/// Exact reduced state: diagonal of rho0 unchanged, off-diagonals scaled by
/// f(t) and f*(t).
DensityMatrix spin_star_analytic(const SpinStarParams& p, const DensityMatrix& rho0, double t);

// ---------------------------------------------------------------------------
// Transmon qubit under 1/f^alpha noise, in dimensionless time s.

struct TransmonParams {
    double alpha = 0.9;          // spectral exponent, 0 < alpha < 2
    double c = 1e-4;             // dimensionless system-environment coupling
    double s_max = 2.0;          // end of the dimensionless time window
    std::size_t table_points = 40001;
};

/// Prebuilt tables of f_cos(x) = int_0^{x^alpha} cos(u^{1/alpha}) du and the
/// sine analogue on a uniform grid over [0, x_max], linearly interpolated.
/// Evaluated through the substitution u = w^alpha; the endpoint singularity
/// of the substituted integrand at w -> 0 (alpha < 1) is handled with graded
/// panels.
class TransmonTables {
public:
    TransmonTables(double alpha, double x_max, std::size_t points);

    double f_cos(double x) const;
    double f_sin(double x) const;
    double x_max() const { return x_max_; }
    std::size_t points() const { return fcos_.size(); }

private:
    double lookup(const std::vector<double>& tab, double x) const;
    double x_max_ = 0.0;
    double dx_ = 0.0;
    std::vector<double> fcos_, fsin_;
};

struct TransmonRates {
    double gamma_plus = 0.0;
    double gamma_minus = 0.0;
    double lamb_shift = 0.0;
};

/// Effective channels at time s after diagonalizing the coefficient matrix:
/// rates 2c*D_ll, operators A_l = U^T (sigma_plus; sigma_minus), and the
/// Hamiltonian -(pi + c*lamb_shift) sigma_z. basis holds U(s) itself.
struct TransmonChannels {
    std::array<double, 2> rates{};
    std::array<Matrix, 2> operators;
    Matrix hamiltonian;
    Matrix basis;
};

class TransmonModel {
public:
    explicit TransmonModel(const TransmonParams& p);

    const TransmonParams& params() const { return p_; }
    const TransmonTables& tables() const { return tables_; }

    /// Coefficient functions of the coefficient matrix; s in [0, s_max].
    TransmonRates rates(double s) const;

    /// Eigen-branch order is descending at the first query and then follows
    /// continuity by overlap with the previous query, so call with
    /// non-decreasing s along a trajectory. A smaller s resets the tracking.
    TransmonChannels channels(double s);

private:
    TransmonParams p_;
    TransmonTables tables_;
    double prefactor_; // 2 Gamma(alpha-1) / alpha

    double cached_s_;
    TransmonChannels cached_;
    bool has_prev_ = false;
    double prev_s_ = 0.0;
    Matrix prev_u_;
};

/// LindbladModel facade over a shared TransmonModel (the closures share the
/// branch-continuity state, so drive it with non-decreasing times).
LindbladModel transmon_lindblad_model(std::shared_ptr<TransmonModel> m);
LindbladModel transmon_lindblad_model(const TransmonParams& p);

// ---------------------------------------------------------------------------
// Tabulated models: constant operators with sampled, linearly interpolated
// rates, and a constant or sampled Hamiltonian.

struct TabulatedChannel {
    Matrix op;
    std::vector<std::pair<double, double>> rates; // (t, gamma); one entry = constant
};

struct TabulatedModelSpec {
    std::size_t dim = 0;
    std::vector<TabulatedChannel> channels;
    std::vector<std::pair<double, Matrix>> hamiltonian; // one entry = constant
};

LindbladModel tabulated_model(TabulatedModelSpec spec);

/// Text format: header "dim=<n> channels=<k>", then per channel a "channel:"
/// block with the n x n operator (complex "re+imj" literals) and a "rates:"
/// block of "t value" lines, then "hamiltonian:" with either a matrix or
/// "t <value>" + matrix sample groups. '#' starts a comment.
TabulatedModelSpec parse_tabulated_model(std::istream& in, const std::string& name);
TabulatedModelSpec load_tabulated_model(const std::string& path);

} // namespace nmep
