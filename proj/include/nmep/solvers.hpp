#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nmep/ensemble.hpp"
#include "nmep/models.hpp"
#include "nmep/series.hpp"

namespace nmep {

enum class SolverKind { mcwf, nmep, nmqj };

struct SolverConfig {
    double t0 = 0.0;
    double t_max = 1.0;
    double dt = 1e-3;
    std::int64_t n_ensemble = 1000;
    std::uint64_t seed = 0;
    double consolidation_tol = 1e-6;
    std::size_t consolidation_stride = 1;
    std::size_t record_stride = 1;
    SolverKind kind = SolverKind::nmep;
    unsigned n_threads = 1;
    bool monitor_positivity = false;
};

/// Deterministic counter-based generator. Every (seed, step, member, channel)
/// tuple gets an independent stream, so results do not depend on thread count
/// or on the order members are processed in.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t step, std::uint64_t member,
                 std::uint64_t channel_key);
    /// Uniform double in the open interval (0, 1).
    double uniform();

private:
    std::uint64_t state_;
};

/// Hash of the operator's entries (bit patterns, rate excluded). Channels
/// whose operators coincide at time t therefore share random streams, which
/// makes a +gamma / -gamma channel pair cancel exactly.
std::uint64_t channel_signature(const Matrix& op);

/// Exact Binomial(n, p) sample by skipping geometric failure runs; O(n p + 1)
/// draws from the stream.
std::int64_t sample_binomial(std::int64_t n, double p, RandomStream& rs);

/// First-order deterministic successor: normalize((1 - i dt H_eff) psi).
Vec deterministic_successor(const Matrix& h_eff, double dt, const Vec& psi);

struct RunResult {
    TimeSeries series;
    SignedEnsemble final_ensemble;
};

/// A step failed (step size too large, missing reverse-jump source, ...);
/// partial holds everything recorded up to the failure, with the series
/// marked terminated.
struct RunAborted : Error {
    RunAborted(const std::string& msg, RunResult p) : Error(msg), partial(std::move(p)) {}
    RunResult partial;
};

/// Evolve |psi0> over [t0, t_max] and record the named observables.
/// Throws RunAborted on mid-run failures and ConfigError / DimensionMismatch
/// on bad inputs.
RunResult run(const LindbladModel& model, const SolverConfig& cfg, const Vec& psi0,
              const std::vector<std::pair<std::string, Matrix>>& observables);

} // namespace nmep
