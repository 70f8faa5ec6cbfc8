#include "nmep/solvers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

#include "nmep/util.hpp"

namespace nmep {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t step, std::uint64_t member,
                           std::uint64_t channel_key) {
    std::uint64_t h = splitmix(seed);
    h = splitmix(h ^ step);
    h = splitmix(h ^ member);
    state_ = splitmix(h ^ channel_key);
}

double RandomStream::uniform() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    return (static_cast<double>(z >> 11) + 0.5) * 0x1p-53;
}

std::uint64_t channel_signature(const Matrix& op) {
    std::uint64_t h = 0xcbf29ce484222325ull; // FNV-1a over the entry bit patterns
    auto feed = [&h](double d) {
        std::uint64_t bits = std::bit_cast<std::uint64_t>(d);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffu;
            h *= 0x100000001b3ull;
        }
    };
    for (const cplx& z : op.data()) {
        feed(z.real());
        feed(z.imag());
    }
    return h;
}

std::int64_t sample_binomial(std::int64_t n, double p, RandomStream& rs) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    // Second waiting-time method: skip over geometric runs of failures.
    const double log_q = std::log1p(-p);
    std::int64_t successes = 0;
    std::int64_t position = 0;
    while (true) {
        position += static_cast<std::int64_t>(std::floor(std::log(rs.uniform()) / log_q)) + 1;
        if (position > n) return successes;
        ++successes;
    }
}

Vec deterministic_successor(const Matrix& h_eff, double dt, const Vec& psi) {
    Vec out = nmep::apply(h_eff, psi);
    for (std::size_t i = 0; i < psi.size(); ++i) out[i] = psi[i] - cplx(0.0, dt) * out[i];
    return normalize(out);
}

namespace {

struct StepChannel {
    Matrix op;
    double rate = 0.0;
    std::uint64_t key = 0;
};

struct StepContext {
    double t = 0.0;
    double dt = 0.0;
    Matrix h_eff;
    std::vector<StepChannel> channels;
    // nmqj only: canonical jump successors per negative channel, indexed
    // [channel][member]; empty vectors mark annihilated states.
    std::vector<std::vector<Vec>> jump_canon;
    std::vector<std::vector<double>> jump_nrm2;
    std::vector<Vec> member_canon;
};

StepContext make_step_context(const LindbladModel& model, const SolverConfig& cfg, double t) {
    StepContext ctx;
    ctx.t = t;
    ctx.dt = cfg.dt;
    Matrix h = model.hamiltonian_at(t);
    if (h.dim() != model.dim)
        throw DimensionMismatch("step: Hamiltonian dim mismatch at t=" + format_double(t));
    for (const auto& ch : model.channels) {
        StepChannel sc;
        sc.op = ch.operator_at(t);
        if (sc.op.dim() != model.dim)
            throw DimensionMismatch("step: jump operator dim mismatch at t=" + format_double(t));
        sc.rate = ch.rate_at(t);
        if (cfg.kind == SolverKind::mcwf && sc.rate < 0.0)
            throw NegativeRate("standard unraveling cannot handle rate " +
                               format_double(sc.rate) + " < 0 at t=" + format_double(t));
        sc.key = channel_signature(sc.op);
        h -= cplx(0.0, 0.5 * sc.rate) * (sc.op.adjoint() * sc.op);
        ctx.channels.push_back(std::move(sc));
    }
    ctx.h_eff = std::move(h);
    return ctx;
}

double norm2(const Vec& v) {
    double s = 0.0;
    for (const cplx& z : v) s += std::norm(z);
    return s;
}

double dist2(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return s;
}

void check_probability(double p, double t) {
    if (p > 0.1)
        throw StepTooLarge("jump probability " + format_double(p) + " exceeds 0.1 at t=" +
                           format_double(t) + "; reduce the step size");
}

/// Successors of one ensemble member for the signed-ensemble and standard
/// unravelings (the latter differs only in the negative-rate guard applied
/// when the context was built).
void step_member_signed(const StepContext& ctx, const SolverConfig& cfg, std::uint64_t step,
                        const SignedEnsemble& e, std::size_t member,
                        std::vector<EnsembleMember>& out) {
    const Vec& psi = e.members[member].state;
    const std::int64_t n = e.members[member].count;
    std::int64_t n_det = n;
    for (const StepChannel& ch : ctx.channels) {
        if (ch.rate == 0.0) continue;
        Vec jumped = nmep::apply(ch.op, psi);
        const double w2 = norm2(jumped);
        const double p = ctx.dt * std::abs(ch.rate) * w2;
        check_probability(p, ctx.t);
        if (p <= 0.0) continue;
        RandomStream rs(cfg.seed, step, member, ch.key);
        const std::int64_t drawn = sample_binomial(std::llabs(n), p, rs);
        if (drawn == 0) continue;
        const std::int64_t sign = ((n < 0) != (ch.rate < 0.0)) ? -1 : 1;
        const double inv = 1.0 / std::sqrt(w2);
        for (cplx& z : jumped) z *= inv;
        out.push_back({std::move(jumped), sign * drawn});
        n_det -= sign * drawn;
    }
    out.push_back({deterministic_successor(ctx.h_eff, ctx.dt, psi), n_det});
}

void step_member_nmqj(const StepContext& ctx, const SolverConfig& cfg, std::uint64_t step,
                      const SignedEnsemble& e, std::size_t member,
                      std::vector<EnsembleMember>& out) {
    const Vec& psi = e.members[member].state;
    const std::int64_t n = e.members[member].count;
    if (n == 0) return;
    const double tol2 = cfg.consolidation_tol * cfg.consolidation_tol;
    std::int64_t n_det = n;
    for (std::size_t l = 0; l < ctx.channels.size(); ++l) {
        const StepChannel& ch = ctx.channels[l];
        if (ch.rate == 0.0) continue;
        if (ch.rate > 0.0) {
            Vec jumped = nmep::apply(ch.op, psi);
            const double w2 = norm2(jumped);
            const double p = ctx.dt * ch.rate * w2;
            check_probability(p, ctx.t);
            if (p <= 0.0) continue;
            RandomStream rs(cfg.seed, step, member, ch.key);
            const std::int64_t drawn = sample_binomial(n, p, rs);
            if (drawn == 0) continue;
            const double inv = 1.0 / std::sqrt(w2);
            for (cplx& z : jumped) z *= inv;
            out.push_back({std::move(jumped), drawn});
            n_det -= drawn;
            continue;
        }
        // Negative rate: revert the jump this state is the image of. The
        // source is the member whose jump successor coincides with psi.
        std::size_t src = e.members.size();
        for (std::size_t m = 0; m < e.members.size(); ++m) {
            if (ctx.jump_canon[l][m].empty()) continue;
            if (dist2(ctx.jump_canon[l][m], ctx.member_canon[member]) >= tol2) continue;
            if (src == e.members.size() || e.members[m].count > e.members[src].count) src = m;
        }
        RandomStream rs(cfg.seed, step, member, ch.key);
        if (src == e.members.size()) {
            const double p = ctx.dt * std::abs(ch.rate) * norm2(nmep::apply(ch.op, psi));
            check_probability(p, ctx.t);
            if (sample_binomial(n, p, rs) > 0)
                throw ReverseTargetMissing(
                    "negative-rate jump triggered at t=" + format_double(ctx.t) +
                    " but no ensemble member maps onto this state");
            continue;
        }
        const double base = ctx.dt * std::abs(ch.rate) * ctx.jump_nrm2[l][src];
        check_probability(base, ctx.t);
        const double ratio = static_cast<double>(e.members[src].count) / static_cast<double>(n);
        const double p = std::min(1.0, base * ratio);
        const std::int64_t drawn = sample_binomial(n, p, rs);
        if (drawn == 0) continue;
        out.push_back({deterministic_successor(ctx.h_eff, ctx.dt, e.members[src].state), drawn});
        n_det -= drawn;
    }
    if (n_det != 0) out.push_back({deterministic_successor(ctx.h_eff, ctx.dt, psi), n_det});
}

void fill_nmqj_tables(StepContext& ctx, const SignedEnsemble& e) {
    const std::size_t m = e.members.size();
    ctx.member_canon.resize(m);
    for (std::size_t i = 0; i < m; ++i) ctx.member_canon[i] = canonical_phase(e.members[i].state);
    ctx.jump_canon.assign(ctx.channels.size(), {});
    ctx.jump_nrm2.assign(ctx.channels.size(), {});
    for (std::size_t l = 0; l < ctx.channels.size(); ++l) {
        if (ctx.channels[l].rate >= 0.0) continue;
        ctx.jump_canon[l].resize(m);
        ctx.jump_nrm2[l].assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            Vec jumped = nmep::apply(ctx.channels[l].op, e.members[i].state);
            const double w2 = norm2(jumped);
            if (w2 <= 1e-300) continue; // annihilated; cannot be a source
            const double inv = 1.0 / std::sqrt(w2);
            for (cplx& z : jumped) z *= inv;
            ctx.jump_canon[l][i] = canonical_phase(jumped);
            ctx.jump_nrm2[l][i] = w2;
        }
    }
}

void do_step(const LindbladModel& model, const SolverConfig& cfg, std::uint64_t step, double t,
             SignedEnsemble& e) {
    StepContext ctx = make_step_context(model, cfg, t);
    if (cfg.kind == SolverKind::nmqj) fill_nmqj_tables(ctx, e);

    const std::size_t m = e.members.size();
    std::vector<std::vector<EnsembleMember>> slots(m);

    auto kernel = [&](std::size_t i) {
        if (cfg.kind == SolverKind::nmqj)
            step_member_nmqj(ctx, cfg, step, e, i, slots[i]);
        else
            step_member_signed(ctx, cfg, step, e, i, slots[i]);
    };

    const unsigned nt = std::max(1u, cfg.n_threads);
    if (nt == 1 || m < 256) {
        for (std::size_t i = 0; i < m; ++i) kernel(i);
    } else {
        const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(nt, m));
        std::vector<std::thread> threads;
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::size_t> error_member(workers, m);
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = m * w / workers;
            const std::size_t end = m * (w + 1) / workers;
            threads.emplace_back([&, w, begin, end] {
                for (std::size_t i = begin; i < end; ++i) {
                    try {
                        kernel(i);
                    } catch (...) {
                        errors[w] = std::current_exception();
                        error_member[w] = i;
                        return;
                    }
                }
            });
        }
        for (auto& th : threads) th.join();
        // Rethrow the failure of the lowest member index so the reported
        // error does not depend on the thread count.
        std::size_t best = workers;
        for (unsigned w = 0; w < workers; ++w)
            if (errors[w] && (best == workers || error_member[w] < error_member[best])) best = w;
        if (best != workers) std::rethrow_exception(errors[best]);
    }

    std::size_t produced = 0;
    for (const auto& s : slots) produced += s.size();
    std::vector<EnsembleMember> next;
    next.reserve(produced);
    for (auto& s : slots)
        for (auto& member : s) next.push_back(std::move(member));
    e.members = std::move(next);
}

} // namespace

RunResult run(const LindbladModel& model, const SolverConfig& cfg, const Vec& psi0,
              const std::vector<std::pair<std::string, Matrix>>& observables) {
    if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(cfg.t_max > cfg.t0)) throw ConfigError("t_max must exceed t0");
    if (cfg.n_ensemble <= 0) throw ConfigError("ensemble size must be positive");
    if (cfg.consolidation_stride == 0 || cfg.record_stride == 0)
        throw ConfigError("strides must be positive");
    if (!(cfg.consolidation_tol > 0.0)) throw ConfigError("consolidation tolerance must be positive");
    if (psi0.size() != model.dim)
        throw DimensionMismatch("initial state dim does not match the model");
    for (const auto& [nm, op] : observables)
        if (op.dim() != model.dim)
            throw DimensionMismatch("observable '" + nm + "' dim does not match the model");

    const std::size_t n_steps =
        static_cast<std::size_t>(std::ceil((cfg.t_max - cfg.t0) / cfg.dt - 1e-9));

    RunResult res;
    res.final_ensemble = single_state_ensemble(psi0, cfg.n_ensemble);
    SignedEnsemble& e = res.final_ensemble;
    TimeSeries& s = res.series;
    for (const auto& [nm, op] : observables) s.observable_names.push_back(nm);

    auto record = [&](std::size_t i) {
        s.times.push_back(cfg.t0 + static_cast<double>(i) * cfg.dt);
        std::vector<cplx> vals;
        vals.reserve(observables.size());
        for (const auto& [nm, op] : observables) vals.push_back(expectation(e, op));
        s.observables.push_back(std::move(vals));
        s.distinct_members.push_back(e.members.size());
        s.total_counts.push_back(count_sum(e));
        if (cfg.monitor_positivity) s.min_eigenvalues.push_back(min_eigenvalue(density_matrix(e)));
    };

    record(0);
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double t = cfg.t0 + static_cast<double>(i) * cfg.dt;
        try {
            do_step(model, cfg, i, t, e);
            if ((i + 1) % cfg.consolidation_stride == 0 || i + 1 == n_steps)
                consolidate(e, cfg.consolidation_tol);
        } catch (const Error& err) {
            s.terminated = true;
            s.termination_reason = err.what();
            s.termination_time = t;
            throw RunAborted(err.what(), std::move(res));
        }
        if ((i + 1) % cfg.record_stride == 0 || i + 1 == n_steps) record(i + 1);
    }
    return res;
}

} // namespace nmep
