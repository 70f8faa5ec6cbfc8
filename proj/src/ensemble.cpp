#include "nmep/ensemble.hpp"

#include <cmath>
#include <cstdlib>
#include <unordered_map>

namespace nmep {

SignedEnsemble single_state_ensemble(Vec psi, std::int64_t n) {
    SignedEnsemble e;
    e.members.push_back({normalize(psi), n});
    e.total = n;
    return e;
}

std::int64_t count_sum(const SignedEnsemble& e) {
    std::int64_t s = 0;
    for (const auto& m : e.members) s += m.count;
    return s;
}

DensityMatrix density_matrix(const SignedEnsemble& e) {
    if (e.members.empty()) throw EmptyEnsemble("density_matrix: ensemble has no members");
    const std::size_t n = e.members.front().state.size();
    Matrix rho(n);
    for (const auto& m : e.members) {
        if (m.state.size() != n)
            throw DimensionMismatch("density_matrix: inconsistent member dimensions");
        const double w = static_cast<double>(m.count) / static_cast<double>(e.total);
        for (std::size_t i = 0; i < n; ++i) {
            rho(i, i) += w * std::norm(m.state[i]);
            for (std::size_t j = i + 1; j < n; ++j)
                rho(i, j) += w * m.state[i] * std::conj(m.state[j]);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) rho(j, i) = std::conj(rho(i, j));
    return rho;
}

cplx expectation(const SignedEnsemble& e, const Matrix& obs) {
    if (e.members.empty()) throw EmptyEnsemble("expectation: ensemble has no members");
    cplx acc = 0.0;
    for (const auto& m : e.members) {
        if (m.state.size() != obs.dim())
            throw DimensionMismatch("expectation: observable dim does not match ensemble");
        acc += static_cast<double>(m.count) * dot(m.state, apply(obs, m.state));
    }
    return acc / static_cast<double>(e.total);
}

namespace {

struct CellKey {
    std::vector<std::int64_t> q;
    bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
    std::size_t operator()(const CellKey& k) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        for (std::int64_t v : k.q) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

struct Group {
    Vec state;              // representative (canonical)
    std::int64_t count = 0; // accumulated
    std::int64_t rep_abs = 0;
};

double dist2(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return s;
}

} // namespace

void consolidate(SignedEnsemble& e, double tol) {
    if (e.members.empty()) return;
    const std::size_t dim = e.members.front().state.size();
    const int digits = static_cast<int>(std::ceil(-std::log10(tol)));
    const double cell = std::pow(10.0, -digits);
    const double tol2 = tol * tol;
    const std::size_t ncoord = 2 * dim;

    std::vector<Group> groups;
    groups.reserve(e.members.size());
    std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> buckets;
    buckets.reserve(2 * e.members.size());

    CellKey key;
    key.q.resize(ncoord);
    CellKey probe;
    probe.q.resize(ncoord);

    for (auto& member : e.members) {
        const Vec canon = canonical_phase(member.state);
        for (std::size_t i = 0; i < dim; ++i) {
            key.q[2 * i] = static_cast<std::int64_t>(std::llround(canon[i].real() / cell));
            key.q[2 * i + 1] = static_cast<std::int64_t>(std::llround(canon[i].imag() / cell));
        }

        // Own cell first (the common case), then the 3^(2 dim) - 1 neighbor
        // cells; states within tol can straddle a cell boundary.
        std::size_t match = groups.size();
        auto scan_bucket = [&](const CellKey& k) {
            auto it = buckets.find(k);
            if (it == buckets.end()) return false;
            for (std::size_t g : it->second) {
                if (dist2(groups[g].state, canon) < tol2) {
                    match = g;
                    return true;
                }
            }
            return false;
        };

        // Offset range 1 for power-of-ten tolerances; wider otherwise since
        // the cell width is then finer than tol.
        const int range = static_cast<int>(std::ceil(tol / cell - 1e-12));
        bool found = scan_bucket(key);
        if (!found) {
            std::vector<int> offs(ncoord, -range);
            while (true) {
                bool all_zero = true;
                for (std::size_t i = 0; i < ncoord; ++i) {
                    probe.q[i] = key.q[i] + offs[i];
                    if (offs[i] != 0) all_zero = false;
                }
                if (!all_zero && scan_bucket(probe)) { found = true; break; }
                std::size_t i = 0;
                while (i < ncoord && offs[i] == range) offs[i++] = -range;
                if (i == ncoord) break;
                ++offs[i];
            }
        }

        if (found) {
            Group& g = groups[match];
            g.count += member.count;
            if (std::llabs(member.count) > g.rep_abs) {
                g.rep_abs = std::llabs(member.count);
                g.state = canon;
            }
        } else {
            groups.push_back({canon, member.count, std::llabs(member.count)});
            buckets[key].push_back(groups.size() - 1);
        }
    }

    std::vector<EnsembleMember> merged;
    merged.reserve(groups.size());
    for (auto& g : groups) {
        if (g.count != 0) merged.push_back({std::move(g.state), g.count});
    }
    e.members = std::move(merged);
}

} // namespace nmep
