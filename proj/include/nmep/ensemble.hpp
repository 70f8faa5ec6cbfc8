#pragma once

#include <cstdint>
#include <vector>

#include "nmep/core.hpp"

namespace nmep {

/// One pure state of the ensemble with its signed occupation count.
struct EnsembleMember {
    Vec state;
    std::int64_t count = 0;
};

/// Signed ensemble {(|psi_a>, N_a)} with conserved total Sum N_a = total.
/// Counts are exact integers so conservation holds bit-for-bit; individual
/// counts may be negative or transiently exceed total.
struct SignedEnsemble {
    std::vector<EnsembleMember> members;
    std::int64_t total = 0;
};

SignedEnsemble single_state_ensemble(Vec psi, std::int64_t n);

std::int64_t count_sum(const SignedEnsemble& e);

/// (1/N) Sum N_a |psi_a><psi_a|. Hermitian by symmetrized accumulation.
DensityMatrix density_matrix(const SignedEnsemble& e);

/// (1/N) Sum N_a <psi_a|obs|psi_a> = trace(obs * density_matrix(e)).
cplx expectation(const SignedEnsemble& e, const Matrix& obs);

/// Phase-canonicalize all states, merge members closer than tol in Euclidean
/// norm (representative: largest |count|, ties by insertion order) and drop
/// zero counts. Total count is unchanged. Uses a spatial hash on the rounded
/// amplitudes so cost stays near-linear in the member count.
void consolidate(SignedEnsemble& e, double tol);

} // namespace nmep
