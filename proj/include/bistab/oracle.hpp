// oracle.hpp - brute-force fixed-point search that does not use the
// elimination polynomial: damped Newton and time-integration settling from
// random physical starting points.

#pragma once

#include "bistab/dynamics.hpp"
#include "bistab/steady_state.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace bistab {

struct OracleResult {
    SolutionSet solutions;             // deduplicated union, sorted by x1
    std::vector<bool> reached_by_settling;  // parallel to solutions
};

/// Random state with populations on the simplex, |m_i|^2 <= ne_i ng_i and
/// field amplitudes up to 1.5 eta_i / kappa_i.
MeanFieldState random_physical_state(const SystemParams& p, std::mt19937_64& rng);

/// Random populations (symmetric Dirichlet with the given shape) with
/// fields and polarizations slaved to them through the closed forms
/// alpha(x), m(x).
MeanFieldState random_adiabatic_state(const SystemParams& p, std::mt19937_64& rng, double shape = 1.0);

/// Dirichlet shape of the vertex-heavy starts. At large N the phase with
/// nearly all atoms in one ground state attracts only starts within about
/// 1% of that vertex, which uniform sampling essentially never produces.
inline constexpr double kSparseShape = 0.05;

/// Runs Newton and settle() from each of n_starts random starts, cycling
/// through physical, adiabatic and vertex-heavy adiabatic states.
/// Deterministic for a given seed. May miss fixed points; use it as a lower
/// bound.
OracleResult multistart_oracle(const SystemParams& p, int n_starts, std::uint64_t seed,
                               const SettleOptions& settle_opts = {});

} // namespace bistab
