// observables.hpp - transmittance (the order parameter), populations and
// physicality diagnostics of mean-field states.

#pragma once

#include "bistab/model.hpp"
#include "bistab/steady_state.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace bistab {

/// Transmittance is normalised by the empty-cavity photon number eta^2 /
/// kappa^2, which is undefined for an undriven mode.
struct UndefinedNormalizationError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ObservableRecord {
    double T1 = 0.0, T2 = 0.0;
    double ng1 = 0.0, ng2 = 0.0, ne1 = 0.0, ne2 = 0.0;
    double purity_proxy = 0.0;
    double photon1 = 0.0, photon2 = 0.0;  // |alpha_i|^2 N
};

/// kappa_i^2 |alpha_i|^2 / eta_i^2 of a (self-consistent) steady state.
double transmittance_exact(const SteadyState& ss, const SystemParams& p, Mode mode);

/// 1 / (1 + C^2 x^2); accurate for Delta_C = 0 and |Delta_A| >> gamma + Gamma.
double transmittance_approx(double x, const SystemParams& p, Mode mode);

/// Total excited population ne1 + ne2.
double purity_proxy(const SteadyState& ss);

/// Transmittances of undriven modes are reported as NaN.
ObservableRecord observe(const SteadyState& ss, const SystemParams& p);

struct DiagnosticReport {
    std::vector<std::string> flags;
    bool clean() const { return flags.empty(); }
};

/// Flags populations outside [-tol, 1 + tol], |sum - 1| > tol and
/// |m_i|^2 > ne_i ng_i + tol.
DiagnosticReport physicality_check(const MeanFieldState& s, double tol);

} // namespace bistab
