// model.hpp - parameters, state and equations of motion of the two-mode,
// four-level mean-field (Maxwell-Bloch) cavity model.
//
// All rates, detunings and drives are expressed in units of the atomic
// linewidth gamma (gamma == 1 sets the time scale).

#pragma once

#include <Eigen/Core>

#include <complex>
#include <string>
#include <vector>

namespace bistab {

using complex = std::complex<double>;

/// Transition / mode index. The scheme has two of each.
enum class Mode { one = 1, two = 2 };

struct SystemParams {
    double gamma1 = 1.0;   // atomic linewidth of g1 <-> e1
    double gamma2 = 1.0;
    double Gamma1 = 1.0;   // cross decay e1 -> g2
    double Gamma2 = 1.0;   // cross decay e2 -> g1
    double kappa1 = 1.32;  // cavity linewidths
    double kappa2 = 1.32;
    double g_single = 0.1; // single-atom coupling g(N=1)
    double N = 5000.0;     // atom number, g_i = g_single * sqrt(N)
    double delta_A1 = -12.0;
    double delta_A2 = -12.0;
    double delta_C1 = 0.0;
    double delta_C2 = 0.0;
    double eta1 = 0.0;     // scaled drive amplitudes
    double eta2 = 0.0;

    /// Collective coupling g_i. Both transitions share the same single-atom
    /// coupling, so g1 == g2.
    double g() const;
    double g_squared() const { return g_single * g_single * N; }

    double gamma(Mode m) const { return m == Mode::one ? gamma1 : gamma2; }
    double cross_decay(Mode m) const { return m == Mode::one ? Gamma1 : Gamma2; }
    double kappa(Mode m) const { return m == Mode::one ? kappa1 : kappa2; }
    double delta_A(Mode m) const { return m == Mode::one ? delta_A1 : delta_A2; }
    double delta_C(Mode m) const { return m == Mode::one ? delta_C1 : delta_C2; }
    double eta(Mode m) const { return m == Mode::one ? eta1 : eta2; }

    /// Polarization damping gamma_i + Gamma_i - i Delta_Ai.
    complex atomic_denominator(Mode m) const;
    /// Cavity response kappa_i - i Delta_Ci.
    complex cavity_denominator(Mode m) const;

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Baseline set: kappa = 1.32, Gamma = gamma, g(N=1) = 0.1, Delta_A = -12,
/// resonant cavities, N = 5000. Drives are left at zero.
SystemParams baseline_params(double N = 5000.0);

/// Applies the 1 <-> 2 relabelling to every indexed parameter.
SystemParams swapped(const SystemParams& p);

struct ValidationReport {
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
};

/// Checks positivity of linewidths and cross-decay rates, sign of the drives
/// and N >= 1. The decoupled limit Gamma_i = 0 can be admitted explicitly;
/// the steady-state solver handles it as a limiting case.
ValidationReport validate(const SystemParams& p, bool allow_zero_cross_decay = false);

/// Throws std::invalid_argument listing every violated invariant.
void require_valid(const SystemParams& p, bool allow_zero_cross_decay = false);

// Real embedding used by all Jacobian and spectral code:
//   0..3   Re a1, Im a1, Re a2, Im a2
//   4..7   Re m1, Im m1, Re m2, Im m2
//   8..11  ne1, ng1, ne2, ng2
inline constexpr int kStateDim = 12;
using RealStateVector = Eigen::Matrix<double, kStateDim, 1>;
using RealMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;

namespace idx {
inline constexpr int re_alpha1 = 0, im_alpha1 = 1, re_alpha2 = 2, im_alpha2 = 3;
inline constexpr int re_m1 = 4, im_m1 = 5, re_m2 = 6, im_m2 = 7;
inline constexpr int ne1 = 8, ng1 = 9, ne2 = 10, ng2 = 11;
} // namespace idx

struct MeanFieldState {
    complex alpha1{}, alpha2{};
    complex m1{}, m2{};
    double ne1 = 0.0, ng1 = 0.0, ne2 = 0.0, ng2 = 0.0;

    complex alpha(Mode m) const { return m == Mode::one ? alpha1 : alpha2; }
    complex polarization(Mode m) const { return m == Mode::one ? m1 : m2; }
    double excited(Mode m) const { return m == Mode::one ? ne1 : ne2; }
    double ground(Mode m) const { return m == Mode::one ? ng1 : ng2; }
    /// Population inversion ne_i - ng_i.
    double inversion(Mode m) const { return excited(m) - ground(m); }
    double population_sum() const { return ne1 + ng1 + ne2 + ng2; }

    RealStateVector to_real() const;
    static MeanFieldState from_real(const RealStateVector& v);

    friend bool operator==(const MeanFieldState&, const MeanFieldState&) = default;
};

/// Index swap alpha1<->alpha2, m1<->m2, ne1<->ne2, ng1<->ng2.
MeanFieldState swapped(const MeanFieldState& s);

/// Undriven field, all atoms in g1 (or g2).
MeanFieldState ground_state(Mode populated);

/// Time derivative of every component of the mean-field equations.
MeanFieldState rhs(const MeanFieldState& s, const SystemParams& p);
RealStateVector rhs(const RealStateVector& v, const SystemParams& p);

/// d rhs_i / d state_j in the real embedding.
RealMatrix jacobian(const MeanFieldState& s, const SystemParams& p);

/// g_i^2 / sqrt((Delta_Ci^2 + kappa_i^2)(Delta_Ai^2 + gamma_i^2)).
double cooperativity(const SystemParams& p, Mode m);

} // namespace bistab
