// steady_state.hpp - every fixed point of the mean-field equations at one
// parameter point, found through the degree-7 polynomial in the inversion
// x1 = ne1 - ng1, refined on the full system and classified by the
// Jacobian spectrum.
//
// The derivation of the polynomial is written out in
// docs/steady_state_polynomial.md.

#pragma once

#include "bistab/model.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bistab {

/// The closed-form field amplitude hits a pole.
struct SingularParameterError : std::domain_error {
    using std::domain_error::domain_error;
};

/// The fixed-point set is not a finite set of points (undriven system) or
/// the elimination polynomial vanishes identically.
struct DegenerateParameterError : std::domain_error {
    using std::domain_error::domain_error;
};

/// More than the single structural zero mode in the spectrum: the parameter
/// point sits on a stability boundary.
struct MarginalStabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace tolerance {
inline constexpr double pole = 1e-14;
inline constexpr double zero_mode = 1e-9;   // eps_zero
inline constexpr double stability = 1e-9;   // eps_stab
inline constexpr double dedup = 1e-7;       // max-norm on the real state vector
inline constexpr double residual = 1e-9;    // accepted |rhs| after refinement
inline constexpr double root_imag = 1e-8;   // |Im r| < 1e-8 (1 + |Re r|)
inline constexpr double root_range = 1e-8;  // slack on [-1, 1]
} // namespace tolerance

/// alpha_i = eta_i / (kappa_i - i Delta_Ci - g^2 x / D_i) with
/// D_i = gamma_i + Gamma_i - i Delta_Ai.
complex alpha_of_x(double x, const SystemParams& p, Mode mode);

/// m_i = g x alpha_i / D_i.
complex polarization_of_x(double x, const SystemParams& p, Mode mode);

/// ne_i = -g^2 x |alpha_i(x)|^2 / |D_i|^2; nonnegative for x <= 0.
double excited_population_of_x(double x, const SystemParams& p, Mode mode);

/// (Gamma1 ne1(x1) - Gamma2 ne2(x2), 2 ne1 - x1 + 2 ne2 - x2 - 1).
std::pair<double, double> fixed_point_residuals(double x1, double x2, const SystemParams& p);

/// Full mean-field state determined by the two inversions.
MeanFieldState state_from_inversions(double x1, double x2, const SystemParams& p);

struct SteadyStatePolynomial {
    std::vector<double> coeffs;  // constant term first, normalised to max |c| = 1
    int degree = 0;              // after trimming vanishing leading terms
    bool degree_dropped() const { return degree < 7; }
    double operator()(double x) const;
};

/// Eliminates x2 and returns P(x1) whose real roots in [-1, 0] are the x1
/// values of every fixed point. With Gamma1 = Gamma2 = 0 the subsystem
/// populations are separately conserved; the polynomial then describes the
/// sector in which all atoms belong to transition 1.
SteadyStatePolynomial polynomial_in_x1(const SystemParams& p);

/// Real roots of the polynomial in [-1, 1], from the balanced companion
/// matrix, clamped to the interval and sorted.
std::vector<double> physical_roots(const SteadyStatePolynomial& poly);

struct SteadyState {
    MeanFieldState state;
    double residual_norm = 0.0;
    bool stable = false;
    bool marginal = false;
    double spectrum_max_real = 0.0;
    double x1 = 0.0, x2 = 0.0;
};

struct SolutionSet {
    std::vector<SteadyState> solutions;  // sorted by x1 ascending
    SystemParams params;
    std::vector<std::string> warnings;

    std::size_t size() const { return solutions.size(); }
    int stable_count() const;
    bool has_marginal() const;
};

struct StabilityVerdict {
    bool stable = false;
    double spectrum_max_real = 0.0;
};

/// Eigenvalues of the Jacobian restricted to the invariant hyperplane of
/// fixed total population. These are the full spectrum with the structural
/// zero of the conservation law removed.
Eigen::VectorXcd reduced_spectrum(const MeanFieldState& s, const SystemParams& p);

/// Eigenvalues of the full 12 x 12 Jacobian.
Eigen::VectorXcd full_spectrum(const MeanFieldState& s, const SystemParams& p);

/// Throws MarginalStabilityError if a non-conserved eigenvalue has
/// |Re| < tolerance::zero_mode.
StabilityVerdict classify_stability(const MeanFieldState& s, const SystemParams& p);

struct NewtonOptions {
    int max_iterations = 60;
    double tolerance = 1e-12;  // on |rhs|_2
};

struct NewtonResult {
    MeanFieldState state;
    bool converged = false;
    int iterations = 0;
    double residual_norm = 0.0;
};

/// Damped Newton on the fixed-point system, with the last population
/// equation replaced by the normalisation sum = `population_total`.
NewtonResult refine_fixed_point(const MeanFieldState& start, const SystemParams& p,
                                const NewtonOptions& opts = {}, double population_total = 1.0);

/// Refined, classified SteadyState; the state must already be converged.
SteadyState make_steady_state(const MeanFieldState& s, const SystemParams& p);

/// Max-norm distance in the real embedding.
double state_distance(const MeanFieldState& a, const MeanFieldState& b);

/// Every fixed point at p. Throws DegenerateParameterError for
/// eta1 = eta2 = 0.
SolutionSet find_all_roots(const SystemParams& p);

} // namespace bistab
