#include "bistab/steady_state.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bistab {

namespace {

using Poly = std::vector<double>;  // constant term first

Poly add(const Poly& a, const Poly& b)
{
    Poly r(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i)
        r[i] += b[i];
    return r;
}

Poly mul(const Poly& a, const Poly& b)
{
    Poly r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] += a[i] * b[j];
    return r;
}

Poly scale(const Poly& a, double c)
{
    Poly r = a;
    for (double& v : r)
        v *= c;
    return r;
}

double horner(const Poly& c, double x)
{
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it)
        v = v * x + *it;
    return v;
}

double horner_derivative(const Poly& c, double x)
{
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 1;)
        v = v * x + static_cast<double>(k) * c[k];
    return v;
}

// Normalised cross-decay weights (w1, w2), w1 + w2 = 1, such that
// w1 ne1 = w2 ne2 at every fixed point.
std::pair<double, double> cross_decay_weights(const SystemParams& p)
{
    const double total = p.Gamma1 + p.Gamma2;
    if (total > 0.0)
        return {p.Gamma1 / total, p.Gamma2 / total};
    return {0.0, 1.0};
}

// |(kappa - i dC) D - g^2 x|^2 as a quadratic in x. ne(x) = -g^2 eta^2 x / q(x).
Poly denominator_quadratic(const SystemParams& p, Mode mode)
{
    const complex a = p.cavity_denominator(mode) * p.atomic_denominator(mode);
    const double gg = p.g_squared();
    return {std::norm(a), -2.0 * a.real() * gg, gg * gg};
}

void check_mode_pole(const SystemParams& p, Mode mode, double x, const complex& denom)
{
    if (std::abs(denom) < tolerance::pole) {
        std::ostringstream msg;
        msg << "field amplitude pole for mode " << static_cast<int>(mode) << " at x = " << x;
        throw SingularParameterError(msg.str());
    }
    (void)p;
}

bool is_physical(const MeanFieldState& s, double tol)
{
    for (double n : {s.ne1, s.ng1, s.ne2, s.ng2})
        if (n < -tol || n > 1.0 + tol)
            return false;
    return std::abs(s.population_sum() - 1.0) <= tol;
}

} // namespace

complex alpha_of_x(double x, const SystemParams& p, Mode mode)
{
    const double gg = p.g_squared();
    const complex denom = p.cavity_denominator(mode) - gg * x / p.atomic_denominator(mode);
    check_mode_pole(p, mode, x, denom);
    return p.eta(mode) / denom;
}

complex polarization_of_x(double x, const SystemParams& p, Mode mode)
{
    return p.g() * x * alpha_of_x(x, p, mode) / p.atomic_denominator(mode);
}

double excited_population_of_x(double x, const SystemParams& p, Mode mode)
{
    const complex a = alpha_of_x(x, p, mode);
    return -p.g_squared() * x * std::norm(a) / std::norm(p.atomic_denominator(mode));
}

std::pair<double, double> fixed_point_residuals(double x1, double x2, const SystemParams& p)
{
    const double n1 = excited_population_of_x(x1, p, Mode::one);
    const double n2 = excited_population_of_x(x2, p, Mode::two);
    return {p.Gamma1 * n1 - p.Gamma2 * n2, (2.0 * n1 - x1) + (2.0 * n2 - x2) - 1.0};
}

MeanFieldState state_from_inversions(double x1, double x2, const SystemParams& p)
{
    MeanFieldState s;
    s.alpha1 = alpha_of_x(x1, p, Mode::one);
    s.alpha2 = alpha_of_x(x2, p, Mode::two);
    s.m1 = p.g() * x1 * s.alpha1 / p.atomic_denominator(Mode::one);
    s.m2 = p.g() * x2 * s.alpha2 / p.atomic_denominator(Mode::two);
    s.ne1 = excited_population_of_x(x1, p, Mode::one);
    s.ne2 = excited_population_of_x(x2, p, Mode::two);
    s.ng1 = s.ne1 - x1;
    s.ng2 = s.ne2 - x2;
    return s;
}

double SteadyStatePolynomial::operator()(double x) const { return horner(coeffs, x); }

SteadyStatePolynomial polynomial_in_x1(const SystemParams& p)
{
    require_valid(p, true);
    const auto [w1, w2] = cross_decay_weights(p);
    const double gg = p.g_squared();
    const double a1 = gg * p.eta1 * p.eta1;
    const double a2 = gg * p.eta2 * p.eta2;

    const Poly q1 = denominator_quadratic(p, Mode::one);
    const complex A2 = p.cavity_denominator(Mode::two) * p.atomic_denominator(Mode::two);
    const Poly x = {0.0, 1.0};
    const Poly x_plus_1 = {1.0, 1.0};

    // w2 q1 x2 = -2 a1 x1 - w2 (x1 + 1) q1
    const Poly p3 = add(scale(x, -2.0 * a1), scale(mul(x_plus_1, q1), -w2));
    // (w2 q1)^2 q2(x2)
    const Poly shifted = add(scale(q1, A2.real() * w2), scale(p3, -gg));
    const Poly bracket = add(mul(shifted, shifted), scale(mul(q1, q1), A2.imag() * A2.imag() * w2 * w2));

    // a2 x2 + ne2 q2(x2) = 0 with ne2 = (w1 / w2) ne1, cleared of denominators.
    // Without decay out of e1 (w1 = 0) this reduces to ne2 = 0, whose only
    // content is x2 from the normalisation: P3 = 0.
    Poly coeffs;
    if (w1 == 0.0) {
        coeffs = mul(mul(q1, q1), p3);
    } else {
        const Poly lhs = scale(mul(mul(q1, q1), p3), a2 * w2 * w2);
        const Poly rhs_term = scale(mul(x, bracket), -w1 * a1);
        coeffs = add(lhs, rhs_term);
    }

    double biggest = 0.0;
    for (double c : coeffs)
        biggest = std::max(biggest, std::abs(c));
    if (!(biggest > 1e-300))
        throw DegenerateParameterError("steady-state polynomial vanishes identically");
    for (double& c : coeffs)
        c /= biggest;

    while (coeffs.size() > 1 && std::abs(coeffs.back()) < 1e-13)
        coeffs.pop_back();

    SteadyStatePolynomial out;
    out.degree = static_cast<int>(coeffs.size()) - 1;
    out.coeffs = std::move(coeffs);
    return out;
}

std::vector<double> physical_roots(const SteadyStatePolynomial& poly)
{
    std::vector<double> roots;
    if (poly.degree < 1)
        return roots;

    std::vector<complex> candidates;
    if (poly.degree == 1) {
        candidates.emplace_back(-poly.coeffs[0] / poly.coeffs[1], 0.0);
    } else {
        Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(poly.coeffs.data(), poly.coeffs.size());
        Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(c);
        for (Eigen::Index i = 0; i < solver.roots().size(); ++i)
            candidates.push_back(solver.roots()[i]);
    }

    for (const complex& r : candidates) {
        if (std::abs(r.imag()) >= tolerance::root_imag * (1.0 + std::abs(r.real())))
            continue;
        if (r.real() < -1.0 - tolerance::root_range || r.real() > 1.0 + tolerance::root_range)
            continue;
        double x = std::clamp(r.real(), -1.0, 1.0);

        // a few Newton steps on the polynomial itself, kept only if they help
        for (int it = 0; it < 4; ++it) {
            const double f = horner(poly.coeffs, x);
            const double df = horner_derivative(poly.coeffs, x);
            if (df == 0.0)
                break;
            const double trial = std::clamp(x - f / df, -1.0, 1.0);
            if (std::abs(trial - x) > 1e-6 || std::abs(horner(poly.coeffs, trial)) >= std::abs(f))
                break;
            x = trial;
        }
        roots.push_back(x);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

int SolutionSet::stable_count() const
{
    return static_cast<int>(std::count_if(solutions.begin(), solutions.end(),
                                          [](const SteadyState& s) { return s.stable; }));
}

bool SolutionSet::has_marginal() const
{
    return std::any_of(solutions.begin(), solutions.end(), [](const SteadyState& s) { return s.marginal; });
}

Eigen::VectorXcd full_spectrum(const MeanFieldState& s, const SystemParams& p)
{
    Eigen::EigenSolver<RealMatrix> es(jacobian(s, p), false);
    return es.eigenvalues();
}

Eigen::VectorXcd reduced_spectrum(const MeanFieldState& s, const SystemParams& p)
{
    // Coordinates on the hyperplane of fixed total population: drop ng2 and
    // substitute ng2 = const - ne1 - ng1 - ne2.
    const RealMatrix J = jacobian(s, p);
    constexpr int n = kStateDim - 1;
    Eigen::Matrix<double, n, n> reduced = J.topLeftCorner<n, n>();
    for (int i = 0; i < n; ++i)
        for (int j : {idx::ne1, idx::ng1, idx::ne2})
            reduced(i, j) -= J(i, idx::ng2);
    Eigen::EigenSolver<Eigen::Matrix<double, n, n>> es(reduced, false);
    return es.eigenvalues();
}

StabilityVerdict classify_stability(const MeanFieldState& s, const SystemParams& p)
{
    const Eigen::VectorXcd spectrum = reduced_spectrum(s, p);
    StabilityVerdict v;
    v.spectrum_max_real = spectrum.real().maxCoeff();
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
        if (std::abs(spectrum[i].real()) < tolerance::zero_mode) {
            std::ostringstream msg;
            msg << "marginal fixed point: non-conserved eigenvalue " << spectrum[i].real() << "+"
                << spectrum[i].imag() << "i";
            throw MarginalStabilityError(msg.str());
        }
    }
    v.stable = v.spectrum_max_real < -tolerance::stability;
    return v;
}

NewtonResult refine_fixed_point(const MeanFieldState& start, const SystemParams& p,
                                const NewtonOptions& opts, double population_total)
{
    auto residual = [&](const RealStateVector& v) {
        RealStateVector f = rhs(v, p);
        f[idx::ng2] = v[idx::ne1] + v[idx::ng1] + v[idx::ne2] + v[idx::ng2] - population_total;
        return f;
    };
    auto rhs_norm = [&](const RealStateVector& v) { return rhs(v, p).norm(); };

    RealStateVector v = start.to_real();
    RealStateVector f = residual(v);
    double fnorm = f.norm();
    NewtonResult out;

    for (out.iterations = 0; out.iterations < opts.max_iterations; ++out.iterations) {
        if (fnorm < opts.tolerance)
            break;
        RealMatrix J = jacobian(MeanFieldState::from_real(v), p);
        J.row(idx::ng2).setZero();
        J.block<1, 4>(idx::ng2, idx::ne1).setOnes();
        const RealStateVector step = J.completeOrthogonalDecomposition().solve(-f);
        if (!step.allFinite())
            break;

        double lambda = 1.0;
        bool improved = false;
        for (int k = 0; k < 40; ++k, lambda *= 0.5) {
            const RealStateVector trial = v + lambda * step;
            const RealStateVector ft = residual(trial);
            const double tn = ft.norm();
            if (tn < fnorm) {
                v = trial;
                f = ft;
                fnorm = tn;
                improved = true;
                break;
            }
        }
        if (!improved)
            break;
    }

    out.state = MeanFieldState::from_real(v);
    out.residual_norm = rhs_norm(v);
    out.converged = std::isfinite(fnorm) && out.residual_norm < tolerance::residual &&
                    std::abs(out.state.population_sum() - population_total) < tolerance::residual;
    return out;
}

double state_distance(const MeanFieldState& a, const MeanFieldState& b)
{
    return (a.to_real() - b.to_real()).cwiseAbs().maxCoeff();
}

SteadyState make_steady_state(const MeanFieldState& s, const SystemParams& p)
{
    SteadyState ss;
    ss.state = s;
    ss.residual_norm = rhs(s, p).to_real().norm();
    ss.x1 = s.inversion(Mode::one);
    ss.x2 = s.inversion(Mode::two);
    try {
        const StabilityVerdict v = classify_stability(s, p);
        ss.stable = v.stable;
        ss.spectrum_max_real = v.spectrum_max_real;
    } catch (const MarginalStabilityError&) {
        ss.marginal = true;
        ss.stable = false;
        ss.spectrum_max_real = reduced_spectrum(s, p).real().maxCoeff();
    }
    return ss;
}

namespace {

void insert_unique(std::vector<SteadyState>& set, SteadyState candidate)
{
    for (const SteadyState& s : set)
        if (state_distance(s.state, candidate.state) < tolerance::dedup)
            return;
    set.push_back(std::move(candidate));
}

SolutionSet solve_with_polynomial(const SystemParams& p)
{
    SolutionSet out;
    out.params = p;
    const auto [w1, w2] = cross_decay_weights(p);
    const SteadyStatePolynomial poly = polynomial_in_x1(p);
    if (poly.degree_dropped()) {
        std::ostringstream msg;
        msg << "polynomial degree dropped to " << poly.degree;
        out.warnings.push_back(msg.str());
    }

    // Single-mode boundary: with mode 2 undriven and decay out of e1, all
    // atoms are pumped into g2 and the polynomial factors as x1 times a
    // positive definite bracket.
    std::vector<double> roots;
    if (p.eta2 == 0.0 && w1 > 0.0)
        roots = {0.0};
    else
        roots = physical_roots(poly);

    for (double x1 : roots) {
        MeanFieldState guess;
        try {
            const double n1 = excited_population_of_x(x1, p, Mode::one);
            const double x2 = std::clamp(2.0 * n1 / w2 - x1 - 1.0, -1.0, 1.0);
            guess = state_from_inversions(x1, x2, p);
        } catch (const SingularParameterError& e) {
            out.warnings.push_back(std::string("unrefined root: ") + e.what());
            continue;
        }

        const NewtonResult refined = refine_fixed_point(guess, p);
        if (!refined.converged) {
            std::ostringstream msg;
            msg << "unrefined root x1 = " << x1 << " (|rhs| = " << refined.residual_norm << ")";
            out.warnings.push_back(msg.str());
            continue;
        }
        if (!is_physical(refined.state, 1e-9)) {
            std::ostringstream msg;
            msg << "discarded unphysical root x1 = " << x1;
            out.warnings.push_back(msg.str());
            continue;
        }
        insert_unique(out.solutions, make_steady_state(refined.state, p));
    }

    std::sort(out.solutions.begin(), out.solutions.end(),
              [](const SteadyState& a, const SteadyState& b) { return a.x1 < b.x1; });
    for (const SteadyState& s : out.solutions)
        if (s.marginal)
            out.warnings.push_back("marginal fixed point at x1 = " + std::to_string(s.x1));
    return out;
}

} // namespace

SolutionSet find_all_roots(const SystemParams& p)
{
    require_valid(p, true);
    if (p.eta1 == 0.0 && p.eta2 == 0.0)
        throw DegenerateParameterError(
            "undriven system: every split of the atoms between g1 and g2 is a fixed point");

    // With Gamma2 = 0 < Gamma1 the atoms end up in subsystem 2; solve the
    // relabelled problem, whose polynomial variable is then x2.
    if (p.Gamma2 == 0.0 && p.Gamma1 > 0.0) {
        SolutionSet mirrored = solve_with_polynomial(swapped(p));
        SolutionSet out;
        out.params = p;
        out.warnings = std::move(mirrored.warnings);
        for (const SteadyState& s : mirrored.solutions)
            out.solutions.push_back(make_steady_state(swapped(s.state), p));
        std::sort(out.solutions.begin(), out.solutions.end(),
                  [](const SteadyState& a, const SteadyState& b) { return a.x1 < b.x1; });
        return out;
    }
    return solve_with_polynomial(p);
}

} // namespace bistab
