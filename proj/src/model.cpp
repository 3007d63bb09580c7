#include "bistab/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bistab {

double SystemParams::g() const { return g_single * std::sqrt(N); }

complex SystemParams::atomic_denominator(Mode m) const
{
    return {gamma(m) + cross_decay(m), -delta_A(m)};
}

complex SystemParams::cavity_denominator(Mode m) const { return {kappa(m), -delta_C(m)}; }

SystemParams baseline_params(double N)
{
    SystemParams p;
    p.N = N;
    return p;
}

SystemParams swapped(const SystemParams& p)
{
    SystemParams q = p;
    std::swap(q.gamma1, q.gamma2);
    std::swap(q.Gamma1, q.Gamma2);
    std::swap(q.kappa1, q.kappa2);
    std::swap(q.delta_A1, q.delta_A2);
    std::swap(q.delta_C1, q.delta_C2);
    std::swap(q.eta1, q.eta2);
    return q;
}

ValidationReport validate(const SystemParams& p, bool allow_zero_cross_decay)
{
    ValidationReport r;
    auto positive = [&](double v, const char* name, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v))
            r.issues.push_back(std::string(name) + ": nonpositive " + what);
    };
    positive(p.gamma1, "gamma1", "linewidth");
    positive(p.gamma2, "gamma2", "linewidth");
    positive(p.kappa1, "kappa1", "linewidth");
    positive(p.kappa2, "kappa2", "linewidth");
    if (allow_zero_cross_decay) {
        if (!(p.Gamma1 >= 0.0) || !std::isfinite(p.Gamma1))
            r.issues.push_back("Gamma1: negative cross-decay rate");
        if (!(p.Gamma2 >= 0.0) || !std::isfinite(p.Gamma2))
            r.issues.push_back("Gamma2: negative cross-decay rate");
    } else {
        positive(p.Gamma1, "Gamma1", "cross-decay rate");
        positive(p.Gamma2, "Gamma2", "cross-decay rate");
    }
    if (!(p.eta1 >= 0.0) || !std::isfinite(p.eta1))
        r.issues.push_back("eta1: negative drive amplitude");
    if (!(p.eta2 >= 0.0) || !std::isfinite(p.eta2))
        r.issues.push_back("eta2: negative drive amplitude");
    if (!(p.N >= 1.0) || !std::isfinite(p.N))
        r.issues.push_back("N: atom number below 1");
    if (!(p.g_single >= 0.0) || !std::isfinite(p.g_single))
        r.issues.push_back("g_single: negative coupling");
    for (auto [v, name] : {std::pair{p.delta_A1, "delta_A1"}, std::pair{p.delta_A2, "delta_A2"},
                           std::pair{p.delta_C1, "delta_C1"}, std::pair{p.delta_C2, "delta_C2"}}) {
        if (!std::isfinite(v))
            r.issues.push_back(std::string(name) + ": non-finite detuning");
    }
    return r;
}

void require_valid(const SystemParams& p, bool allow_zero_cross_decay)
{
    auto report = validate(p, allow_zero_cross_decay);
    if (report.ok())
        return;
    std::ostringstream msg;
    msg << "invalid parameters:";
    for (const auto& issue : report.issues)
        msg << ' ' << issue << ';';
    throw std::invalid_argument(msg.str());
}

RealStateVector MeanFieldState::to_real() const
{
    RealStateVector v;
    v << alpha1.real(), alpha1.imag(), alpha2.real(), alpha2.imag(), m1.real(), m1.imag(),
        m2.real(), m2.imag(), ne1, ng1, ne2, ng2;
    return v;
}

MeanFieldState MeanFieldState::from_real(const RealStateVector& v)
{
    MeanFieldState s;
    s.alpha1 = {v[idx::re_alpha1], v[idx::im_alpha1]};
    s.alpha2 = {v[idx::re_alpha2], v[idx::im_alpha2]};
    s.m1 = {v[idx::re_m1], v[idx::im_m1]};
    s.m2 = {v[idx::re_m2], v[idx::im_m2]};
    s.ne1 = v[idx::ne1];
    s.ng1 = v[idx::ng1];
    s.ne2 = v[idx::ne2];
    s.ng2 = v[idx::ng2];
    return s;
}

MeanFieldState swapped(const MeanFieldState& s)
{
    MeanFieldState t;
    t.alpha1 = s.alpha2;
    t.alpha2 = s.alpha1;
    t.m1 = s.m2;
    t.m2 = s.m1;
    t.ne1 = s.ne2;
    t.ng1 = s.ng2;
    t.ne2 = s.ne1;
    t.ng2 = s.ng1;
    return t;
}

MeanFieldState ground_state(Mode populated)
{
    MeanFieldState s;
    (populated == Mode::one ? s.ng1 : s.ng2) = 1.0;
    return s;
}

MeanFieldState rhs(const MeanFieldState& s, const SystemParams& p)
{
    const double g = p.g();
    MeanFieldState d;

    d.alpha1 = complex(-p.kappa1, p.delta_C1) * s.alpha1 + g * s.m1 + p.eta1;
    d.alpha2 = complex(-p.kappa2, p.delta_C2) * s.alpha2 + g * s.m2 + p.eta2;

    const double x1 = s.ne1 - s.ng1;
    const double x2 = s.ne2 - s.ng2;
    d.m1 = complex(-(p.gamma1 + p.Gamma1), p.delta_A1) * s.m1 + g * x1 * s.alpha1;
    d.m2 = complex(-(p.gamma2 + p.Gamma2), p.delta_A2) * s.m2 + g * x2 * s.alpha2;

    // g (alpha^* m + m^* alpha): population moved from e_i to g_i by the field
    double pump1 = 2.0 * g * (s.alpha1.real() * s.m1.real() + s.alpha1.imag() * s.m1.imag());
    double pump2 = 2.0 * g * (s.alpha2.real() * s.m2.real() + s.alpha2.imag() * s.m2.imag());
    double direct1 = 2.0 * p.gamma1 * s.ne1;
    double direct2 = 2.0 * p.gamma2 * s.ne2;
    double cross1 = 2.0 * p.Gamma1 * s.ne1;
    double cross2 = 2.0 * p.Gamma2 * s.ne2;

    // Round every flow to a common quantum 2^-50 of the largest one. Sums of
    // a few such multiples are exact, so the four derivatives below add up
    // to exactly zero in any order. Without cross decay each transition is
    // closed and gets its own quantum, keeping the two independent.
    auto quantize = [](std::initializer_list<double*> flows) {
        double largest = 0.0;
        for (const double* f : flows)
            largest = std::max(largest, std::abs(*f));
        if (!(largest > 0.0) || !std::isfinite(largest))
            return;
        const int e = std::ilogb(largest) + 1 - 50;
        for (double* f : flows)
            *f = std::ldexp(std::nearbyint(std::ldexp(*f, -e)), e);
    };
    if (p.Gamma1 == 0.0 && p.Gamma2 == 0.0) {
        quantize({&pump1, &direct1});
        quantize({&pump2, &direct2});
    } else {
        quantize({&pump1, &pump2, &direct1, &direct2, &cross1, &cross2});
    }

    d.ne1 = -pump1 - direct1 - cross1;
    d.ng1 = pump1 + direct1 + cross2;
    d.ne2 = -pump2 - direct2 - cross2;
    d.ng2 = pump2 + direct2 + cross1;
    return d;
}

RealStateVector rhs(const RealStateVector& v, const SystemParams& p)
{
    return rhs(MeanFieldState::from_real(v), p).to_real();
}

RealMatrix jacobian(const MeanFieldState& s, const SystemParams& p)
{
    const double g = p.g();
    RealMatrix J = RealMatrix::Zero();

    struct Block {
        int ra, ia, rm, im, ne, ng, other_ne, other_ng;
        double kappa, dC, damp, dA, gamma, cross;
        complex alpha, m;
        double x;
    };
    const Block blocks[2] = {
        {idx::re_alpha1, idx::im_alpha1, idx::re_m1, idx::im_m1, idx::ne1, idx::ng1, idx::ne2, idx::ng2,
         p.kappa1, p.delta_C1, p.gamma1 + p.Gamma1, p.delta_A1, p.gamma1, p.Gamma1, s.alpha1, s.m1,
         s.ne1 - s.ng1},
        {idx::re_alpha2, idx::im_alpha2, idx::re_m2, idx::im_m2, idx::ne2, idx::ng2, idx::ne1, idx::ng1,
         p.kappa2, p.delta_C2, p.gamma2 + p.Gamma2, p.delta_A2, p.gamma2, p.Gamma2, s.alpha2, s.m2,
         s.ne2 - s.ng2},
    };

    for (const Block& b : blocks) {
        const double a = b.alpha.real(), c = b.alpha.imag();
        const double mr = b.m.real(), mi = b.m.imag();

        J(b.ra, b.ra) = -b.kappa;
        J(b.ra, b.ia) = -b.dC;
        J(b.ra, b.rm) = g;
        J(b.ia, b.ra) = b.dC;
        J(b.ia, b.ia) = -b.kappa;
        J(b.ia, b.im) = g;

        J(b.rm, b.rm) = -b.damp;
        J(b.rm, b.im) = -b.dA;
        J(b.rm, b.ra) = g * b.x;
        J(b.rm, b.ne) = g * a;
        J(b.rm, b.ng) = -g * a;
        J(b.im, b.rm) = b.dA;
        J(b.im, b.im) = -b.damp;
        J(b.im, b.ia) = g * b.x;
        J(b.im, b.ne) = g * c;
        J(b.im, b.ng) = -g * c;

        const double dpump[4] = {2.0 * g * mr, 2.0 * g * mi, 2.0 * g * a, 2.0 * g * c};
        const int cols[4] = {b.ra, b.ia, b.rm, b.im};
        for (int k = 0; k < 4; ++k) {
            J(b.ne, cols[k]) = -dpump[k];
            J(b.ng, cols[k]) = dpump[k];
        }
        J(b.ne, b.ne) = -2.0 * b.damp;
        J(b.ng, b.ne) = 2.0 * b.gamma;
        // cross decay from this transition's excited state feeds the other ground state
        J(b.other_ng, b.ne) = 2.0 * b.cross;
    }
    return J;
}

double cooperativity(const SystemParams& p, Mode m)
{
    const double dc = p.delta_C(m), k = p.kappa(m), da = p.delta_A(m), gm = p.gamma(m);
    return p.g_squared() / std::sqrt((dc * dc + k * k) * (da * da + gm * gm));
}

} // namespace bistab
