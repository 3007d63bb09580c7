#include "bistab/observables.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bistab {

double transmittance_exact(const SteadyState& ss, const SystemParams& p, Mode mode)
{
    const double eta = p.eta(mode);
    if (!(eta > 0.0))
        throw UndefinedNormalizationError("transmittance of an undriven mode");
    const double kappa = p.kappa(mode);
    return kappa * kappa * std::norm(ss.state.alpha(mode)) / (eta * eta);
}

double transmittance_approx(double x, const SystemParams& p, Mode mode)
{
    const double c = cooperativity(p, mode);
    return 1.0 / (1.0 + c * c * x * x);
}

double purity_proxy(const SteadyState& ss) { return ss.state.ne1 + ss.state.ne2; }

ObservableRecord observe(const SteadyState& ss, const SystemParams& p)
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    ObservableRecord r;
    r.T1 = p.eta1 > 0.0 ? transmittance_exact(ss, p, Mode::one) : nan;
    r.T2 = p.eta2 > 0.0 ? transmittance_exact(ss, p, Mode::two) : nan;
    r.ng1 = ss.state.ng1;
    r.ng2 = ss.state.ng2;
    r.ne1 = ss.state.ne1;
    r.ne2 = ss.state.ne2;
    r.purity_proxy = purity_proxy(ss);
    r.photon1 = std::norm(ss.state.alpha1) * p.N;
    r.photon2 = std::norm(ss.state.alpha2) * p.N;
    return r;
}

DiagnosticReport physicality_check(const MeanFieldState& s, double tol)
{
    DiagnosticReport r;
    const std::pair<double, const char*> pops[] = {
        {s.ne1, "ne1"}, {s.ng1, "ng1"}, {s.ne2, "ne2"}, {s.ng2, "ng2"}};
    for (auto [v, name] : pops) {
        if (!(v >= -tol && v <= 1.0 + tol)) {
            std::ostringstream msg;
            msg << name << " = " << v << " outside [0, 1]";
            r.flags.push_back(msg.str());
        }
    }
    const double sum = s.population_sum();
    if (!(std::abs(sum - 1.0) <= tol)) {
        std::ostringstream msg;
        msg << "population sum = " << sum;
        r.flags.push_back(msg.str());
    }
    if (!(std::norm(s.m1) <= s.ne1 * s.ng1 + tol))
        r.flags.push_back("coherence bound violated on transition 1");
    if (!(std::norm(s.m2) <= s.ne2 * s.ng2 + tol))
        r.flags.push_back("coherence bound violated on transition 2");
    return r;
}

} // namespace bistab
