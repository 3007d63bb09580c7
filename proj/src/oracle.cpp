#include "bistab/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bistab {

namespace {

// Symmetric Dirichlet draw on the population simplex. shape = 1 is
// uniform; small shapes concentrate the mass near the vertices.
std::array<double, 4> random_populations(std::mt19937_64& rng, double shape = 1.0)
{
    std::gamma_distribution<double> gamma(shape, 1.0);
    std::array<double, 4> n{};
    double sum = 0.0;
    while (!(sum > 0.0)) {
        sum = 0.0;
        for (double& v : n)
            sum += (v = gamma(rng));
    }
    for (double& v : n)
        v /= sum;
    return n;
}

complex random_phase(double magnitude, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    return std::polar(magnitude, angle(rng));
}

void add_solution(OracleResult& out, const SteadyState& ss, bool settled)
{
    for (std::size_t i = 0; i < out.solutions.solutions.size(); ++i) {
        if (state_distance(out.solutions.solutions[i].state, ss.state) < tolerance::dedup) {
            if (settled)
                out.reached_by_settling[i] = true;
            return;
        }
    }
    out.solutions.solutions.push_back(ss);
    out.reached_by_settling.push_back(settled);
}

} // namespace

MeanFieldState random_physical_state(const SystemParams& p, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto n = random_populations(rng);
    MeanFieldState s;
    s.ne1 = n[0];
    s.ng1 = n[1];
    s.ne2 = n[2];
    s.ng2 = n[3];
    s.m1 = random_phase(std::sqrt(s.ne1 * s.ng1) * unit(rng), rng);
    s.m2 = random_phase(std::sqrt(s.ne2 * s.ng2) * unit(rng), rng);
    s.alpha1 = random_phase(1.5 * p.eta1 / p.kappa1 * unit(rng), rng);
    s.alpha2 = random_phase(1.5 * p.eta2 / p.kappa2 * unit(rng), rng);
    return s;
}

MeanFieldState random_adiabatic_state(const SystemParams& p, std::mt19937_64& rng, double shape)
{
    const auto n = random_populations(rng, shape);
    MeanFieldState s;
    s.ne1 = n[0];
    s.ng1 = n[1];
    s.ne2 = n[2];
    s.ng2 = n[3];
    const double x1 = s.ne1 - s.ng1;
    const double x2 = s.ne2 - s.ng2;
    try {
        s.alpha1 = alpha_of_x(x1, p, Mode::one);
        s.alpha2 = alpha_of_x(x2, p, Mode::two);
        s.m1 = polarization_of_x(x1, p, Mode::one);
        s.m2 = polarization_of_x(x2, p, Mode::two);
    } catch (const SingularParameterError&) {
        s.alpha1 = s.alpha2 = s.m1 = s.m2 = 0.0;
    }
    return s;
}

OracleResult multistart_oracle(const SystemParams& p, int n_starts, std::uint64_t seed,
                               const SettleOptions& settle_opts)
{
    require_valid(p, true);
    if (n_starts < 50)
        throw std::invalid_argument("multistart oracle needs at least 50 starts");

    std::mt19937_64 rng(seed);
    OracleResult out;
    out.solutions.params = p;

    for (int k = 0; k < n_starts; ++k) {
        MeanFieldState start;
        switch (k % 3) {
        case 0: start = random_physical_state(p, rng); break;
        case 1: start = random_adiabatic_state(p, rng); break;
        default: start = random_adiabatic_state(p, rng, kSparseShape); break;
        }

        const NewtonResult newton = refine_fixed_point(start, p);
        if (newton.converged)
            add_solution(out, make_steady_state(newton.state, p), false);

        const SettleResult settled = settle(start, p, settle_opts);
        if (const auto* ss = std::get_if<SteadyState>(&settled))
            add_solution(out, *ss, true);
    }

    // sort both vectors together by x1
    std::vector<std::size_t> order(out.solutions.solutions.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return out.solutions.solutions[a].x1 < out.solutions.solutions[b].x1;
    });
    OracleResult sorted;
    sorted.solutions.params = p;
    for (std::size_t i : order) {
        sorted.solutions.solutions.push_back(out.solutions.solutions[i]);
        sorted.reached_by_settling.push_back(out.reached_by_settling[i]);
    }
    return sorted;
}

} // namespace bistab
