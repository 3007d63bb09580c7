// Parameter-point helpers shared by the test suites.

#pragma once

#include "bistab/arc.hpp"
#include "bistab/model.hpp"
#include "bistab/steady_state.hpp"

#include <algorithm>

namespace fixture {

using namespace bistab;

inline SystemParams at(double N, double eta1, double eta2)
{
    SystemParams p = baseline_params(N);
    p.eta1 = eta1;
    p.eta2 = eta2;
    return p;
}

/// phi measured from the eta1 axis.
inline SystemParams on_arc(double N, double radius, double phi)
{
    return with_drives(baseline_params(N), arc_drives(radius, phi, AngleConvention::from_axis_1));
}

inline int count_stable(const SolutionSet& set)
{
    return static_cast<int>(std::count_if(set.solutions.begin(), set.solutions.end(),
                                          [](const SteadyState& s) { return s.stable; }));
}

inline double rhs_norm(const MeanFieldState& s, const SystemParams& p)
{
    return rhs(s.to_real(), p).norm();
}

} // namespace fixture
