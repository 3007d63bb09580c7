// arc.hpp - drive amplitudes on a quarter circle eta1^2 + eta2^2 = eta^2.

#pragma once

#include "bistab/model.hpp"

#include <numbers>
#include <string>
#include <utility>

namespace bistab {

/// from_axis_1: phi = atan(eta2 / eta1), eta1 = eta cos(phi).
/// from_vertical: phi is measured from the eta2 axis, eta2 = eta cos(phi).
enum class AngleConvention { from_axis_1, from_vertical };

std::string to_string(AngleConvention c);
AngleConvention angle_convention_from_string(const std::string& s);

/// (eta1, eta2) at angle phi. Exact zeros at phi = 0 and phi = pi/2.
std::pair<double, double> arc_drives(double radius, double phi, AngleConvention c);

inline SystemParams with_drives(SystemParams p, std::pair<double, double> drives)
{
    p.eta1 = drives.first;
    p.eta2 = drives.second;
    return p;
}

inline constexpr double quarter_turn = std::numbers::pi / 2.0;

} // namespace bistab
