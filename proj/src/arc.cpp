#include "bistab/arc.hpp"

#include <cmath>
#include <stdexcept>

namespace bistab {

std::string to_string(AngleConvention c)
{
    return c == AngleConvention::from_axis_1 ? "from-axis-1" : "from-vertical";
}

AngleConvention angle_convention_from_string(const std::string& s)
{
    if (s == "from-axis-1")
        return AngleConvention::from_axis_1;
    if (s == "from-vertical")
        return AngleConvention::from_vertical;
    throw std::invalid_argument("unknown angle convention '" + s + "'");
}

std::pair<double, double> arc_drives(double radius, double phi, AngleConvention c)
{
    double along = radius * std::cos(phi);
    double across = radius * std::sin(phi);
    if (phi == 0.0)
        across = 0.0;
    if (phi == quarter_turn) {
        along = 0.0;
        across = radius;
    }
    if (c == AngleConvention::from_axis_1)
        return {along, across};
    return {across, along};
}

} // namespace bistab
