#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "coilkin/error.hpp"
#include "coilkin/scene.hpp"

namespace coilkin::catalog {

// Named synthetic objects for the 200 x 200 mm scan area. Each profile is
// expressed relative to the object's own center so it can be placed anywhere.
using Profile = std::function<double(double, double)>;

inline Profile object(const std::string& name, double cx, double cy)
{
    if (name == "flat")
        return [](double, double) { return 12.25; };
    if (name == "plateau")
        return shapes::plateau(cx, cy, 50, 50, 40);
    if (name == "two-tier")
        return shapes::two_tier_box(cx, cy, 60, 40, 15, 35);
    if (name == "cylinder")
        return shapes::cylinder(cx, cy, 40, 25.7);
    if (name == "sphere-cap")
        return shapes::sphere_cap(cx, cy, 80, 45);
    if (name == "open-container")
        return shapes::open_container(cx, cy, 70, 50, 10, 30, 20);
    if (name == "wedge")
        return shapes::wedge(cx, cy, 60, 30, 10, 40);
    if (name == "ring") {
        // Ring with a central hub standing above it.
        auto band = shapes::ring(cx, cy, 15, 32, 18);
        auto hub = shapes::cylinder(cx, cy, 8, 30);
        return [=](double x, double y) { return std::max(band(x, y), hub(x, y)); };
    }
    throw Error(ErrorCode::ParseError, "unknown catalog object '" + name + "'");
}

inline std::vector<std::string> names()
{
    return {"flat", "plateau", "two-tier", "cylinder", "sphere-cap", "open-container", "wedge", "ring"};
}

// Catalog object rendered into a 2 mm height field over the default scan area.
inline HeightField height_field(const std::string& name, double cx = 100.0, double cy = 100.0)
{
    return scan_area_field(object(name, cx, cy), Point2(0, 0), 200, 200, 2.0);
}

} // namespace coilkin::catalog
