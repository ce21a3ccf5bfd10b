#pragma once

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "coilkin/error.hpp"

namespace coilkin {

// Physical description of the spring-backbone robot. Lengths in mm, servo
// range in degrees, spring constant in N/m, contact threshold in hPa.
struct RobotGeometry {
    double d = 12.0;               // tendon attachment radius
    double s_min = 20.0;           // fully compressed backbone length
    double s_max = 70.0;           // effective (free) bending length
    double l = 53.0;               // spring top center to tip
    double pulley_diameter = 70.0;
    double servo_range = 120.0;
    double spring_constant = 220.0;
    double bristle_length = 53.0;
    double contact_threshold = 15.0;

    void validate() const
    {
        if (!(s_min > 0.0 && s_min < s_max))
            throw Error(ErrorCode::ParseError, "geometry requires 0 < s_min < s_max");
        if (!(d > 0.0))
            throw Error(ErrorCode::ParseError, "geometry requires d > 0");
        if (!(l >= 0.0))
            throw Error(ErrorCode::ParseError, "geometry requires l >= 0");
        if (!(pulley_diameter > 0.0))
            throw Error(ErrorCode::ParseError, "geometry requires pulley_diameter > 0");
        if (!(servo_range >= 0.0))
            throw Error(ErrorCode::ParseError, "geometry requires servo_range >= 0");
        if (!(bristle_length >= 0.0))
            throw Error(ErrorCode::ParseError, "geometry requires bristle_length >= 0");
    }

    // Distance from the spring top center to the bristle tip along the tip tangent.
    double probe_offset() const { return l + bristle_length; }
};

inline nlohmann::json to_json(const RobotGeometry& g)
{
    return {
        {"d", g.d},
        {"s_min", g.s_min},
        {"s_max", g.s_max},
        {"l", g.l},
        {"pulley_diameter", g.pulley_diameter},
        {"servo_range", g.servo_range},
        {"spring_constant", g.spring_constant},
        {"bristle_length", g.bristle_length},
        {"contact_threshold", g.contact_threshold},
    };
}

// Missing fields keep their defaults; unknown fields are rejected.
inline RobotGeometry geometry_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw Error(ErrorCode::ParseError, "geometry document must be a JSON object");

    RobotGeometry g;
    for (const auto& [key, value] : j.items()) {
        if (!value.is_number())
            throw Error(ErrorCode::ParseError, "geometry field '" + key + "' must be a number");
        const double v = value.get<double>();
        if (key == "d") g.d = v;
        else if (key == "s_min") g.s_min = v;
        else if (key == "s_max") g.s_max = v;
        else if (key == "l") g.l = v;
        else if (key == "pulley_diameter") g.pulley_diameter = v;
        else if (key == "servo_range") g.servo_range = v;
        else if (key == "spring_constant") g.spring_constant = v;
        else if (key == "bristle_length") g.bristle_length = v;
        else if (key == "contact_threshold") g.contact_threshold = v;
        else throw Error(ErrorCode::ParseError, "unknown geometry field '" + key + "'");
    }
    g.validate();
    return g;
}

inline RobotGeometry load_geometry(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open geometry file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
    return geometry_from_json(j);
}

} // namespace coilkin
