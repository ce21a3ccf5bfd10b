#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "coilkin/error.hpp"
#include "coilkin/geometry.hpp"
#include "coilkin/kinematics.hpp"

namespace coilkin {

struct ServoCommand {
    std::array<double, 4> angle{}; // degrees, each in [0, servo_range]
    std::array<bool, 4> slack{};   // tendon needed payout past home

    // angle1..angle4,slack1..slack4
    std::string to_csv() const
    {
        return fmt::format("{:.6f},{:.6f},{:.6f},{:.6f},{:d},{:d},{:d},{:d}", angle[0], angle[1], angle[2], angle[3],
                           int(slack[0]), int(slack[1]), int(slack[2]), int(slack[3]));
    }
};

inline constexpr const char* kServoCsvHeader = "angle1,angle2,angle3,angle4,slack1,slack2,slack3,slack4";

// Tendon length wound onto the pulley over the full servo travel.
inline double max_payout(const RobotGeometry& geom)
{
    return geom.servo_range / 360.0 * kPi * geom.pulley_diameter;
}

// Home is the fully extended straight backbone.
inline TendonSet home_tendons(const RobotGeometry& geom) { return TendonSet::uniform(geom.s_max); }

inline ServoCommand tendon_to_servo(const TendonSet& target, const TendonSet& home, const RobotGeometry& geom)
{
    constexpr double tolerance = 1e-9;
    const double circumference = kPi * geom.pulley_diameter;
    ServoCommand cmd;
    for (std::size_t i = 0; i < 4; ++i) {
        const double shorten = home[i] - target[i];
        cmd.slack[i] = shorten < 0.0;
        const double angle = std::max(0.0, shorten) / circumference * 360.0;
        if (angle > geom.servo_range + tolerance)
            throw Error(ErrorCode::ServoOutOfRange,
                        fmt::format("tendon {} needs {:.3f} deg, servo travel is {:.3f} deg", i + 1, angle,
                                    geom.servo_range));
        cmd.angle[i] = std::min(angle, geom.servo_range);
    }
    return cmd;
}

// Inverse of tendon_to_servo for non-slack tendons; slack tendons report home.
inline TendonSet servo_to_tendon(const ServoCommand& cmd, const TendonSet& home, const RobotGeometry& geom)
{
    const double circumference = kPi * geom.pulley_diameter;
    TendonSet out;
    for (std::size_t i = 0; i < 4; ++i)
        out[i] = home[i] - cmd.angle[i] * circumference / 360.0;
    return out;
}

struct TendonTrajectory {
    std::vector<TendonSet> waypoints;

    // Number of transitions; zero when start and goal coincide.
    std::size_t step_count() const { return waypoints.empty() ? 0 : waypoints.size() - 1; }
};

// The tendon with the largest change advances by exactly max_step_mm per step
// with any remainder in the final step; the others move in proportion.
inline TendonTrajectory interpolate(const TendonSet& from, const TendonSet& to, double max_step_mm)
{
    if (!(max_step_mm > 0.0))
        throw Error(ErrorCode::ParseError, "max_step_mm must be positive");

    double largest = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        largest = std::max(largest, std::abs(to[i] - from[i]));

    TendonTrajectory traj;
    traj.waypoints.push_back(from);
    if (largest == 0.0)
        return traj;

    const auto steps = static_cast<std::size_t>(std::ceil(largest / max_step_mm - 1e-12));
    for (std::size_t k = 1; k < steps; ++k) {
        const double fraction = static_cast<double>(k) * max_step_mm / largest;
        TendonSet w;
        for (std::size_t i = 0; i < 4; ++i)
            w[i] = from[i] + fraction * (to[i] - from[i]);
        traj.waypoints.push_back(w);
    }
    traj.waypoints.push_back(to);
    return traj;
}

} // namespace coilkin
