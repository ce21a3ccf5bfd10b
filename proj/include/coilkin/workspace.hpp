#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <ostream>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "coilkin/actuation.hpp"
#include "coilkin/error.hpp"
#include "coilkin/kinematics.hpp"

namespace coilkin {

enum class Feasibility { Ok, SOutOfBounds, ThetaOutOfBounds, ServoOutOfRange };

inline const char* to_string(Feasibility f)
{
    switch (f) {
    case Feasibility::Ok: return "ok";
    case Feasibility::SOutOfBounds: return "s-out-of-bounds";
    case Feasibility::ThetaOutOfBounds: return "theta-out-of-bounds";
    case Feasibility::ServoOutOfRange: return "servo-out-of-range";
    }
    return "?";
}

struct WorkspaceSample {
    ArcState state;
    Point3 spring_top = Point3::Zero();
    Point3 tip = Point3::Zero();
    Feasibility reason = Feasibility::Ok;

    bool feasible() const { return reason == Feasibility::Ok; }
};

struct WorkspaceGrid {
    std::size_t n_alpha = 72;
    std::size_t n_theta = 19;
    std::size_t n_s = 11;

    std::size_t size() const { return n_alpha * n_theta * n_s; }
};

// Classifies one configuration. Positions are filled from the unchecked
// closed form so out-of-bounds states still report where they would sit.
inline WorkspaceSample evaluate_sample(const ArcState& state, const RobotGeometry& geom)
{
    WorkspaceSample out;
    out.state = state;

    RobotGeometry loose = geom;
    loose.s_min = std::min(geom.s_min, state.s);
    loose.s_max = std::max(geom.s_max, state.s);

    if (!(state.theta >= 0.0 && state.theta <= kHalfPi * (1.0 + 1e-12))) {
        out.reason = Feasibility::ThetaOutOfBounds;
        return out;
    }
    out.spring_top = fk_spring_top(state, loose);
    out.tip = fk_tip(state, loose);

    if (!(state.s >= geom.s_min * (1.0 - 1e-12) && state.s <= geom.s_max * (1.0 + 1e-12))) {
        out.reason = Feasibility::SOutOfBounds;
        return out;
    }
    try {
        tendon_to_servo(tendon_lengths(state, geom), home_tendons(geom), geom);
    } catch (const Error&) {
        out.reason = Feasibility::ServoOutOfRange;
    }
    return out;
}

inline ArcState grid_state(const WorkspaceGrid& grid, const RobotGeometry& geom, std::size_t index)
{
    const std::size_t k = index % grid.n_s;
    const std::size_t j = (index / grid.n_s) % grid.n_theta;
    const std::size_t i = index / (grid.n_s * grid.n_theta);
    const double alpha = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(grid.n_alpha);
    const double theta = grid.n_theta > 1 ? kHalfPi * static_cast<double>(j) / static_cast<double>(grid.n_theta - 1) : 0.0;
    const double s = grid.n_s > 1
                         ? geom.s_min + (geom.s_max - geom.s_min) * static_cast<double>(k) / static_cast<double>(grid.n_s - 1)
                         : geom.s_min;
    return ArcState::bent(alpha, theta, s);
}

// Samples alpha in [0, 2pi) (outer), theta in [0, pi/2] (middle) and s in
// [s_min, s_max] (inner). Output order is the grid order for any thread count.
inline std::vector<WorkspaceSample> sample_workspace(const RobotGeometry& geom, const WorkspaceGrid& grid,
                                                     unsigned threads = 1)
{
    if (grid.n_alpha == 0 || grid.n_theta == 0 || grid.n_s == 0)
        throw Error(ErrorCode::ParseError, "workspace grid counts must be >= 1");

    std::vector<WorkspaceSample> out(grid.size());
    auto fill = [&](std::size_t begin, std::size_t end) {
        for (std::size_t n = begin; n < end; ++n)
            out[n] = evaluate_sample(grid_state(grid, geom, n), geom);
    };

    threads = std::max(1u, threads);
    if (threads == 1) {
        fill(0, out.size());
        return out;
    }
    std::vector<std::jthread> workers;
    const std::size_t chunk = (out.size() + threads - 1) / threads;
    for (std::size_t begin = 0; begin < out.size(); begin += chunk)
        workers.emplace_back(fill, begin, std::min(out.size(), begin + chunk));
    return out;
}

struct WorkspaceExtents {
    double z_min;
    double z_max;
    double radial_max;
    std::size_t feasible;
};

inline WorkspaceExtents workspace_extents(const std::vector<WorkspaceSample>& samples)
{
    WorkspaceExtents e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0, 0};
    for (const auto& s : samples) {
        if (!s.feasible())
            continue;
        ++e.feasible;
        e.z_min = std::min(e.z_min, s.spring_top.z());
        e.z_max = std::max(e.z_max, s.spring_top.z());
        e.radial_max = std::max(e.radial_max, std::hypot(s.spring_top.x(), s.spring_top.y()));
    }
    if (e.feasible == 0)
        throw Error(ErrorCode::EmptyWorkspace, "no feasible workspace samples");
    return e;
}

inline void write_workspace_csv(std::ostream& os, const std::vector<WorkspaceSample>& samples)
{
    os << "alpha,theta,s,xU,yU,zU,xE,yE,zE,feasible,reason\n";
    for (const auto& w : samples) {
        fmt::print(os, "{:.9f},{:.9f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:d},{}\n", w.state.alpha,
                   w.state.theta, w.state.s, w.spring_top.x(), w.spring_top.y(), w.spring_top.z(), w.tip.x(), w.tip.y(),
                   w.tip.z(), int(w.feasible()), to_string(w.reason));
    }
}

// ASCII PLY of the feasible spring-top points.
inline void write_workspace_ply(std::ostream& os, const std::vector<WorkspaceSample>& samples)
{
    const auto count = std::count_if(samples.begin(), samples.end(), [](const auto& w) { return w.feasible(); });
    os << "ply\nformat ascii 1.0\nelement vertex " << count << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
    for (const auto& w : samples)
        if (w.feasible())
            fmt::print(os, "{:.6f} {:.6f} {:.6f}\n", w.spring_top.x(), w.spring_top.y(), w.spring_top.z());
}

} // namespace coilkin
