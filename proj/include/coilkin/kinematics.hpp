#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "coilkin/error.hpp"
#include "coilkin/geometry.hpp"
#include "coilkin/transform.hpp"

namespace coilkin {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

// Below this in-plane distance (mm) a target is treated as pure compression.
inline constexpr double kPlanarEpsilon = 1e-6;
inline constexpr double kDegenerateEpsilon = 1e-9;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle into [0, 2pi).
inline double wrap_two_pi(double angle)
{
    double a = std::fmod(angle, 2.0 * kPi);
    if (a < 0.0)
        a += 2.0 * kPi;
    if (a >= 2.0 * kPi)
        a = 0.0;
    return a;
}

// Constant-curvature configuration of the backbone. r is +inf when straight.
struct ArcState {
    double alpha = 0.0; // bend plane angle about z of the base frame
    double theta = 0.0; // bend angle about the arc center
    double r = std::numeric_limits<double>::infinity();
    double s = 0.0;     // backbone arc length

    static ArcState straight(double s) { return {0.0, 0.0, std::numeric_limits<double>::infinity(), s}; }

    static ArcState bent(double alpha, double theta, double s)
    {
        if (theta == 0.0)
            return {alpha, 0.0, std::numeric_limits<double>::infinity(), s};
        return {alpha, theta, s / theta, s};
    }

    bool is_straight() const { return theta == 0.0; }
};

inline void validate_state(const ArcState& state, const RobotGeometry& geom)
{
    constexpr double rel = 1e-9;
    if (!(state.theta >= 0.0 && state.theta <= kHalfPi * (1.0 + rel)))
        throw Error(ErrorCode::InvalidState, "theta " + std::to_string(state.theta) + " outside [0, pi/2]");
    if (!(state.s >= geom.s_min * (1.0 - rel) && state.s <= geom.s_max * (1.0 + rel)))
        throw Error(ErrorCode::InvalidState, "s " + std::to_string(state.s) + " outside [s_min, s_max]");
    if (state.theta > 0.0 && std::abs(state.s - state.r * state.theta) >= rel * state.s)
        throw Error(ErrorCode::InvalidState, "arc length inconsistent with r * theta");
}

// Base-frame -> spring-top-frame transform in closed form. The translation is
// evaluated through s so that it stays well conditioned as theta -> 0.
inline Transform fk_transform(const ArcState& state, const RobotGeometry& geom)
{
    validate_state(state, geom);

    const double ca = std::cos(state.alpha), sa = std::sin(state.alpha);
    const double ct = std::cos(state.theta), st = std::sin(state.theta);

    // r (1 - cos theta) and r sin theta with r = s / theta
    double radial = 0.0;
    double axial = state.s;
    if (state.theta > 0.0) {
        const double half = std::sin(0.5 * state.theta);
        radial = state.s * 2.0 * half * half / state.theta;
        axial = state.s * st / state.theta;
    }

    Eigen::Matrix4d m;
    m << ca * ca * ct + sa * sa, sa * ca * ct - sa * ca, ca * st, radial * ca,
         sa * ca * ct - sa * ca, sa * sa * ct + ca * ca, sa * st, radial * sa,
         -ca * st,               -sa * st,               ct,      axial,
         0.0,                    0.0,                    0.0,     1.0;
    return Transform(m);
}

inline Point3 fk_spring_top(const ArcState& state, const RobotGeometry& geom)
{
    return fk_transform(state, geom).translation();
}

// Point at distance `offset` past the spring top along the tip tangent.
inline Point3 point_along_tip(const ArcState& state, const RobotGeometry& geom, double offset)
{
    const Transform t = fk_transform(state, geom);
    return t.translation() + offset * t.rotation().col(2);
}

inline Point3 fk_tip(const ArcState& state, const RobotGeometry& geom)
{
    return point_along_tip(state, geom, geom.l);
}

inline Point3 bristle_tip(const ArcState& state, const RobotGeometry& geom)
{
    return point_along_tip(state, geom, geom.probe_offset());
}

struct ArcParameters {
    double alpha;
    double theta;
    double r;
};

// Unchecked inversion of the spring-top position for a bent arc (rho > 0).
// theta uses the two-argument form of arccos((z^2 - rho^2) / (z^2 + rho^2)),
// which keeps full precision near theta = 0.
inline ArcParameters arc_from_point(const Point3& u)
{
    const double rho2 = u.x() * u.x() + u.y() * u.y();
    const double rho = std::sqrt(rho2);
    const double z = u.z();
    return {
        wrap_two_pi(std::atan2(u.y(), u.x())),
        std::atan2(2.0 * rho * z, z * z - rho2),
        (rho2 + z * z) / (2.0 * rho),
    };
}

inline ArcState ik(const Point3& target, const RobotGeometry& geom)
{
    if (target.norm() < kDegenerateEpsilon)
        throw Error(ErrorCode::DegenerateTarget, "target coincides with the base origin");

    ArcState state;
    const double rho = std::hypot(target.x(), target.y());
    if (rho < kPlanarEpsilon) {
        state = ArcState::straight(target.z());
    } else {
        const ArcParameters p = arc_from_point(target);
        state = {p.alpha, p.theta, p.r, p.r * p.theta};
    }

    if (!(state.theta >= 0.0 && state.theta <= kHalfPi * (1.0 + 1e-12)))
        throw Error(ErrorCode::UnreachableTarget, "target requires bend angle outside [0, pi/2]");
    if (!(state.s >= geom.s_min * (1.0 - 1e-12) && state.s <= geom.s_max * (1.0 + 1e-12)))
        throw Error(ErrorCode::UnreachableTarget,
                    "target requires backbone length " + std::to_string(state.s) + " mm outside bounds");
    return state;
}

// Tendon attachment points, lower (fixed, base holder) and higher (spring top holder).
struct AttachmentPoints {
    std::array<Point3, 4> lower;
    std::array<Point3, 4> higher;
};

inline std::array<Point3, 4> lower_attachments(double d)
{
    return {Point3(d, 0.0, 0.0), Point3(0.0, d, 0.0), Point3(-d, 0.0, 0.0), Point3(0.0, -d, 0.0)};
}

inline AttachmentPoints attachment_points(const ArcState& state, const RobotGeometry& geom)
{
    const Point3 u = fk_spring_top(state, geom);
    const double d = geom.d;
    const double ca = std::cos(state.alpha), sa = std::sin(state.alpha);
    const double ct = std::cos(state.theta), st = std::sin(state.theta);

    // First two columns of the rotation block, scaled by d.
    const Point3 col_x(d * ca * ca * ct + d * sa * sa, d * sa * ca * ct - d * sa * ca, -d * ca * st);
    const Point3 col_y(d * sa * ca * ct - d * sa * ca, d * sa * sa * ct + d * ca * ca, -d * sa * st);

    AttachmentPoints pts;
    pts.lower = lower_attachments(d);
    pts.higher = {u + col_x, u + col_y, u - col_x, u - col_y};
    return pts;
}

struct TendonSet {
    std::array<double, 4> q{};

    double& operator[](std::size_t i) { return q[i]; }
    double operator[](std::size_t i) const { return q[i]; }

    static TendonSet uniform(double length) { return {{length, length, length, length}}; }
};

enum class TendonBranch { Straight, InnerArc, OuterChord };

struct TendonSolution {
    TendonSet lengths;
    std::array<TendonBranch, 4> branch{};
};

// Inner-semicircle tendons follow an arc of radius |P_L - C|; the others are
// straight chords. A tie |P_L - C| == sqrt(r^2 + d^2) resolves to the chord.
inline TendonSolution solve_tendons(const ArcState& state, const RobotGeometry& geom)
{
    validate_state(state, geom);
    TendonSolution out;
    if (state.is_straight()) {
        out.lengths = TendonSet::uniform(state.s);
        out.branch.fill(TendonBranch::Straight);
        return out;
    }

    const AttachmentPoints pts = attachment_points(state, geom);
    const double r = state.r;
    const Point3 center(r * std::cos(state.alpha), r * std::sin(state.alpha), 0.0);
    const double boundary2 = r * r + geom.d * geom.d;
    const double tie_band = 1e-12 * boundary2;

    for (std::size_t i = 0; i < 4; ++i) {
        const double dist2 = (pts.lower[i] - center).squaredNorm();
        if (boundary2 - dist2 > tie_band) {
            out.lengths[i] = std::sqrt(dist2) * state.theta;
            out.branch[i] = TendonBranch::InnerArc;
        } else {
            out.lengths[i] = (pts.lower[i] - pts.higher[i]).norm();
            out.branch[i] = TendonBranch::OuterChord;
        }
    }
    return out;
}

inline TendonSet tendon_lengths(const ArcState& state, const RobotGeometry& geom)
{
    return solve_tendons(state, geom).lengths;
}

enum class BendDirection { PosX, NegX, PosY, NegY };

inline const char* to_string(BendDirection dir)
{
    switch (dir) {
    case BendDirection::PosX: return "+X";
    case BendDirection::NegX: return "-X";
    case BendDirection::PosY: return "+Y";
    case BendDirection::NegY: return "-Y";
    }
    return "?";
}

inline BendDirection parse_direction(const std::string& text)
{
    if (text == "+X" || text == "+x" || text == "x") return BendDirection::PosX;
    if (text == "-X" || text == "-x") return BendDirection::NegX;
    if (text == "+Y" || text == "+y" || text == "y") return BendDirection::PosY;
    if (text == "-Y" || text == "-y") return BendDirection::NegY;
    throw Error(ErrorCode::ParseError, "unknown bend direction '" + text + "'");
}

struct CommandTarget {
    Point3 point;
    double s;           // backbone length the command requires
    double theta;
    BendDirection direction;
};

// Spring-top target for a commanded height and bend angle in one of the four
// tendon planes. Bounded by the backbone length the arc would need.
inline CommandTarget target_from_z_theta(double z, double theta, BendDirection dir, const RobotGeometry& geom)
{
    if (!(z > 0.0))
        throw Error(ErrorCode::UnreachableTarget, "commanded z must be positive");
    if (!(theta >= 0.0 && theta <= kHalfPi * (1.0 + 1e-12)))
        throw Error(ErrorCode::UnreachableTarget, "commanded theta outside [0, pi/2]");

    CommandTarget t{Point3(0.0, 0.0, z), z, theta, dir};
    if (theta > 0.0) {
        const double r = z / std::sin(theta);
        const double half = std::sin(0.5 * theta);
        const double disp = r * 2.0 * half * half;
        t.s = r * theta;
        switch (dir) {
        case BendDirection::PosX: t.point.x() = disp; break;
        case BendDirection::NegX: t.point.x() = -disp; break;
        case BendDirection::PosY: t.point.y() = disp; break;
        case BendDirection::NegY: t.point.y() = -disp; break;
        }
    }
    if (!(t.s >= geom.s_min * (1.0 - 1e-12) && t.s <= geom.s_max * (1.0 + 1e-12)))
        throw Error(ErrorCode::UnreachableTarget,
                    "command needs backbone length " + std::to_string(t.s) + " mm outside bounds");
    return t;
}

// Pose-validation command set: pure compression from 30 to 70 mm in 5 mm steps,
// then for each of the four directions every (z, theta) pair with z in 40..70 mm
// (5 mm steps) and theta in 10..90 deg (10 deg steps) whose arc fits the backbone.
inline std::vector<CommandTarget> validation_targets(const RobotGeometry& geom)
{
    std::vector<CommandTarget> out;
    for (int k = 0; k <= 8; ++k) {
        const double z = 30.0 + 5.0 * k;
        if (z >= geom.s_min && z <= geom.s_max)
            out.push_back(target_from_z_theta(z, 0.0, BendDirection::PosX, geom));
    }
    for (BendDirection dir : {BendDirection::PosX, BendDirection::NegX, BendDirection::PosY, BendDirection::NegY}) {
        for (int zi = 0; zi <= 6; ++zi) {
            for (int ti = 1; ti <= 9; ++ti) {
                try {
                    out.push_back(target_from_z_theta(40.0 + 5.0 * zi, deg2rad(10.0 * ti), dir, geom));
                } catch (const Error&) {
                }
            }
        }
    }
    return out;
}

} // namespace coilkin
