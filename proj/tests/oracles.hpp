#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library's kinematics path.

#include <cmath>
#include <numbers>

#include "coilkin/kinematics.hpp"

namespace oracle {

using coilkin::Point3;

// Spring-top position by Simpson integration of the unit tangent along an arc
// of length s bending by theta in the plane at angle alpha.
inline Point3 integrate_arc(double alpha, double theta, double s, int intervals = 2000)
{
    auto tangent = [&](double sigma) {
        const double phi = theta * sigma / s;
        return Point3(std::cos(alpha) * std::sin(phi), std::sin(alpha) * std::sin(phi), std::cos(phi));
    };
    const double h = s / intervals;
    Point3 acc = tangent(0.0) + tangent(s);
    for (int i = 1; i < intervals; ++i)
        acc += (i % 2 ? 4.0 : 2.0) * tangent(i * h);
    return acc * h / 3.0;
}

// Rot_z(alpha) D_x(r) Rot_y(theta) D_x(-r) Rot_z(-alpha).
inline coilkin::Transform compose_transform(double alpha, double theta, double r)
{
    using coilkin::Transform;
    return Transform::rot_z(alpha) * Transform::trans_x(r) * Transform::rot_y(theta) * Transform::trans_x(-r) *
           Transform::rot_z(-alpha);
}

inline Point3 arc_point(double alpha, double theta, double r)
{
    return Point3(r * std::cos(alpha) * (1 - std::cos(theta)), r * std::sin(alpha) * (1 - std::cos(theta)),
                  r * std::sin(theta));
}

struct LiteralArc {
    double theta;
    double alpha;
    double r;
};

// The closed-form inversion written exactly as the arccos / arctan / ratio
// formulas, with the quadrant fixed from the signs of x and y.
inline LiteralArc literal_inverse(const Point3& u)
{
    const double x = u.x(), y = u.y(), z = u.z();
    const double rho2 = x * x + y * y;
    LiteralArc out;
    out.theta = std::acos((z * z - rho2) / (rho2 + z * z));
    double a = std::atan(y / x);
    if (x < 0)
        a += std::numbers::pi;
    else if (y < 0)
        a += 2 * std::numbers::pi;
    out.alpha = a;
    out.r = (rho2 + z * z) / (2 * std::sqrt(rho2));
    return out;
}

inline double angle_gap(double a, double b)
{
    const double two_pi = 2 * std::numbers::pi;
    double d = std::fmod(std::abs(a - b), two_pi);
    return std::min(d, two_pi - d);
}

// Tendon lengths by direct evaluation of the attachment geometry: lower points
// on the base circle, higher points from the arc formula, case split on the
// side of the backbone each attachment sits relative to the arc center.
inline coilkin::TendonSet tendon_lengths_direct(double alpha, double theta, double r, double d)
{
    const double ca = std::cos(alpha), sa = std::sin(alpha), ct = std::cos(theta), st = std::sin(theta);
    const Point3 u = arc_point(alpha, theta, r);
    const Point3 center(r * ca, r * sa, 0);
    const Point3 lower[4] = {{d, 0, 0}, {0, d, 0}, {-d, 0, 0}, {0, -d, 0}};
    const Point3 ex(ca * ca * ct + sa * sa, sa * ca * ct - sa * ca, -ca * st);
    const Point3 ey(sa * ca * ct - sa * ca, sa * sa * ct + ca * ca, -sa * st);
    const Point3 higher[4] = {u + d * ex, u + d * ey, u - d * ex, u - d * ey};
    coilkin::TendonSet q;
    for (int i = 0; i < 4; ++i) {
        // Inner semicircle: the attachment faces the arc center.
        const bool inner = lower[i].dot(Point3(ca, sa, 0)) > 1e-9 * d;
        q[static_cast<std::size_t>(i)] = inner ? (lower[i] - center).norm() * theta : (lower[i] - higher[i]).norm();
    }
    return q;
}

} // namespace oracle
