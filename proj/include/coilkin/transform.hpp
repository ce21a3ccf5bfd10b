#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace coilkin {

using Point3 = Eigen::Vector3d;
using Point2 = Eigen::Vector2d;

// 4x4 homogeneous rigid transform.
class Transform {
public:
    Transform() : matrix_(Eigen::Matrix4d::Identity()) {}

    explicit Transform(const Eigen::Matrix4d& m) : matrix_(m) {}

    Transform(const Eigen::Matrix3d& rotation, const Point3& translation)
        : matrix_(Eigen::Matrix4d::Identity())
    {
        matrix_.block<3, 3>(0, 0) = rotation;
        matrix_.block<3, 1>(0, 3) = translation;
    }

    static Transform rot_x(double angle)
    {
        return Transform(Eigen::AngleAxisd(angle, Point3::UnitX()).toRotationMatrix(), Point3::Zero());
    }
    static Transform rot_y(double angle)
    {
        return Transform(Eigen::AngleAxisd(angle, Point3::UnitY()).toRotationMatrix(), Point3::Zero());
    }
    static Transform rot_z(double angle)
    {
        return Transform(Eigen::AngleAxisd(angle, Point3::UnitZ()).toRotationMatrix(), Point3::Zero());
    }
    static Transform translate(const Point3& t) { return Transform(Eigen::Matrix3d::Identity(), t); }
    static Transform trans_x(double k) { return translate(Point3(k, 0.0, 0.0)); }
    static Transform trans_z(double k) { return translate(Point3(0.0, 0.0, k)); }

    Transform operator*(const Transform& other) const { return Transform(Eigen::Matrix4d(matrix_ * other.matrix_)); }

    Point3 apply(const Point3& p) const { return rotation() * p + translation(); }

    const Eigen::Matrix4d& matrix() const { return matrix_; }
    Eigen::Matrix3d rotation() const { return matrix_.block<3, 3>(0, 0); }
    Point3 translation() const { return matrix_.block<3, 1>(0, 3); }

    Transform inverse() const
    {
        const Eigen::Matrix3d rt = rotation().transpose();
        return Transform(rt, -rt * translation());
    }

    // Largest deviation of the rotation block from orthonormality with unit determinant.
    double rigidity_error() const
    {
        const Eigen::Matrix3d r = rotation();
        const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).norm();
        const double det = std::abs(r.determinant() - 1.0);
        return std::max(ortho, det);
    }

private:
    Eigen::Matrix4d matrix_;
};

} // namespace coilkin
