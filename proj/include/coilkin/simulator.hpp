#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "coilkin/actuation.hpp"
#include "coilkin/error.hpp"
#include "coilkin/geometry.hpp"
#include "coilkin/kinematics.hpp"
#include "coilkin/scene.hpp"

namespace coilkin {

// Contact decision for the bristle. By default a geometric contact is a
// detected contact. With the synthesizer enabled the geometric state is turned
// into a pressure change (gaussian baseline noise plus a step on contact) and
// compared against the geometry's threshold.
class ContactSensor {
public:
    struct PressureModel {
        std::uint64_t seed = 0;
        double noise_sd_hpa = 1.0;
        double contact_step_hpa = 40.0;
    };

    ContactSensor() = default;
    explicit ContactSensor(PressureModel model) : model_(model), rng_(model.seed) {}

    bool detect(bool geometric_contact, double threshold_hpa)
    {
        if (!model_)
            return geometric_contact;
        std::normal_distribution<double> noise(0.0, model_->noise_sd_hpa);
        const double change = noise(rng_) + (geometric_contact ? model_->contact_step_hpa : 0.0);
        return std::abs(change) >= threshold_hpa;
    }

    bool synthesizing() const { return model_.has_value(); }

private:
    std::optional<PressureModel> model_;
    std::mt19937_64 rng_;
};

struct ProbeEvent {
    Point3 arm = Point3::Zero();
    double alpha = 0.0;
    double extension = 0.0;
    bool contact = false;
    Point3 contact_point = Point3::Zero(); // world frame, meaningful only on contact
};

// One snapshot of arm position and backbone state, written after each action.
struct LogRow {
    std::size_t step_index;
    Point3 arm;
    double alpha;
    double s;
    bool contact;
    Point3 contact_point;
};

class MissionLog {
public:
    void record(const Point3& arm, double alpha, double s, bool contact = false,
                const Point3& contact_point = Point3::Zero())
    {
        rows_.push_back({rows_.size(), arm, alpha, s, contact, contact_point});
    }

    const std::vector<LogRow>& rows() const { return rows_; }

    void write_csv(std::ostream& os) const
    {
        os << "step_index,arm_x,arm_y,arm_z,alpha,s,contact,cx,cy,cz\n";
        for (const auto& r : rows_) {
            if (r.contact)
                fmt::print(os, "{},{:.6f},{:.6f},{:.6f},{:.9f},{:.6f},1,{:.6f},{:.6f},{:.6f}\n", r.step_index, r.arm.x(),
                           r.arm.y(), r.arm.z(), r.alpha, r.s, r.contact_point.x(), r.contact_point.y(),
                           r.contact_point.z());
            else
                fmt::print(os, "{},{:.6f},{:.6f},{:.6f},{:.9f},{:.6f},0,,,\n", r.step_index, r.arm.x(), r.arm.y(),
                           r.arm.z(), r.alpha, r.s);
        }
    }

private:
    std::vector<LogRow> rows_;
};

// ---------------------------------------------------------------------------
// Surface scanning
// ---------------------------------------------------------------------------

inline constexpr double kDefaultProbeQuantum = 0.5;

// Extends the straight backbone from s_min in quantum steps until the bristle
// tip reaches the surface below the arm, or s_max is reached.
inline ProbeEvent probe_vertical(const HeightField& scene, const Point3& arm, const RobotGeometry& geom,
                                 double quantum = kDefaultProbeQuantum, ContactSensor* sensor = nullptr)
{
    if (!(quantum > 0.0))
        throw Error(ErrorCode::ParseError, "probe quantum must be positive");

    const double surface = scene.height_at(arm.x(), arm.y());
    const double offset = geom.probe_offset();
    if (arm.z() - (geom.s_min + offset) < surface - 1e-9)
        throw Error(ErrorCode::ArmTooLow,
                    fmt::format("bristle already below the surface at ({:.3f}, {:.3f})", arm.x(), arm.y()));

    ProbeEvent ev;
    ev.arm = arm;
    const auto steps = static_cast<std::size_t>(std::ceil((geom.s_max - geom.s_min) / quantum - 1e-12));
    for (std::size_t k = 0; k <= steps; ++k) {
        const double s = std::min(geom.s_min + static_cast<double>(k) * quantum, geom.s_max);
        const double tip_z = arm.z() - (s + offset);
        const bool touching = tip_z <= surface;
        ev.extension = s;
        if (sensor ? sensor->detect(touching, geom.contact_threshold) : touching) {
            ev.contact = true;
            ev.contact_point = Point3(arm.x(), arm.y(), tip_z);
            return ev;
        }
    }
    return ev;
}

struct ScanConfig {
    Point2 origin = Point2::Zero(); // arm x-y of the first node
    double width = 200.0;
    double height = 200.0;
    double step = 10.0;
    double arm_z = 176.0;
    double quantum = kDefaultProbeQuantum;

    std::size_t cols() const { return static_cast<std::size_t>(std::llround(width / step)) + 1; }
    std::size_t rows() const { return static_cast<std::size_t>(std::llround(height / step)) + 1; }
};

struct ScanNode {
    std::size_t col;
    std::size_t row;
    ProbeEvent event;
};

// Probe results of a grid scan, in visiting order.
struct ContactCloud {
    std::size_t cols = 0;
    std::size_t rows = 0;
    double step = 0.0;
    Point2 origin = Point2::Zero();
    std::vector<ScanNode> nodes;

    std::size_t contact_count() const
    {
        return static_cast<std::size_t>(
            std::count_if(nodes.begin(), nodes.end(), [](const ScanNode& n) { return n.event.contact; }));
    }
};

// Boustrophedon order: even rows left to right, odd rows right to left.
inline std::vector<std::pair<std::size_t, std::size_t>> zigzag_order(std::size_t cols, std::size_t rows)
{
    std::vector<std::pair<std::size_t, std::size_t>> order;
    order.reserve(cols * rows);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t k = 0; k < cols; ++k)
            order.emplace_back(r % 2 == 0 ? k : cols - 1 - k, r);
    return order;
}

// Every node: move with the backbone retracted to s_min, probe, retract.
inline ContactCloud surface_scan(const HeightField& scene, const RobotGeometry& geom, const ScanConfig& cfg = {},
                                 ContactSensor* sensor = nullptr, MissionLog* log = nullptr)
{
    if (!(cfg.step > 0.0) || !(cfg.width >= 0.0) || !(cfg.height >= 0.0))
        throw Error(ErrorCode::ParseError, "scan extents must be non-negative and step positive");

    ContactCloud cloud{cfg.cols(), cfg.rows(), cfg.step, cfg.origin, {}};
    cloud.nodes.reserve(cloud.cols * cloud.rows);

    for (const auto& [col, row] : zigzag_order(cloud.cols, cloud.rows)) {
        const Point3 arm(cfg.origin.x() + static_cast<double>(col) * cfg.step,
                         cfg.origin.y() + static_cast<double>(row) * cfg.step, cfg.arm_z);
        if (log)
            log->record(arm, 0.0, geom.s_min);

        const ProbeEvent ev = probe_vertical(scene, arm, geom, cfg.quantum, sensor);
        if (log) {
            log->record(arm, 0.0, ev.extension, ev.contact, ev.contact_point);
            log->record(arm, 0.0, geom.s_min);
        }
        cloud.nodes.push_back({col, row, ev});
    }
    return cloud;
}

// ---------------------------------------------------------------------------
// Tube exploration
// ---------------------------------------------------------------------------

// The robot hangs below the arm: base-frame z points down into the tube.
inline Point3 mount_to_world(const Point3& arm, const Point3& p)
{
    return arm + Point3(p.x(), -p.y(), -p.z());
}

// Least-squares backbone configuration for commanded tendon lengths, with the
// bend plane held at alpha. Levenberg-Marquardt over (theta, s) inside bounds.
inline ArcState arc_from_tendons(const TendonSet& q, double alpha, const ArcState& guess, const RobotGeometry& geom)
{
    auto clamp_state = [&](double theta, double s) {
        return ArcState::bent(alpha, std::clamp(theta, 0.0, kHalfPi), std::clamp(s, geom.s_min, geom.s_max));
    };
    auto residual = [&](const ArcState& st) {
        const TendonSet model = tendon_lengths(st, geom);
        Eigen::Vector4d res;
        for (std::size_t i = 0; i < 4; ++i)
            res[static_cast<Eigen::Index>(i)] = model[i] - q[i];
        return res;
    };

    ArcState st = clamp_state(guess.theta, guess.s);
    Eigen::Vector4d res = residual(st);
    double lambda = 1e-3;
    constexpr double h = 1e-7;

    for (int iter = 0; iter < 100 && res.norm() > 1e-10; ++iter) {
        Eigen::Matrix<double, 4, 2> jac;
        // One-sided differences pointing into the feasible box.
        const double ht = st.theta + h <= kHalfPi ? h : -h;
        const double hs = st.s + h <= geom.s_max ? h : -h;
        jac.col(0) = (residual(clamp_state(st.theta + ht, st.s)) - res) / ht;
        jac.col(1) = (residual(clamp_state(st.theta, st.s + hs)) - res) / hs;

        const Eigen::Matrix2d jtj = jac.transpose() * jac;
        const Eigen::Vector2d jtr = jac.transpose() * res;
        bool improved = false;
        for (int tries = 0; tries < 20; ++tries) {
            Eigen::Matrix2d damped = jtj;
            damped.diagonal() *= (1.0 + lambda);
            damped.diagonal().array() += 1e-15;
            const Eigen::Vector2d delta = damped.ldlt().solve(-jtr);
            const ArcState trial = clamp_state(st.theta + delta[0], st.s + delta[1]);
            const Eigen::Vector4d trial_res = residual(trial);
            if (trial_res.squaredNorm() < res.squaredNorm()) {
                st = trial;
                res = trial_res;
                lambda = std::max(lambda * 0.3, 1e-12);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved)
            break;
    }
    return st;
}

struct TubeScanConfig {
    double compressed_s = 45.0;   // backbone length between directions
    double target_radius = 15.0;  // spring-top targets (r cos a, r sin a, z)
    double target_z = 60.0;
    std::size_t directions = 8;   // alpha step 2 pi / directions
    double max_step_mm = 2.0;     // tendon interpolation step
};

struct RadialScanResult {
    std::vector<ProbeEvent> events;
    bool any_contact = false;
};

inline bool tube_contact(const Tube& tube, const Point3& tip)
{
    if (std::hypot(tip.x(), tip.y()) >= tube.inner_radius)
        return true;
    return tube.obstacle && tube.obstacle->contains(tip);
}

// One full sweep at a fixed arm height: for each direction, extend from the
// compressed state along the interpolated tendon trajectory, stop on contact,
// then re-compress.
inline RadialScanResult radial_scan(const Tube& tube, const RobotGeometry& geom, double arm_z,
                                    const TubeScanConfig& cfg = {}, ContactSensor* sensor = nullptr,
                                    MissionLog* log = nullptr)
{
    const Point3 arm(0.0, 0.0, arm_z);
    const ArcState compressed = ArcState::straight(cfg.compressed_s);
    const TendonSet compressed_q = tendon_lengths(compressed, geom);

    RadialScanResult out;
    for (std::size_t k = 0; k < cfg.directions; ++k) {
        const double alpha = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(cfg.directions);
        const Point3 target(cfg.target_radius * std::cos(alpha), cfg.target_radius * std::sin(alpha), cfg.target_z);
        const ArcState goal = ik(target, geom);
        const TendonTrajectory traj = interpolate(compressed_q, tendon_lengths(goal, geom), cfg.max_step_mm);

        ProbeEvent ev;
        ev.arm = arm;
        ev.alpha = alpha;
        ev.extension = cfg.compressed_s;
        ArcState pose = compressed;
        for (std::size_t w = 1; w < traj.waypoints.size(); ++w) {
            pose = w + 1 == traj.waypoints.size() ? goal : arc_from_tendons(traj.waypoints[w], alpha, pose, geom);
            const Point3 tip = mount_to_world(arm, bristle_tip(pose, geom));
            const bool touching = tube_contact(tube, tip);
            const bool detected = sensor ? sensor->detect(touching, geom.contact_threshold) : touching;
            ev.extension = pose.s;
            if (log)
                log->record(arm, alpha, pose.s, detected, tip);
            if (detected) {
                ev.contact = true;
                ev.contact_point = tip;
                break;
            }
        }
        if (log)
            log->record(arm, alpha, cfg.compressed_s);
        out.any_contact = out.any_contact || ev.contact;
        out.events.push_back(ev);
    }
    return out;
}

struct ExploreConfig {
    double start_z = 0.0;      // arm height before the first descent
    double descent_step = 20.0;
    std::size_t max_steps = 5;
    TubeScanConfig scan;
};

struct ExploreResult {
    double stop_depth = 0.0;
    bool any_contact = false;
    std::vector<ProbeEvent> events;

    std::size_t contact_count() const
    {
        return static_cast<std::size_t>(
            std::count_if(events.begin(), events.end(), [](const ProbeEvent& e) { return e.contact; }));
    }
};

// Descend and sweep until a sweep reports contact (then return to the start)
// or max_steps descents have been made.
inline ExploreResult explore_tube(const Tube& tube, const RobotGeometry& geom, const ExploreConfig& cfg = {},
                                  ContactSensor* sensor = nullptr, MissionLog* log = nullptr)
{
    ExploreResult out;
    const Point3 start(0.0, 0.0, cfg.start_z);
    if (log)
        log->record(start, 0.0, cfg.scan.compressed_s);

    double depth = 0.0;
    for (std::size_t step = 1; step <= cfg.max_steps; ++step) {
        depth = static_cast<double>(step) * cfg.descent_step;
        const double arm_z = cfg.start_z - depth;
        if (log)
            log->record(Point3(0.0, 0.0, arm_z), 0.0, cfg.scan.compressed_s);

        RadialScanResult sweep = radial_scan(tube, geom, arm_z, cfg.scan, sensor, log);
        out.events.insert(out.events.end(), sweep.events.begin(), sweep.events.end());
        if (sweep.any_contact) {
            out.any_contact = true;
            if (log)
                log->record(start, 0.0, cfg.scan.compressed_s);
            break;
        }
    }
    out.stop_depth = depth;
    return out;
}

// Obstacle cube whose top face sits `offset` mm below the compressed bristle
// tip at zero descent, centered `radial` mm out along world +x.
inline Cube obstacle_at_offset(double offset, const RobotGeometry& geom, const ExploreConfig& cfg = {},
                               double edge = 40.0, double radial = 50.0)
{
    const double compressed_tip_z = cfg.start_z - (cfg.scan.compressed_s + geom.probe_offset());
    return Cube{Point3(radial, 0.0, compressed_tip_z - offset - 0.5 * edge), edge};
}

} // namespace coilkin
