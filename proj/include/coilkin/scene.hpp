#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "coilkin/error.hpp"
#include "coilkin/transform.hpp"

namespace coilkin {

// Piecewise-constant surface heights (mm) over the world x-y plane. Cell
// (col, row) covers [origin + (col, row) * cell_mm, origin + (col+1, row+1) * cell_mm).
// Outside the grid the surface is the floor at height 0.
struct HeightField {
    Point2 origin = Point2::Zero();
    double cell_mm = 1.0;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::vector<double> heights; // row-major, rows * cols

    double at(std::size_t col, std::size_t row) const { return heights[row * cols + col]; }

    double height_at(double x, double y) const
    {
        const double fc = std::floor((x - origin.x()) / cell_mm);
        const double fr = std::floor((y - origin.y()) / cell_mm);
        if (fc < 0.0 || fr < 0.0 || fc >= static_cast<double>(cols) || fr >= static_cast<double>(rows))
            return 0.0;
        return at(static_cast<std::size_t>(fc), static_cast<std::size_t>(fr));
    }

    double max_height() const
    {
        return heights.empty() ? 0.0 : *std::max_element(heights.begin(), heights.end());
    }

    void validate() const
    {
        if (!(cell_mm > 0.0))
            throw Error(ErrorCode::ParseError, "height field cell_mm must be positive");
        if (heights.size() != cols * rows)
            throw Error(ErrorCode::ParseError, "height field size does not match cols * rows");
        for (double h : heights)
            if (!(h >= 0.0) || !std::isfinite(h))
                throw Error(ErrorCode::ParseError, "height field heights must be finite and >= 0");
    }
};

// Axis-aligned cube, closed.
struct Cube {
    Point3 center = Point3::Zero();
    double edge = 40.0;

    bool contains(const Point3& p) const
    {
        const double h = 0.5 * edge;
        return (p - center).cwiseAbs().maxCoeff() <= h;
    }
};

// Vertical tube along the world z axis through the arm origin.
struct Tube {
    double inner_radius = 174.0;
    std::optional<Cube> obstacle;

    void validate() const
    {
        if (!(inner_radius > 0.0))
            throw Error(ErrorCode::ParseError, "tube inner_radius_mm must be positive");
        if (obstacle && !(obstacle->edge > 0.0))
            throw Error(ErrorCode::ParseError, "obstacle edge_mm must be positive");
    }
};

using Scene = std::variant<HeightField, Tube>;

// Samples f at every cell center.
inline HeightField sample_height_field(const std::function<double(double, double)>& f, Point2 origin, double cell_mm,
                                       std::size_t cols, std::size_t rows)
{
    HeightField hf{origin, cell_mm, cols, rows, std::vector<double>(cols * rows, 0.0)};
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const double x = origin.x() + (static_cast<double>(c) + 0.5) * cell_mm;
            const double y = origin.y() + (static_cast<double>(r) + 0.5) * cell_mm;
            hf.heights[r * cols + c] = std::max(0.0, f(x, y));
        }
    return hf;
}

// Height field covering a scan rectangle whose nodes lie at origin + k * step.
// With step a multiple of cell_mm every node falls on a cell center.
inline HeightField scan_area_field(const std::function<double(double, double)>& f, Point2 scan_origin, double width,
                                   double height, double cell_mm = 2.0)
{
    const Point2 origin = scan_origin - Point2(0.5 * cell_mm, 0.5 * cell_mm);
    const auto cols = static_cast<std::size_t>(std::ceil(width / cell_mm)) + 1;
    const auto rows = static_cast<std::size_t>(std::ceil(height / cell_mm)) + 1;
    return sample_height_field(f, origin, cell_mm, cols, rows);
}

namespace shapes {

// Height profiles centered on (cx, cy); zero away from the object.

inline auto plateau(double cx, double cy, double width, double depth, double height)
{
    return [=](double x, double y) {
        return (std::abs(x - cx) <= 0.5 * width && std::abs(y - cy) <= 0.5 * depth) ? height : 0.0;
    };
}

inline auto two_tier_box(double cx, double cy, double width, double depth, double low, double high)
{
    return [=](double x, double y) {
        if (std::abs(x - cx) > 0.5 * width || std::abs(y - cy) > 0.5 * depth)
            return 0.0;
        return x >= cx ? high : low;
    };
}

inline auto cylinder(double cx, double cy, double radius, double height)
{
    return [=](double x, double y) { return std::hypot(x - cx, y - cy) <= radius ? height : 0.0; };
}

inline auto sphere_cap(double cx, double cy, double sphere_radius, double cap_height)
{
    // Sphere center sits cap_height - sphere_radius above the floor.
    return [=](double x, double y) {
        const double rho2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        const double inside = sphere_radius * sphere_radius - rho2;
        if (inside <= 0.0)
            return 0.0;
        return std::max(0.0, cap_height - sphere_radius + std::sqrt(inside));
    };
}

// Open box: rim of the given wall thickness around a lower floor.
inline auto open_container(double cx, double cy, double width, double depth, double wall, double rim, double inner)
{
    return [=](double x, double y) {
        const double ax = std::abs(x - cx), ay = std::abs(y - cy);
        if (ax > 0.5 * width || ay > 0.5 * depth)
            return 0.0;
        return (ax > 0.5 * width - wall || ay > 0.5 * depth - wall) ? rim : inner;
    };
}

// Block whose top slopes linearly from low (at -x) to high (at +x).
inline auto wedge(double cx, double cy, double width, double depth, double low, double high)
{
    return [=](double x, double y) {
        if (std::abs(x - cx) > 0.5 * width || std::abs(y - cy) > 0.5 * depth)
            return 0.0;
        return low + (high - low) * ((x - cx) / width + 0.5);
    };
}

inline auto ring(double cx, double cy, double inner_radius, double outer_radius, double height)
{
    return [=](double x, double y) {
        const double rho = std::hypot(x - cx, y - cy);
        return (rho >= inner_radius && rho <= outer_radius) ? height : 0.0;
    };
}

} // namespace shapes

inline nlohmann::json scene_to_json(const Scene& scene)
{
    if (const auto* hf = std::get_if<HeightField>(&scene)) {
        return {{"type", "height_field"},
                {"origin", {hf->origin.x(), hf->origin.y()}},
                {"cell_mm", hf->cell_mm},
                {"cols", hf->cols},
                {"rows", hf->rows},
                {"heights", hf->heights}};
    }
    const auto& tube = std::get<Tube>(scene);
    nlohmann::json j{{"type", "tube"}, {"inner_radius_mm", tube.inner_radius}};
    if (tube.obstacle) {
        const auto& c = tube.obstacle->center;
        j["obstacle"] = {{"center", {c.x(), c.y(), c.z()}}, {"edge_mm", tube.obstacle->edge}};
    }
    return j;
}

inline Scene scene_from_json(const nlohmann::json& j)
{
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "height_field") {
            HeightField hf;
            const auto& o = j.at("origin");
            hf.origin = Point2(o.at(0).get<double>(), o.at(1).get<double>());
            hf.cell_mm = j.at("cell_mm").get<double>();
            hf.cols = j.at("cols").get<std::size_t>();
            hf.rows = j.at("rows").get<std::size_t>();
            hf.heights = j.at("heights").get<std::vector<double>>();
            hf.validate();
            return hf;
        }
        if (type == "tube") {
            Tube tube;
            tube.inner_radius = j.at("inner_radius_mm").get<double>();
            if (j.contains("obstacle") && !j.at("obstacle").is_null()) {
                const auto& ob = j.at("obstacle");
                const auto& c = ob.at("center");
                tube.obstacle = Cube{Point3(c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()),
                                     ob.at("edge_mm").get<double>()};
            }
            tube.validate();
            return tube;
        }
        throw Error(ErrorCode::ParseError, "unknown scene type '" + type + "'");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("scene: ") + e.what());
    }
}

inline Scene load_scene(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open scene file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
    return scene_from_json(j);
}

} // namespace coilkin
