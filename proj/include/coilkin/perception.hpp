#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "coilkin/error.hpp"
#include "coilkin/simulator.hpp"
#include "coilkin/transform.hpp"

namespace coilkin {

// Grid of reconstructed heights (mm). Cells without a contact hold NaN.
struct HeightMap {
    std::size_t cols = 0;
    std::size_t rows = 0;
    Point2 origin = Point2::Zero(); // x-y of cell (0, 0)
    double cell = 1.0;
    std::vector<double> heights;

    static constexpr double sentinel() { return std::numeric_limits<double>::quiet_NaN(); }

    bool has(std::size_t col, std::size_t row) const { return !std::isnan(heights[row * cols + col]); }
    double at(std::size_t col, std::size_t row) const { return heights[row * cols + col]; }

    std::size_t contact_cells() const
    {
        return static_cast<std::size_t>(
            std::count_if(heights.begin(), heights.end(), [](double h) { return !std::isnan(h); }));
    }

    double max_height() const
    {
        double m = -std::numeric_limits<double>::infinity();
        for (double h : heights)
            if (!std::isnan(h))
                m = std::max(m, h);
        return m;
    }
};

// Keeps only contacts, shifts heights so the lowest contact is 0 and shifts
// x-y so the contact bounding box is centered on the origin.
inline HeightMap reconstruct(const ContactCloud& cloud)
{
    double z_min = std::numeric_limits<double>::infinity();
    double x_lo = z_min, y_lo = z_min, x_hi = -z_min, y_hi = -z_min;
    for (const auto& n : cloud.nodes) {
        if (!n.event.contact)
            continue;
        const Point3& c = n.event.contact_point;
        z_min = std::min(z_min, c.z());
        x_lo = std::min(x_lo, c.x());
        x_hi = std::max(x_hi, c.x());
        y_lo = std::min(y_lo, c.y());
        y_hi = std::max(y_hi, c.y());
    }
    if (!std::isfinite(z_min))
        throw Error(ErrorCode::EmptyCloud, "cloud contains no contacts");

    HeightMap map;
    map.cols = cloud.cols;
    map.rows = cloud.rows;
    map.cell = cloud.step;
    map.origin = cloud.origin - Point2(0.5 * (x_lo + x_hi), 0.5 * (y_lo + y_hi));
    map.heights.assign(map.cols * map.rows, HeightMap::sentinel());
    for (const auto& n : cloud.nodes)
        if (n.event.contact)
            map.heights[n.row * map.cols + n.col] = n.event.contact_point.z() - z_min;
    return map;
}

inline constexpr std::size_t kFeatureCols = 20;
inline constexpr std::size_t kFeatureRows = 15;
inline constexpr std::size_t kFeatureSize = kFeatureCols * kFeatureRows;

struct FeatureVector {
    std::string id;
    std::array<double, kFeatureSize> values{};

    double distance(const FeatureVector& other) const
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < kFeatureSize; ++i)
            acc += (values[i] - other.values[i]) * (values[i] - other.values[i]);
        return std::sqrt(acc);
    }
};

namespace detail {

// Overlap of source cell [k, k+1) with destination cell i, both expressed in
// source units where a destination cell spans `ratio` source cells.
inline double overlap(std::size_t k, std::size_t i, double ratio)
{
    const double lo = std::max(static_cast<double>(k), static_cast<double>(i) * ratio);
    const double hi = std::min(static_cast<double>(k + 1), static_cast<double>(i + 1) * ratio);
    return std::max(0.0, hi - lo);
}

} // namespace detail

// Aligns the map so the contact cell with least column (then least row) is at
// (0, 0), area-averages it onto a 20 x 15 grid (20 along x) and flattens it
// row-major. Sentinels and cells shifted in from outside contribute 0.
inline FeatureVector to_feature(const HeightMap& map, std::string id = {})
{
    std::size_t anchor_col = map.cols, anchor_row = map.rows;
    for (std::size_t c = 0; c < map.cols && anchor_col == map.cols; ++c)
        for (std::size_t r = 0; r < map.rows; ++r)
            if (map.has(c, r)) {
                anchor_col = c;
                anchor_row = r;
                break;
            }
    if (anchor_col == map.cols)
        throw Error(ErrorCode::EmptyMap, "height map has no contact cells");

    auto aligned = [&](std::size_t c, std::size_t r) {
        const std::size_t sc = c + anchor_col, sr = r + anchor_row;
        if (sc >= map.cols || sr >= map.rows || !map.has(sc, sr))
            return 0.0;
        return map.at(sc, sr);
    };

    const double rx = static_cast<double>(map.cols) / static_cast<double>(kFeatureCols);
    const double ry = static_cast<double>(map.rows) / static_cast<double>(kFeatureRows);
    FeatureVector f;
    f.id = std::move(id);
    for (std::size_t v = 0; v < kFeatureRows; ++v) {
        for (std::size_t u = 0; u < kFeatureCols; ++u) {
            double sum = 0.0;
            double area = 0.0;
            const auto c_lo = static_cast<std::size_t>(std::floor(static_cast<double>(u) * rx));
            const auto r_lo = static_cast<std::size_t>(std::floor(static_cast<double>(v) * ry));
            for (std::size_t r = r_lo; r < map.rows && static_cast<double>(r) < static_cast<double>(v + 1) * ry; ++r) {
                const double wy = detail::overlap(r, v, ry);
                for (std::size_t c = c_lo; c < map.cols && static_cast<double>(c) < static_cast<double>(u + 1) * rx; ++c) {
                    const double w = wy * detail::overlap(c, u, rx);
                    sum += w * aligned(c, r);
                    area += w;
                }
            }
            f.values[v * kFeatureCols + u] = area > 0.0 ? sum / area : 0.0;
        }
    }
    return f;
}

struct SampleError {
    double dis;
    double x;
    double y;
    double z;
};

struct ErrorColumn {
    double mean = 0.0;
    double sd = 0.0; // population standard deviation
};

struct ErrorReport {
    std::vector<SampleError> samples;
    ErrorColumn dis, x, y, z;
};

inline ErrorColumn column_stats(const std::vector<SampleError>& samples, double SampleError::*field)
{
    ErrorColumn col;
    if (samples.empty())
        return col;
    const double n = static_cast<double>(samples.size());
    for (const auto& s : samples)
        col.mean += s.*field;
    col.mean /= n;
    double var = 0.0;
    for (const auto& s : samples)
        var += (s.*field - col.mean) * (s.*field - col.mean);
    col.sd = std::sqrt(var / n);
    return col;
}

struct PositionPair {
    Point3 desired;
    Point3 actual;
};

inline ErrorReport error_stats(const std::vector<PositionPair>& pairs)
{
    if (pairs.empty())
        throw Error(ErrorCode::ParseError, "error_stats needs at least one pair");
    ErrorReport rep;
    rep.samples.reserve(pairs.size());
    for (const auto& p : pairs) {
        const Point3 diff = p.actual - p.desired;
        rep.samples.push_back({diff.norm(), std::abs(diff.x()), std::abs(diff.y()), std::abs(diff.z())});
    }
    rep.dis = column_stats(rep.samples, &SampleError::dis);
    rep.x = column_stats(rep.samples, &SampleError::x);
    rep.y = column_stats(rep.samples, &SampleError::y);
    rep.z = column_stats(rep.samples, &SampleError::z);
    return rep;
}

// Summary laid out as Mean / SD rows over DIS and per-axis columns.
inline void write_error_summary_csv(std::ostream& os, const ErrorReport& rep)
{
    os << "# SD is the population standard deviation; DIS is the Euclidean distance\n";
    os << "stat,DIS,X,Y,Z\n";
    fmt::print(os, "Mean (mm),{:.6f},{:.6f},{:.6f},{:.6f}\n", rep.dis.mean, rep.x.mean, rep.y.mean, rep.z.mean);
    fmt::print(os, "SD (mm),{:.6f},{:.6f},{:.6f},{:.6f}\n", rep.dis.sd, rep.x.sd, rep.y.sd, rep.z.sd);
}

inline void write_error_samples_csv(std::ostream& os, const ErrorReport& rep)
{
    os << "index,DIS,X,Y,Z\n";
    for (std::size_t i = 0; i < rep.samples.size(); ++i) {
        const auto& s = rep.samples[i];
        fmt::print(os, "{},{:.6f},{:.6f},{:.6f},{:.6f}\n", i, s.dis, s.x, s.y, s.z);
    }
}

struct TaggedError {
    double displacement; // commanded in-plane displacement along X or Y
    double z;            // commanded height
    double error;        // Euclidean error for one direction
};

struct BubbleCell {
    double displacement;
    double z;
    double mean_error;
    std::size_t count;
};

// Averages errors of all directions that share a commanded (displacement, z),
// ordered by z then displacement. Cells match within 1e-9 mm.
inline std::vector<BubbleCell> bubble_aggregate(std::vector<TaggedError> tagged)
{
    constexpr double tol = 1e-9;
    std::sort(tagged.begin(), tagged.end(), [](const TaggedError& a, const TaggedError& b) {
        return a.z != b.z ? a.z < b.z : a.displacement < b.displacement;
    });
    std::vector<BubbleCell> out;
    for (const auto& t : tagged) {
        if (!out.empty() && std::abs(out.back().z - t.z) <= tol &&
            std::abs(out.back().displacement - t.displacement) <= tol) {
            auto& cell = out.back();
            cell.mean_error += (t.error - cell.mean_error) / static_cast<double>(++cell.count);
        } else {
            out.push_back({t.displacement, t.z, t.error, 1});
        }
    }
    return out;
}

inline void write_height_map_csv(std::ostream& os, const HeightMap& map)
{
    fmt::print(os, "# origin_x={:.6f} origin_y={:.6f} cell={:.6f} cols={} rows={}; empty = no contact\n",
               map.origin.x(), map.origin.y(), map.cell, map.cols, map.rows);
    for (std::size_t r = 0; r < map.rows; ++r) {
        for (std::size_t c = 0; c < map.cols; ++c) {
            if (c)
                os << ',';
            if (map.has(c, r))
                fmt::print(os, "{:.6f}", map.at(c, r));
        }
        os << '\n';
    }
}

inline void write_height_map_ply(std::ostream& os, const HeightMap& map)
{
    os << "ply\nformat ascii 1.0\nelement vertex " << map.contact_cells()
       << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
    for (std::size_t r = 0; r < map.rows; ++r)
        for (std::size_t c = 0; c < map.cols; ++c)
            if (map.has(c, r))
                fmt::print(os, "{:.6f} {:.6f} {:.6f}\n", map.origin.x() + static_cast<double>(c) * map.cell,
                           map.origin.y() + static_cast<double>(r) * map.cell, map.at(c, r));
}

inline void write_feature_header(std::ostream& os)
{
    os << "id";
    for (std::size_t i = 0; i < kFeatureSize; ++i)
        os << ",f" << i;
    os << '\n';
}

inline void write_feature_row(std::ostream& os, const FeatureVector& f)
{
    os << f.id;
    for (double v : f.values)
        fmt::print(os, ",{:.6f}", v);
    os << '\n';
}

} // namespace coilkin
