#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "coilkin/catalog.hpp"
#include "coilkin/perception.hpp"
#include "stats_oracle.hpp"

using namespace coilkin;

namespace {

const RobotGeometry kGeom{};

ContactCloud scan(const HeightField& scene, double arm_z = 176.0)
{
    ScanConfig cfg;
    cfg.arm_z = arm_z;
    return surface_scan(scene, kGeom, cfg);
}

HeightField place(const std::string& name, double cx, double cy) { return catalog::height_field(name, cx, cy); }

} // namespace

TEST(Reconstruct, FlatCloudIsZeroMap)
{
    const HeightMap map = reconstruct(scan(catalog::height_field("flat")));
    EXPECT_EQ(map.contact_cells(), 441u);
    for (double h : map.heights)
        EXPECT_EQ(h, 0.0);
}

TEST(Reconstruct, PlateauWithUnreachableFloor)
{
    // Arm high enough that only the 40 mm plateau is reachable.
    const HeightField scene = catalog::height_field("plateau");
    const HeightMap map = reconstruct(scan(scene, 200.0));
    EXPECT_EQ(map.contact_cells(), 25u);
    for (std::size_t r = 0; r < map.rows; ++r)
        for (std::size_t c = 0; c < map.cols; ++c) {
            const bool on_plateau = scene.height_at(10.0 * c, 10.0 * r) == 40.0;
            EXPECT_EQ(map.has(c, r), on_plateau);
            if (on_plateau) {
                EXPECT_EQ(map.at(c, r), 0.0);
            }
        }
    // Bounding box of the contacts is centered on the origin.
    EXPECT_NEAR(map.origin.x() + 10.0 * 8, -20.0, 1e-12);
}

TEST(Reconstruct, PlateauWithReachableFloor)
{
    const HeightField scene = catalog::height_field("plateau");
    const HeightMap map = reconstruct(scan(scene));
    for (std::size_t r = 0; r < map.rows; ++r)
        for (std::size_t c = 0; c < map.cols; ++c)
            EXPECT_NEAR(map.at(c, r), scene.height_at(10.0 * c, 10.0 * r), kDefaultProbeQuantum);
}

TEST(Reconstruct, SingleContact)
{
    ContactCloud cloud{2, 1, 10.0, Point2(0, 0), {}};
    ProbeEvent hit;
    hit.contact = true;
    hit.contact_point = Point3(0, 0, 17.5);
    cloud.nodes.push_back({0, 0, hit});
    cloud.nodes.push_back({1, 0, ProbeEvent{}});
    const HeightMap map = reconstruct(cloud);
    EXPECT_EQ(map.contact_cells(), 1u);
    EXPECT_EQ(map.at(0, 0), 0.0);
    EXPECT_FALSE(map.has(1, 0));
}

TEST(Reconstruct, NeverInventsContacts)
{
    const ContactCloud cloud = scan(place("ring", 90, 110), 190.0);
    const HeightMap map = reconstruct(cloud);
    for (const auto& n : cloud.nodes)
        EXPECT_EQ(map.has(n.col, n.row), n.event.contact);
}

TEST(Reconstruct, EmptyCloudThrows)
{
    ContactCloud cloud{1, 1, 10.0, Point2(0, 0), {{0, 0, ProbeEvent{}}}};
    try {
        reconstruct(cloud);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyCloud);
    }
}

TEST(Feature, ZeroMapGivesZeroVector)
{
    const FeatureVector f = to_feature(reconstruct(scan(catalog::height_field("flat"))), "flat");
    EXPECT_EQ(f.values.size(), 300u);
    for (double v : f.values)
        EXPECT_EQ(v, 0.0);
}

TEST(Feature, WholeCellShiftInvariance)
{
    for (const std::string name : {"two-tier", "sphere-cap", "wedge", "ring"}) {
        const FeatureVector a = to_feature(reconstruct(scan(place(name, 80, 90), 190.0)));
        const FeatureVector b = to_feature(reconstruct(scan(place(name, 120, 70), 190.0)));
        EXPECT_EQ(a.values, b.values) << name;
    }
}

TEST(Feature, TallerPlateauScalesPlateauCells)
{
    auto feature_for = [](double h) {
        const HeightField s = scan_area_field(shapes::plateau(100, 100, 50, 50, h), Point2(0, 0), 200, 200);
        return to_feature(reconstruct(scan(s)));
    };
    const FeatureVector low = feature_for(20.0), high = feature_for(40.0);
    for (std::size_t i = 0; i < kFeatureSize; ++i)
        EXPECT_NEAR(high.values[i], 2.0 * low.values[i], 1e-12);
}

TEST(Feature, AreaAverageOfConstantMapIsConstant)
{
    HeightMap map;
    map.cols = 21;
    map.rows = 21;
    map.heights.assign(441, 3.0);
    const FeatureVector f = to_feature(map);
    for (double v : f.values)
        EXPECT_NEAR(v, 3.0, 1e-12);
}

TEST(Feature, EmptyMapThrows)
{
    HeightMap map;
    map.cols = 2;
    map.rows = 2;
    map.heights.assign(4, HeightMap::sentinel());
    EXPECT_THROW(to_feature(map), Error);
}

TEST(ErrorStats, IdenticalPairs)
{
    const ErrorReport rep = error_stats({{Point3(1, 2, 3), Point3(1, 2, 3)}, {Point3(0, 0, 50), Point3(0, 0, 50)}});
    EXPECT_EQ(rep.dis.mean, 0.0);
    EXPECT_EQ(rep.dis.sd, 0.0);
    EXPECT_EQ(rep.z.mean, 0.0);
}

TEST(ErrorStats, ThreeFourFive)
{
    const ErrorReport rep = error_stats({{Point3(0, 0, 50), Point3(3, 0, 46)}});
    EXPECT_DOUBLE_EQ(rep.dis.mean, 5.0);
    EXPECT_DOUBLE_EQ(rep.x.mean, 3.0);
    EXPECT_DOUBLE_EQ(rep.y.mean, 0.0);
    EXPECT_DOUBLE_EQ(rep.z.mean, 4.0);
}

TEST(ErrorStats, PlantedGaussianOffsets)
{
    const oracle::PlantedOffsets planted{{3.0, -2.0, 1.5}, {1.0, 0.8, 1.2}};
    const ErrorReport rep = error_stats(oracle::planted_pairs(planted, 20000, 2024));
    const auto x = oracle::folded_normal(planted.mean[0], planted.sd[0]);
    const auto z = oracle::folded_normal(planted.mean[2], planted.sd[2]);
    EXPECT_NEAR(rep.x.mean / x.mean, 1.0, 0.02);
    EXPECT_NEAR(rep.x.sd / x.sd, 1.0, 0.02);
    EXPECT_NEAR(rep.z.mean / z.mean, 1.0, 0.02);
    EXPECT_NEAR(rep.z.sd / z.sd, 1.0, 0.02);
}

TEST(ErrorStats, NormDominance)
{
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0.0, 3.0);
    std::vector<PositionPair> pairs;
    for (int i = 0; i < 100; ++i)
        pairs.push_back({Point3(0, 0, 50), Point3(n(rng), n(rng), 50 + n(rng))});
    const ErrorReport rep = error_stats(pairs);
    EXPECT_GE(rep.dis.mean, rep.x.mean);
    EXPECT_GE(rep.dis.mean, rep.y.mean);
    EXPECT_GE(rep.dis.mean, rep.z.mean);
    for (const auto& s : rep.samples) {
        EXPECT_GE(s.dis, s.x);
        EXPECT_GE(s.dis, s.z);
    }
}

TEST(ErrorStats, SummaryCsvLayout)
{
    std::ostringstream os;
    write_error_summary_csv(os, error_stats({{Point3(0, 0, 50), Point3(3, 0, 46)}}));
    EXPECT_EQ(os.str(), "# SD is the population standard deviation; DIS is the Euclidean distance\n"
                        "stat,DIS,X,Y,Z\n"
                        "Mean (mm),5.000000,3.000000,0.000000,4.000000\n"
                        "SD (mm),0.000000,0.000000,0.000000,0.000000\n");
}

TEST(Bubble, SingleDirection)
{
    const auto cells = bubble_aggregate({{5.0, 60.0, 3.25}});
    ASSERT_EQ(cells.size(), 1u);
    EXPECT_EQ(cells[0].mean_error, 3.25);
}

TEST(Bubble, FourDirectionsAverage)
{
    const auto cells = bubble_aggregate({{5.0, 60.0, 2}, {5.0, 60.0, 4}, {5.0, 60.0, 4}, {5.0, 60.0, 6}});
    ASSERT_EQ(cells.size(), 1u);
    EXPECT_DOUBLE_EQ(cells[0].mean_error, 4.0);
    EXPECT_EQ(cells[0].count, 4u);
}

TEST(Bubble, FullGridRowCountAndOrder)
{
    std::vector<TaggedError> tagged;
    std::size_t distinct = 0;
    for (const CommandTarget& t : validation_targets(kGeom)) {
        if (t.theta == 0.0)
            continue;
        const double disp = std::abs(t.point.x()) + std::abs(t.point.y());
        tagged.push_back({disp, t.point.z(), 1.0});
        if (t.direction == BendDirection::PosX)
            ++distinct;
    }
    const auto cells = bubble_aggregate(tagged);
    EXPECT_EQ(cells.size(), distinct);
    for (std::size_t i = 1; i < cells.size(); ++i)
        EXPECT_TRUE(cells[i - 1].z < cells[i].z ||
                    (cells[i - 1].z == cells[i].z && cells[i - 1].displacement < cells[i].displacement));
    for (const auto& c : cells)
        EXPECT_EQ(c.count, 4u);
}

TEST(Exports, HeightMapCsvAndPly)
{
    const HeightMap map = reconstruct(scan(catalog::height_field("plateau"), 200.0));
    std::ostringstream csv, ply;
    write_height_map_csv(csv, map);
    write_height_map_ply(ply, map);
    const std::string text = csv.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 22);
    EXPECT_NE(ply.str().find("element vertex 25"), std::string::npos);

    std::ostringstream feat;
    write_feature_header(feat);
    write_feature_row(feat, to_feature(map, "plateau-1"));
    const std::string ftext = feat.str();
    const std::string row = ftext.substr(ftext.find('\n') + 1);
    EXPECT_EQ(row.substr(0, 10), "plateau-1,");
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 300);
}
