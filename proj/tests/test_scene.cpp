#include <gtest/gtest.h>

#include "coilkin/scene.hpp"

using namespace coilkin;

TEST(HeightField, LookupAndFloorOutside)
{
    HeightField hf{Point2(-1, -1), 2.0, 3, 2, {1, 2, 3, 4, 5, 6}};
    EXPECT_EQ(hf.height_at(0, 0), 1.0);
    EXPECT_EQ(hf.height_at(2, 0), 2.0);
    EXPECT_EQ(hf.height_at(4.9, 2.9), 6.0);
    EXPECT_EQ(hf.height_at(5.0, 0), 0.0);
    EXPECT_EQ(hf.height_at(-1.01, 0), 0.0);
    EXPECT_EQ(hf.max_height(), 6.0);
}

TEST(HeightField, ScanAreaNodesHitCellCenters)
{
    const HeightField hf = scan_area_field([](double x, double y) { return x + 2 * y; }, Point2(0, 0), 200, 200);
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j)
            EXPECT_DOUBLE_EQ(hf.height_at(10.0 * i, 10.0 * j), 10.0 * i + 20.0 * j);
}

TEST(HeightField, Validation)
{
    HeightField bad{Point2(0, 0), 1.0, 2, 2, {1, 2, 3}};
    EXPECT_THROW(bad.validate(), Error);
    bad.heights = {1, 2, 3, -1};
    EXPECT_THROW(bad.validate(), Error);
    bad.heights = {1, 2, 3, 4};
    bad.cell_mm = 0.0;
    EXPECT_THROW(bad.validate(), Error);
}

TEST(Cube, ClosedContainment)
{
    const Cube c{Point3(10, 0, -5), 4.0};
    EXPECT_TRUE(c.contains(Point3(12, 2, -3)));
    EXPECT_TRUE(c.contains(Point3(10, 0, -5)));
    EXPECT_FALSE(c.contains(Point3(12.01, 0, -5)));
}

TEST(SceneJson, HeightFieldRoundTrip)
{
    const Scene s = scan_area_field(shapes::cylinder(100, 100, 30, 20), Point2(0, 0), 200, 200, 5.0);
    const Scene back = scene_from_json(scene_to_json(s));
    const auto& a = std::get<HeightField>(s);
    const auto& b = std::get<HeightField>(back);
    EXPECT_EQ(a.heights, b.heights);
    EXPECT_EQ(a.cols, b.cols);
    EXPECT_EQ(a.origin, b.origin);
}

TEST(SceneJson, TubeWithAndWithoutObstacle)
{
    const Scene t = scene_from_json(nlohmann::json::parse(R"({"type":"tube","inner_radius_mm":174})"));
    EXPECT_FALSE(std::get<Tube>(t).obstacle.has_value());
    const Scene o = scene_from_json(nlohmann::json::parse(
        R"({"type":"tube","inner_radius_mm":174,"obstacle":{"center":[50,0,-200],"edge_mm":40}})"));
    ASSERT_TRUE(std::get<Tube>(o).obstacle.has_value());
    EXPECT_EQ(std::get<Tube>(o).obstacle->center.z(), -200.0);
    EXPECT_EQ(scene_to_json(o), nlohmann::json::parse(
        R"({"type":"tube","inner_radius_mm":174.0,"obstacle":{"center":[50.0,0.0,-200.0],"edge_mm":40.0}})"));
}

TEST(SceneJson, Errors)
{
    auto code = [](const char* text) {
        try {
            scene_from_json(nlohmann::json::parse(text));
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoError;
    };
    EXPECT_EQ(code(R"({"type":"cave"})"), ErrorCode::ParseError);
    EXPECT_EQ(code(R"({"type":"tube"})"), ErrorCode::ParseError);
    EXPECT_EQ(code(R"({"type":"tube","inner_radius_mm":-1})"), ErrorCode::ParseError);
    EXPECT_EQ(code(R"({"type":"height_field","origin":[0,0],"cell_mm":1,"cols":2,"rows":1,"heights":[1]})"),
              ErrorCode::ParseError);
}

TEST(Shapes, Profiles)
{
    EXPECT_EQ(shapes::plateau(0, 0, 50, 50, 40)(24, -24), 40.0);
    EXPECT_EQ(shapes::plateau(0, 0, 50, 50, 40)(26, 0), 0.0);
    EXPECT_EQ(shapes::two_tier_box(0, 0, 40, 20, 10, 30)(-5, 0), 10.0);
    EXPECT_EQ(shapes::two_tier_box(0, 0, 40, 20, 10, 30)(5, 0), 30.0);
    EXPECT_NEAR(shapes::sphere_cap(0, 0, 80, 45)(0, 0), 45.0, 1e-12);
    EXPECT_EQ(shapes::sphere_cap(0, 0, 80, 45)(79, 0), 0.0); // below the floor near the rim
    EXPECT_EQ(shapes::open_container(0, 0, 60, 40, 5, 30, 5)(0, 0), 5.0);
    EXPECT_EQ(shapes::open_container(0, 0, 60, 40, 5, 30, 5)(28, 0), 30.0);
    EXPECT_NEAR(shapes::wedge(0, 0, 40, 40, 10, 30)(0, 0), 20.0, 1e-12);
    EXPECT_EQ(shapes::ring(0, 0, 10, 20, 7)(15, 0), 7.0);
    EXPECT_EQ(shapes::ring(0, 0, 10, 20, 7)(5, 0), 0.0);
}
