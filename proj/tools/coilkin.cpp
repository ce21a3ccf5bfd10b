// coilkin: command-line front end for kinematics, actuation, workspace and
// mission simulation.
//
// Exit codes: 0 ok, 2 bad arguments or configuration, 3 unreachable or
// infeasible request, 4 I/O failure.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "coilkin/coilkin.hpp"

namespace fs = std::filesystem;
using namespace coilkin;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kConfig = 2, kInfeasible = 3, kIo = 4 };

int exit_code(ErrorCode code)
{
    switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::InvalidState:
        return kConfig;
    case ErrorCode::IoError:
        return kIo;
    default:
        return kInfeasible;
    }
}

struct Globals {
    std::string geometry_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> d, l, servo_range;
};

RobotGeometry resolve_geometry(const Globals& g)
{
    RobotGeometry geom = g.geometry_path.empty() ? RobotGeometry{} : load_geometry(g.geometry_path);
    if (g.d)
        geom.d = *g.d;
    if (g.l)
        geom.l = *g.l;
    if (g.servo_range)
        geom.servo_range = *g.servo_range;
    geom.validate();
    return geom;
}

std::optional<ContactSensor> make_sensor(const Globals& g)
{
    if (!g.seed)
        return std::nullopt;
    ContactSensor::PressureModel model;
    model.seed = *g.seed;
    return ContactSensor(model);
}

// Output directory plus the list of files written, summarized in manifest.json.
class RunDir {
public:
    RunDir(const Globals& g, std::string command) : command_(std::move(command))
    {
        const char* env = std::getenv("COILKIN_OUT");
        dir_ = (env && *env) ? fs::path(env) : fs::path(g.out_dir);
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec)
            throw Error(ErrorCode::IoError, "cannot create output directory " + dir_.string());
        config_ = {{"geometry", to_json(resolve_geometry(g))}};
        if (g.seed)
            config_["seed"] = *g.seed;
    }

    template <class Writer>
    void write(const std::string& name, Writer&& writer)
    {
        const fs::path path = dir_ / name;
        std::ofstream os(path);
        if (!os)
            throw Error(ErrorCode::IoError, "cannot write " + path.string());
        writer(os);
        if (!os)
            throw Error(ErrorCode::IoError, "write failed for " + path.string());
        files_.push_back(name);
    }

    json& config() { return config_; }

    void finish()
    {
        json manifest = {{"command", command_}, {"config", config_}, {"files", files_}};
        std::ofstream os(dir_ / "manifest.json");
        if (!os)
            throw Error(ErrorCode::IoError, "cannot write manifest in " + dir_.string());
        os << manifest.dump(2) << '\n';
    }

    const fs::path& dir() const { return dir_; }

private:
    std::string command_;
    fs::path dir_;
    json config_;
    std::vector<std::string> files_;
};

std::string fmt3(const Point3& p) { return fmt::format("{:.6f},{:.6f},{:.6f}", p.x(), p.y(), p.z()); }

ArcState state_from_degrees(double alpha_deg, double theta_deg, double s)
{
    if (theta_deg == 0.0)
        return ArcState::straight(s);
    return ArcState::bent(wrap_two_pi(deg2rad(alpha_deg)), deg2rad(theta_deg), s);
}

void print_tendons(const ArcState& st, const RobotGeometry& geom)
{
    const TendonSolution sol = solve_tendons(st, geom);
    const ServoCommand cmd = tendon_to_servo(sol.lengths, home_tendons(geom), geom);
    std::printf("tendon,length,branch,angle_deg,slack\n");
    for (std::size_t i = 0; i < 4; ++i) {
        const char* branch = sol.branch[i] == TendonBranch::Straight ? "straight"
                             : sol.branch[i] == TendonBranch::InnerArc ? "inner-arc"
                                                                        : "outer-chord";
        std::printf("%zu,%.6f,%s,%.6f,%d\n", i + 1, sol.lengths[i], branch, cmd.angle[i], cmd.slack[i] ? 1 : 0);
    }
}

HeightField height_field_scene(const std::string& scene_path, const std::string& object, double cx, double cy)
{
    if (scene_path.empty())
        return catalog::height_field(object, cx, cy);
    const Scene scene = load_scene(scene_path);
    if (const auto* hf = std::get_if<HeightField>(&scene))
        return *hf;
    throw Error(ErrorCode::ParseError, scene_path + " is not a height_field scene");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Tendon-driven continuum robot kinematics and mission simulator"};
    app.require_subcommand(1);

    Globals g;
    app.add_option("--geometry", g.geometry_path, "Robot geometry JSON")->check(CLI::ExistingFile);
    app.add_option("--out", g.out_dir, "Output directory (COILKIN_OUT overrides)");
    app.add_option("--seed", g.seed, "Enable the pressure-sensor model with this seed");
    app.add_option("--d", g.d, "Tendon attachment radius [mm]");
    app.add_option("--l", g.l, "Spring top to tip length [mm]");
    app.add_option("--servo-range", g.servo_range, "Servo travel [deg]");

    // fk
    double alpha = 0, theta = 0, s = 70;
    auto* fk = app.add_subcommand("fk", "Forward kinematics of one arc state (angles in degrees)");
    fk->add_option("--alpha", alpha, "Bend plane angle [deg]");
    fk->add_option("--theta", theta, "Bend angle [deg]");
    fk->add_option("--s", s, "Backbone length [mm]");

    // ik
    std::vector<double> target;
    bool ik_tendons = false;
    auto* ikc = app.add_subcommand("ik", "Arc state reaching a spring-top point");
    ikc->add_option("point", target, "x y z [mm]")->expected(3)->required();
    ikc->add_flag("--tendons", ik_tendons, "Also print tendon lengths and servo angles");

    // tendons
    auto* tend = app.add_subcommand("tendons", "Tendon lengths and servo angles for an arc state");
    tend->add_option("--alpha", alpha, "Bend plane angle [deg]");
    tend->add_option("--theta", theta, "Bend angle [deg]");
    tend->add_option("--s", s, "Backbone length [mm]");

    // workspace
    WorkspaceGrid grid;
    unsigned threads = 1;
    auto* ws = app.add_subcommand("workspace", "Sample the reachable workspace");
    ws->add_option("--n-alpha", grid.n_alpha)->check(CLI::PositiveNumber);
    ws->add_option("--n-theta", grid.n_theta)->check(CLI::PositiveNumber);
    ws->add_option("--n-s", grid.n_s)->check(CLI::PositiveNumber);
    ws->add_option("--threads", threads)->check(CLI::PositiveNumber);

    // scan
    std::string scene_path, object = "plateau";
    double cx = 100, cy = 100;
    ScanConfig scan_cfg;
    auto* sc = app.add_subcommand("scan", "Zig-zag surface scan of a height-field scene");
    sc->add_option("--scene", scene_path, "Height-field scene JSON")->check(CLI::ExistingFile);
    sc->add_option("--object", object, "Catalog object when no scene is given");
    sc->add_option("--cx", cx, "Catalog object center x [mm]");
    sc->add_option("--cy", cy, "Catalog object center y [mm]");
    sc->add_option("--arm-z", scan_cfg.arm_z, "Arm height [mm]");
    sc->add_option("--step", scan_cfg.step, "Node spacing [mm]")->check(CLI::PositiveNumber);

    // explore
    std::optional<double> obstacle_offset;
    bool no_obstacle = false;
    auto* ex = app.add_subcommand("explore", "Descend into a tube, scanning radially at each level");
    ex->add_option("--obstacle-offset", obstacle_offset, "Obstacle top below the compressed tip [mm]");
    ex->add_flag("--no-obstacle", no_obstacle, "Empty tube");
    ex->add_option("--scene", scene_path, "Tube scene JSON")->check(CLI::ExistingFile);

    // make-scene
    auto* ms = app.add_subcommand("make-scene", "Write a scene JSON to stdout");
    ms->add_option("--object", object, "Catalog object, or 'tube'");
    ms->add_option("--cx", cx);
    ms->add_option("--cy", cy);
    ms->add_option("--obstacle-offset", obstacle_offset, "Tube obstacle offset [mm]");

    // targets
    auto* tg = app.add_subcommand("targets", "Validation targets with arc states and servo angles");

    // stats
    std::string pairs_path;
    auto* st = app.add_subcommand("stats", "Error statistics for desired/actual position pairs");
    st->add_option("pairs", pairs_path, "CSV: xd,yd,zd,xa,ya,za per line")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        const RobotGeometry geom = resolve_geometry(g);
        std::optional<ContactSensor> sensor = make_sensor(g);
        ContactSensor* sensor_ptr = sensor ? &*sensor : nullptr;

        if (*fk) {
            const ArcState state = state_from_degrees(alpha, theta, s);
            std::printf("xU,yU,zU,xE,yE,zE\n%s,%s\n", fmt3(fk_spring_top(state, geom)).c_str(),
                        fmt3(fk_tip(state, geom)).c_str());
        } else if (*ikc) {
            const ArcState state = ik(Point3(target[0], target[1], target[2]), geom);
            std::printf("alpha_deg,theta_deg,r,s\n%.6f,%.6f,%.6f,%.6f\n", rad2deg(state.alpha), rad2deg(state.theta),
                        state.r, state.s);
            if (ik_tendons)
                print_tendons(state, geom);
        } else if (*tend) {
            print_tendons(state_from_degrees(alpha, theta, s), geom);
        } else if (*ws) {
            RunDir run(g, "workspace");
            run.config()["grid"] = {grid.n_alpha, grid.n_theta, grid.n_s};
            const auto samples = sample_workspace(geom, grid, threads);
            run.write("workspace.csv", [&](std::ostream& os) { write_workspace_csv(os, samples); });
            run.write("workspace.ply", [&](std::ostream& os) { write_workspace_ply(os, samples); });
            const WorkspaceExtents ext = workspace_extents(samples);
            std::printf("%s\n", json({{"samples", samples.size()},
                                      {"feasible", ext.feasible},
                                      {"z_min", ext.z_min},
                                      {"z_max", ext.z_max},
                                      {"radial_max", ext.radial_max}})
                                    .dump()
                                    .c_str());
            run.finish();
        } else if (*sc) {
            RunDir run(g, "scan");
            const HeightField scene = height_field_scene(scene_path, object, cx, cy);
            run.config()["scene"] = scene_path.empty() ? json{{"object", object}, {"center", {cx, cy}}}
                                                       : json{{"file", scene_path}};
            run.config()["arm_z"] = scan_cfg.arm_z;
            run.config()["step"] = scan_cfg.step;
            MissionLog log;
            const ContactCloud cloud = surface_scan(scene, geom, scan_cfg, sensor_ptr, &log);
            run.write("scan_log.csv", [&](std::ostream& os) { log.write_csv(os); });
            json summary = {{"nodes", cloud.nodes.size()}, {"contacts", cloud.contact_count()}};
            if (cloud.contact_count() > 0) {
                const HeightMap map = reconstruct(cloud);
                run.write("height_map.csv", [&](std::ostream& os) { write_height_map_csv(os, map); });
                run.write("height_map.ply", [&](std::ostream& os) { write_height_map_ply(os, map); });
                const FeatureVector f = to_feature(map, scene_path.empty() ? object : fs::path(scene_path).stem().string());
                run.write("features.csv", [&](std::ostream& os) {
                    write_feature_header(os);
                    write_feature_row(os, f);
                });
                summary["max_height"] = map.max_height();
            }
            std::printf("%s\n", summary.dump().c_str());
            run.finish();
        } else if (*ex) {
            Tube tube;
            if (!scene_path.empty()) {
                const Scene scene = load_scene(scene_path);
                if (!std::holds_alternative<Tube>(scene))
                    throw Error(ErrorCode::ParseError, scene_path + " is not a tube scene");
                tube = std::get<Tube>(scene);
            } else if (!no_obstacle) {
                if (!obstacle_offset)
                    throw Error(ErrorCode::ParseError, "explore needs --obstacle-offset, --no-obstacle or --scene");
                tube.obstacle = obstacle_at_offset(*obstacle_offset, geom);
            }
            RunDir run(g, "explore");
            run.config()["scene"] = scene_to_json(tube);
            MissionLog log;
            const ExploreResult res = explore_tube(tube, geom, {}, sensor_ptr, &log);
            run.write("explore_log.csv", [&](std::ostream& os) { log.write_csv(os); });
            std::printf("stop_depth=%g contacts=%zu\n", res.stop_depth, res.contact_count());
            run.finish();
        } else if (*ms) {
            Scene scene;
            if (object == "tube") {
                Tube tube;
                if (obstacle_offset)
                    tube.obstacle = obstacle_at_offset(*obstacle_offset, geom);
                scene = tube;
            } else {
                scene = catalog::height_field(object, cx, cy);
            }
            std::printf("%s\n", scene_to_json(scene).dump().c_str());
        } else if (*tg) {
            std::printf("direction,x,y,z,alpha_deg,theta_deg,s,angle1,angle2,angle3,angle4\n");
            for (const CommandTarget& t : validation_targets(geom)) {
                const ArcState state = ik(t.point, geom);
                const ServoCommand cmd = tendon_to_servo(tendon_lengths(state, geom), home_tendons(geom), geom);
                std::printf("%s,%s,%.6f,%.6f,%.6f,%.4f,%.4f,%.4f,%.4f\n", to_string(t.direction),
                            fmt3(t.point).c_str(), rad2deg(state.alpha), rad2deg(state.theta), state.s, cmd.angle[0],
                            cmd.angle[1], cmd.angle[2], cmd.angle[3]);
            }
        } else if (*st) {
            std::ifstream in(pairs_path);
            if (!in)
                throw Error(ErrorCode::IoError, "cannot open " + pairs_path);
            std::vector<PositionPair> pairs;
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0])))
                    continue;
                std::replace(line.begin(), line.end(), ',', ' ');
                std::istringstream ls(line);
                double v[6];
                for (double& x : v)
                    if (!(ls >> x))
                        throw Error(ErrorCode::ParseError, "bad pair line: " + line);
                pairs.push_back({Point3(v[0], v[1], v[2]), Point3(v[3], v[4], v[5])});
            }
            if (pairs.empty())
                throw Error(ErrorCode::ParseError, pairs_path + " has no pairs");
            std::ostringstream os;
            write_error_summary_csv(os, error_stats(pairs));
            std::fputs(os.str().c_str(), stdout);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfig;
    }
    return kOk;
}
