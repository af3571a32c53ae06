#include "arcfit/errors.hpp"
#include "arcfit/pipeline.hpp"
#include "arcfit/serialize.hpp"

#include <gtest/gtest.h>

using namespace arcfit;

namespace {

SceneSpec two_holes() {
    SceneSpec s;
    s.plane_extent = 6.0;
    s.sample_spacing = 0.08;
    s.noise_sigma_rel = 0.001;
    s.seed = 7;
    CircleSpec a, b;
    a.center = Point3(-2.5, 0, 0);
    a.radius = 1.0;
    a.depth = 0.8;
    b.center = Point3(2, 1.5, 0);
    b.radius = 1.5;
    b.depth = 1.0;
    s.circles = {a, b};
    return s;
}

std::vector<double> label_probabilities(const PointCloud& c) {
    std::vector<double> p;
    for (auto l : *c.labels) p.push_back(l == Label::CircleBoundary ? 1.0 : 0.0);
    return p;
}

}  // namespace

TEST(Serialize, CircleRecordRoundTrip) {
    const Circle3D c = Circle3D::make(Point3(1, -2, 0.5), Vec3(0, 0.6, 0.8), 2.25);
    FitDiagnostics d;
    d.eta = 1e-5;
    d.condition = Condition::NearDegenerate;
    const Json j = circle_record(c, d, ConstraintKind::Pratt);
    EXPECT_EQ(j["constraint"], "pratt");
    EXPECT_EQ(j["condition"], "near-degenerate");
    EXPECT_EQ(j["radius"].get<double>(), 2.25);
    const auto back = circles_from_json(Json::parse(Json::array({j}).dump()));
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].center(), c.center());
    EXPECT_NEAR((back[0].normal() - c.normal()).norm(), 0.0, 1e-15);
    EXPECT_EQ(back[0].radius(), 2.25);
    EXPECT_FALSE(circle_record(c, {}, ConstraintKind::Hyper).contains("condition"));

    const Json obj = {{"circles", {{{"center", {0, 0, 0}}, {"radius", 1}}}}};
    const auto o = circles_from_json(obj);
    ASSERT_EQ(o.size(), 1u);
    EXPECT_EQ(o[0].normal(), Vec3::UnitZ());
    EXPECT_THROW(circles_from_json(Json{{"radius", 1}}), FormatError);
    EXPECT_THROW(circles_from_json(Json::array({{{"center", {0, 0}}, {"radius", 1}}})), FormatError);
}

TEST(Serialize, InliersUnion) {
    const Json j = Json::parse(R"([{"inliers": [5, 1, 3]}, {"inliers": [3, 9]}])");
    EXPECT_EQ(inliers_from_json(j), (IndexList{1, 3, 5, 9}));
}

TEST(Serialize, SceneSpecRoundTrip) {
    SceneSpec s = two_holes();
    s.circles[1].arc_span = 2.0;
    s.circles[1].outer_wall = true;
    s.view_angle_deg = 60;
    const SceneSpec t = scene_spec_from_json(Json::parse(scene_spec_json(s).dump()));
    EXPECT_EQ(scene_spec_json(t).dump(), scene_spec_json(s).dump());
    EXPECT_EQ(t.seed, 7u);
    EXPECT_EQ(t.circles[1].arc_span, 2.0);

    const SceneSpec d = scene_spec_from_json(Json::object());
    EXPECT_EQ(scene_spec_json(d).dump(), scene_spec_json(SceneSpec{}).dump());
    EXPECT_THROW(scene_spec_from_json(Json{{"sample_spacing", "dense"}}), InvalidSpec);
    EXPECT_THROW(scene_spec_from_json(Json{{"circles", {{{"radius", 1}}}}}), InvalidSpec);
}

TEST(Serialize, ParseErrorsCarryLine) {
    try {
        parse_json("{\n  \"a\": 1,\n  oops\n}", "cfg.json");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("cfg.json:3:", 0), 0u) << e.what();
    }
}

TEST(Pipeline, ConfigRoundTripAndValidation) {
    PipelineConfig c = PipelineConfig::from_r_hyper(2.0);
    EXPECT_DOUBLE_EQ(c.boundary.query_radius, 0.5);
    EXPECT_DOUBLE_EQ(c.ransac.sample_radius, 4.0);
    EXPECT_DOUBLE_EQ(c.ransac.max_radius, 10.0);
    c.constraint = ConstraintKind::Taubin;
    c.inlier_tol = 0.03;
    c.refine = true;
    c.ransac.iterations = 321;
    const PipelineConfig d = config_from_json(Json::parse(config_json(c).dump()));
    EXPECT_EQ(config_json(d).dump(), config_json(c).dump());
    EXPECT_EQ(d.constraint, ConstraintKind::Taubin);
    EXPECT_EQ(*d.inlier_tol, 0.03);
    EXPECT_EQ(d.ransac.iterations, 321);
    EXPECT_THROW(config_from_json(Json{{"constraint", "Ellipse"}}), InvalidSpec);
    EXPECT_THROW(config_from_json(Json{{"ransac", {{"iterations", -4}}}}), InvalidSpec);
    PipelineConfig bad;
    bad.r_hyper = 0;
    EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(Pipeline, EmptyCloudGivesNoInstances) {
    const auto r = run_extract(PointCloud{}, PipelineConfig{});
    EXPECT_TRUE(r.instances.empty());
    EXPECT_TRUE(instances_json(r.instances, ConstraintKind::Hyper).dump() == "[]");
}

TEST(Pipeline, TwoHoleSceneWithExternalWeights) {
    const ScanScene sc = generate_scene(two_holes());
    const auto prob = label_probabilities(sc.cloud);
    PipelineConfig cfg = PipelineConfig::from_r_hyper(1.0);
    for (bool refine : {false, true}) {
        cfg.refine = refine;
        const auto r = run_extract(sc.cloud, cfg, std::span<const double>(prob));
        EXPECT_TRUE(r.external_detection);
        ASSERT_EQ(r.instances.size(), 2u);
        const auto found = circles_of(r.instances);
        const auto pairs = match_instances(found, sc.truth, 0.5);
        ASSERT_EQ(pairs.size(), 2u);
        for (const auto& p : pairs) EXPECT_NEAR(found[p.found].radius(), sc.truth[p.truth].radius(), 0.05);
        const Json j = instances_json(r.instances, cfg.constraint);
        EXPECT_EQ(circles_from_json(j).size(), 2u);
        EXPECT_EQ(inliers_from_json(j).size(), r.instances[0].inlier_indices.size() + r.instances[1].inlier_indices.size());
    }
    const std::vector<double> wrong(3, 1.0);
    EXPECT_THROW(run_extract(sc.cloud, cfg, std::span<const double>(wrong)), Error);
}

TEST(Pipeline, ReportJsonMatchesRecomputation) {
    const ScanScene sc = generate_scene(two_holes());
    const auto prob = label_probabilities(sc.cloud);
    const auto r = run_extract(sc.cloud, PipelineConfig::from_r_hyper(1.0), std::span<const double>(prob));
    const auto found = circles_of(r.instances);
    const auto rep = evaluate(found, sc.truth, r.detection.indices, *sc.cloud.labels, 0.5);
    const Json j = report_json(rep);
    EXPECT_EQ(j["detection"]["tp"].get<std::size_t>(), rep.detection.tp);
    EXPECT_DOUBLE_EQ(j["fitting"]["ad_r"].get<double>(), rep.fitting.ad_r);
    EXPECT_EQ(j["per_circle"].size(), rep.per_circle.size());
    EXPECT_EQ(j["config"]["truth"].get<std::size_t>(), 2u);
    EXPECT_DOUBLE_EQ(rep.detection.recall, 1.0);
}

TEST(Bench, SmallRunIsDeterministic) {
    BenchConfig cfg;
    cfg.noise_levels = {0.001};
    cfg.circles = 4;
    cfg.distinct_radii = 2;
    const auto a = run_bench(cfg), b = run_bench(cfg);
    EXPECT_EQ(bench_json(cfg, a).dump(), bench_json(cfg, b).dump());
    ASSERT_EQ(a.levels.size(), 1u);
    ASSERT_EQ(a.methods.size(), a.levels[0].methods.size());
    for (std::size_t m = 0; m < a.methods.size(); ++m) {
        EXPECT_EQ(a.levels[0].found[m], 4u) << a.methods[m];
        EXPECT_LT(a.levels[0].methods[m].ad_r, 3 * a.levels[0].noise_sigma) << a.methods[m];
    }
    const auto t = bench_table(a);
    EXPECT_NE(t.find("Hyper+refine"), std::string::npos);
}
