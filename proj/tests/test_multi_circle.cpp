#include "arcfit/errors.hpp"
#include "arcfit/multi_circle.hpp"
#include "arcfit/synth_scan.hpp"

#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace arcfit;

namespace {

Detection label_detection(const PointCloud& cloud) {
    Detection d;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        if ((*cloud.labels)[i] == Label::CircleBoundary) {
            d.indices.push_back(i);
            d.probabilities.push_back(1.0);
        }
    return d;
}

SceneSpec two_holes() {
    SceneSpec s;
    s.plane_extent = 6.0;
    s.sample_spacing = 0.08;
    s.noise_sigma_rel = 0.0005;
    s.seed = 5;
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

RansacParams params_for(const ScanScene& sc) {
    RansacParams p;
    p.inlier_tol = std::max(2 * sc.label_threshold, 3 * sc.noise_sigma);
    p.sample_radius = 4.0;
    p.max_radius = 3.0;
    p.seed = 3;
    return p;
}

// Independent greedy: repeatedly take the globally closest remaining pair.
std::vector<std::pair<std::size_t, std::size_t>> greedy_oracle(const std::vector<Circle3D>& f,
                                                               const std::vector<Circle3D>& t, double tol) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::vector<bool> uf(f.size()), ut(t.size());
    for (;;) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = f.size(), bj = t.size();
        for (std::size_t i = 0; i < f.size(); ++i)
            for (std::size_t j = 0; j < t.size(); ++j) {
                if (uf[i] || ut[j]) continue;
                const double d = (f[i].center() - t[j].center()).norm();
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        if (bi == f.size() || best > tol) break;
        uf[bi] = ut[bj] = true;
        out.emplace_back(bi, bj);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST(PointToCircle, MatchesDenseSampling) {
    oracle::Gen g(13);
    for (int k = 0; k < 30; ++k) {
        const Point3 c(g.uniform(-2, 2), g.uniform(-2, 2), g.uniform(-2, 2));
        const Vec3 n = g.unit3();
        const double r = g.uniform(0.5, 3);
        const Circle3D circ = Circle3D::make(c, n, r);
        const Point3 p(g.uniform(-4, 4), g.uniform(-4, 4), g.uniform(-4, 4));
        EXPECT_NEAR(point_to_circle3d_distance(p, circ), oracle::polyline_distance(p, c, n, r), 1e-6 * r + 1e-9);
        EXPECT_NEAR(point_to_circle3d_distance(c + 0.7 * n, circ), std::hypot(0.7, r), 1e-12);
    }
    EXPECT_NEAR(point_to_circle3d_distance(Point3(1, 2, 3), Circle3D::make(Point3(1, 2, 3), Vec3::UnitZ(), 2.5)),
                2.5, 1e-15);
}

TEST(Ransac, RecoversTwoHoles) {
    const ScanScene sc = generate_scene(two_holes());
    const Detection det = label_detection(sc.cloud);
    const auto inst = cluster_and_fit(sc.cloud, det, params_for(sc));
    ASSERT_EQ(inst.size(), 2u);
    const auto found = circles_of(inst);
    const auto pairs = match_instances(found, sc.truth, 0.5);
    ASSERT_EQ(pairs.size(), 2u);
    for (const auto& p : pairs) {
        EXPECT_LT(p.distance, 0.05);
        EXPECT_NEAR(found[p.found].radius(), sc.truth[p.truth].radius(), 0.05);
    }
    std::set<std::size_t> seen;
    for (std::size_t k = 0; k < inst.size(); ++k) {
        EXPECT_TRUE(std::is_sorted(inst[k].inlier_indices.begin(), inst[k].inlier_indices.end()));
        for (auto i : inst[k].inlier_indices) EXPECT_TRUE(seen.insert(i).second);
        if (k) EXPECT_LE(inst[k].inlier_indices.size(), inst[k - 1].inlier_indices.size());
    }
}

TEST(Ransac, DeterministicAndDriverIndependent) {
    const ScanScene sc = generate_scene(two_holes());
    const Detection det = label_detection(sc.cloud);
    const auto a = cluster_and_fit(sc.cloud, det, params_for(sc), ConstraintKind::Hyper, Exec::Serial);
    const auto b = cluster_and_fit(sc.cloud, det, params_for(sc), ConstraintKind::Hyper, Exec::Parallel);
    const auto c = cluster_and_fit(sc.cloud, det, params_for(sc), ConstraintKind::Hyper, Exec::Parallel);
    ASSERT_EQ(a.size(), b.size());
    ASSERT_EQ(b.size(), c.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].inlier_indices, b[k].inlier_indices);
        EXPECT_EQ(a[k].circle.center(), b[k].circle.center());
        EXPECT_EQ(a[k].circle.radius(), b[k].circle.radius());
        EXPECT_EQ(b[k].circle.center(), c[k].circle.center());
    }
}

TEST(Ransac, SmallPoolsAndValidation) {
    const ScanScene sc = generate_scene(two_holes());
    EXPECT_TRUE(cluster_and_fit(sc.cloud, Detection{}, params_for(sc)).empty());
    Detection few;
    for (std::size_t i = 0; i < 5; ++i) {
        few.indices.push_back(i);
        few.probabilities.push_back(1.0);
    }
    EXPECT_TRUE(cluster_and_fit(sc.cloud, few, params_for(sc)).empty());

    RansacParams p;
    p.iterations = 0;
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = {};
    p.inlier_tol = 0.0;
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = {};
    p.min_inliers = 2;
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = {};
    p.sample_radius = -1.0;
    EXPECT_THROW(p.validate(), InvalidArgument);
    EXPECT_NO_THROW(RansacParams{}.validate());
}

TEST(Ransac, MaxRadiusRejectsLargeCircles) {
    const ScanScene sc = generate_scene(two_holes());
    RansacParams p = params_for(sc);
    p.max_radius = 1.2;
    const auto inst = cluster_and_fit(sc.cloud, label_detection(sc.cloud), p);
    for (const auto& i : inst) EXPECT_LE(i.circle.radius(), 1.2);
    ASSERT_GE(inst.size(), 1u);
    EXPECT_NEAR(inst[0].circle.radius(), 1.0, 0.05);
}

TEST(Ransac, DefaultTolerance) {
    PointCloud c;
    for (int i = 0; i < 10; ++i) c.points.emplace_back(0.5 * i, 0, 0);
    EXPECT_NEAR(default_inlier_tol(c), 1.0, 1e-12);
}

TEST(Matching, AgreesWithIndependentGreedy) {
    oracle::Gen g(29);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Circle3D> f, t;
        const int nf = g.integer(0, 7), nt = g.integer(0, 7);
        for (int i = 0; i < nf; ++i)
            f.push_back(Circle3D::make(Point3(g.uniform(0, 5), g.uniform(0, 5), 0), Vec3::UnitZ(), 1));
        for (int j = 0; j < nt; ++j)
            t.push_back(Circle3D::make(Point3(g.uniform(0, 5), g.uniform(0, 5), 0), Vec3::UnitZ(), 1));
        const double tol = g.uniform(0.2, 3);
        std::vector<std::pair<std::size_t, std::size_t>> got;
        for (const auto& p : match_instances(f, t, tol)) {
            got.emplace_back(p.found, p.truth);
            EXPECT_LE(p.distance, tol);
            EXPECT_DOUBLE_EQ(p.distance, (f[p.found].center() - t[p.truth].center()).norm());
        }
        std::sort(got.begin(), got.end());
        EXPECT_EQ(got, greedy_oracle(f, t, tol));
    }
}

TEST(Matching, TiesAndTolerance) {
    const auto c = [](double x) { return Circle3D::make(Point3(x, 0, 0), Vec3::UnitZ(), 1); };
    std::vector<Circle3D> f{c(1), c(-1)}, t{c(0)};
    auto m = match_instances(f, t, 2);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(m[0].found, 0u);
    EXPECT_TRUE(match_instances(f, t, 0.5).empty());
    EXPECT_TRUE(match_instances({}, t, 1).empty());
    EXPECT_THROW(match_instances(f, t, 0), InvalidArgument);
}
