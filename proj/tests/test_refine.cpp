#include "arcfit/algebraic_fit.hpp"
#include "arcfit/errors.hpp"
#include "arcfit/geometry.hpp"

#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace arcfit;

namespace {

constexpr double kPi = std::numbers::pi;

/// Coarse-to-fine nested grid search over (cx, cy, r).
Eigen::Vector3d grid_minimum(const std::vector<Point2>& pts, Eigen::Vector3d at, double half) {
    auto f = [&](const Eigen::Vector3d& t) {
        double s = 0.0;
        for (const auto& p : pts) {
            const double e = t[2] - std::sqrt((t[0] - p.x()) * (t[0] - p.x()) + (t[1] - p.y()) * (t[1] - p.y()));
            s += e * e;
        }
        return s;
    };
    const int k = 6;
    while (half > 1e-9) {
        Eigen::Vector3d best = at;
        double fb = f(at);
        for (int i = -k; i <= k; ++i)
            for (int j = -k; j <= k; ++j)
                for (int l = -k; l <= k; ++l) {
                    const Eigen::Vector3d t = at + (half / k) * Eigen::Vector3d(i, j, l);
                    const double v = f(t);
                    if (v < fb) {
                        fb = v;
                        best = t;
                    }
                }
        at = best;
        half /= 3.0;
    }
    return at;
}

}  // namespace

TEST(GeometricRefine, ExactDataIsStationary) {
    oracle::Gen g(51);
    const auto pts = oracle::circle_points(g, Point2(1, -1), 2.0, 40, 2 * kPi, 0.0);
    const Circle2D truth{Point2(1, -1), 2.0};
    const auto r = geometric_refine(pts, {}, truth);
    EXPECT_LE((r.circle.center - truth.center).norm(), 1e-12);
    EXPECT_NEAR(r.circle.radius, 2.0, 1e-12);
    EXPECT_LE(r.diag.objective, 1e-24);
    EXPECT_EQ(r.diag.eta, 0.0);
}

TEST(GeometricRefine, NeverIncreasesObjective) {
    oracle::Gen g(52);
    for (int t = 0; t < 200; ++t) {
        const auto pts = oracle::circle_points(g, Point2(0, 0), 1.0, 30 + t % 50, g.uniform(0.5, 2 * kPi), g.uniform(0.001, 0.2));
        std::vector<double> w;
        if (t % 2)
            for (std::size_t i = 0; i < pts.size(); ++i) w.push_back(g.uniform(0, 1));
        Circle2D init;
        try {
            init = fit_circle_2d(pts, w).circle;
        } catch (const DegenerateFit&) {
            continue;
        }
        const double before = geometric_objective(pts, w, init);
        const auto r = geometric_refine(pts, w, init);
        EXPECT_LE(r.diag.objective, before);
        EXPECT_NEAR(r.diag.objective, geometric_objective(pts, w, r.circle), 1e-12 * std::max(1.0, before));
        EXPECT_GT(r.circle.radius, 0.0);
    }
    // a poor start too
    const auto pts = oracle::circle_points(g, Point2(0, 0), 1.0, 50, 2 * kPi, 0.05);
    const Circle2D bad{Point2(0.7, -0.4), 3.0};
    EXPECT_LT(geometric_refine(pts, {}, bad).diag.objective, geometric_objective(pts, {}, bad));
}

TEST(GeometricRefine, MatchesGridSearch) {
    oracle::Gen g(53);
    for (int t = 0; t < 5; ++t) {
        const auto pts = oracle::circle_points(g, Point2(0.5, 0.25), 1.5, 50, 2 * kPi, 0.05);
        const auto init = fit_circle_2d(pts).circle;
        const auto r = geometric_refine(pts, {}, init);
        const auto ref = grid_minimum(pts, Eigen::Vector3d(init.center.x(), init.center.y(), init.radius), 0.1);
        EXPECT_NEAR(r.circle.center.x(), ref[0], 1e-6);
        EXPECT_NEAR(r.circle.center.y(), ref[1], 1e-6);
        EXPECT_NEAR(r.circle.radius, ref[2], 1e-6);
        EXPECT_EQ(r.diag.condition, Condition::WellPosed);
        EXPECT_LT(r.iterations, 100);
    }
}

TEST(GeometricRefine, PointAtCenterDoesNotBreakStep) {
    std::vector<Point2> pts;
    for (int i = 0; i < 12; ++i) pts.emplace_back(std::cos(2 * kPi * i / 12), std::sin(2 * kPi * i / 12));
    pts.emplace_back(0, 0);
    const auto r = geometric_refine(pts, {}, Circle2D{Point2(0, 0), 1.0});
    EXPECT_TRUE(r.circle.center.allFinite());
    EXPECT_TRUE(std::isfinite(r.circle.radius));
    EXPECT_LE(r.diag.objective, geometric_objective(pts, {}, Circle2D{Point2(0, 0), 1.0}));
}

TEST(GeometricRefine, InvalidInputs) {
    const std::vector<Point2> pts{Point2(0, 0), Point2(1, 0), Point2(0, 1)};
    EXPECT_THROW(geometric_refine(pts, {}, Circle2D{Point2(0, 0), 0.0}), InvalidArgument);
    EXPECT_THROW(geometric_refine(pts, std::vector<double>{1}, Circle2D{Point2(0, 0), 1.0}), InvalidArgument);
    EXPECT_THROW(geometric_refine({pts.data(), 2}, {}, Circle2D{Point2(0, 0), 1.0}), InvalidArgument);
}

TEST(GeometricRefine3D, StaysInPlaneAndDescends) {
    oracle::Gen g(54);
    for (int t = 0; t < 20; ++t) {
        const Eigen::Matrix3d R = g.rotation();
        const Point3 c(1, 2, 3);
        std::vector<Point3> pts;
        for (int i = 0; i < 60; ++i) {
            const double a = g.uniform(0, 2 * kPi);
            pts.push_back(c + R * Point3((2 + g.normal(0.03)) * std::cos(a), (2 + g.normal(0.03)) * std::sin(a), g.normal(0.01)));
        }
        const auto fit = fit_circle_3d(pts, {});
        const auto flat = project_to_plane(pts, fit.circle.frame);
        const double before = geometric_objective(flat, {}, fit.circle.circle);
        FitDiagnostics diag;
        const Circle3D refined = geometric_refine_3d(pts, {}, fit.circle, &diag);
        EXPECT_LE(diag.objective, before);
        EXPECT_EQ(refined.normal(), fit.circle.normal());
        EXPECT_NEAR((refined.center() - fit.circle.frame.origin).dot(fit.circle.normal()), 0.0, 1e-12);
        EXPECT_NEAR(refined.radius(), 2.0, 0.05);
    }
}
