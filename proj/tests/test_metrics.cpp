#include "arcfit/errors.hpp"
#include "arcfit/metrics.hpp"

#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace arcfit;

namespace {

std::vector<Label> labels_from(std::size_t n, std::initializer_list<std::size_t> positive) {
    std::vector<Label> l(n, Label::NonCircle);
    for (auto i : positive) l[i] = Label::CircleBoundary;
    return l;
}

Circle3D at(double x, double y, double z, double r, Vec3 n = Vec3::UnitZ()) {
    return Circle3D::make(Point3(x, y, z), n, r);
}

}  // namespace

TEST(Detection, HandCountedExample) {
    // a=0 b=1 c=2 d=3 x=4
    const auto truth = labels_from(5, {1, 2, 3});
    const std::vector<std::size_t> pred{1, 2, 4};
    const auto s = score_detection(pred, truth);
    EXPECT_EQ(s.tp, 2u);
    EXPECT_EQ(s.fp, 1u);
    EXPECT_EQ(s.fn, 1u);
    EXPECT_NEAR(s.precision, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(s.recall, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(s.f1, 2.0 / 3.0, 1e-15);
}

TEST(Detection, EdgeCases) {
    const auto truth = labels_from(4, {0, 3});
    const std::vector<std::size_t> exact{0, 3};
    const auto s = score_detection(exact, truth);
    EXPECT_EQ(s.precision, 1.0);
    EXPECT_EQ(s.recall, 1.0);
    EXPECT_EQ(s.f1, 1.0);
    const auto e = score_detection({}, truth);
    EXPECT_EQ(e.precision, 0.0);
    EXPECT_EQ(e.recall, 0.0);
    EXPECT_EQ(e.f1, 0.0);
    EXPECT_EQ(e.fn, 2u);
    const auto none = score_detection({}, labels_from(3, {}));
    EXPECT_EQ(none.f1, 0.0);
    const std::vector<std::size_t> bad{7};
    EXPECT_THROW(score_detection(bad, truth), InvalidArgument);
}

TEST(Detection, RandomPropertyChecks) {
    oracle::Gen g(101);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = g.integer(1, 60);
        std::vector<Label> truth(n);
        std::vector<std::size_t> pred;
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool t = g.uniform(0, 1) < 0.4, p = g.uniform(0, 1) < 0.5;
            truth[i] = t ? Label::CircleBoundary : Label::NonCircle;
            if (p) pred.push_back(i);
            tp += t && p;
            fp += !t && p;
            fn += t && !p;
        }
        std::shuffle(pred.begin(), pred.end(), g.eng);
        const auto s = score_detection(pred, truth);
        EXPECT_EQ(s.tp, tp);
        EXPECT_EQ(s.fp, fp);
        EXPECT_EQ(s.fn, fn);
        EXPECT_NEAR(s.f1 * (s.precision + s.recall), 2 * s.precision * s.recall, 1e-12);
        for (double v : {s.precision, s.recall, s.f1}) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
}

TEST(Fitting, SinglePairAndEmpty) {
    const std::vector<CirclePair> one{{at(0, 0, 0, 1.5), at(0, 0, 0, 1.0)}};
    const auto s = score_fitting(one);
    EXPECT_DOUBLE_EQ(s.ad_r, 0.5);
    EXPECT_DOUBLE_EQ(s.mse_r, 0.25);
    EXPECT_DOUBLE_EQ(s.ad_c, 0.0);
    EXPECT_EQ(s.k, 1u);
    EXPECT_THROW(score_fitting({}), EmptyScore);
}

TEST(Fitting, AgreesWithScalarSums) {
    oracle::Gen g(17);
    std::vector<CirclePair> pairs;
    double sc = 0, sr = 0, sq = 0;
    for (int j = 0; j < 5; ++j) {
        const Point3 c(g.uniform(-5, 5), g.uniform(-5, 5), g.uniform(-5, 5));
        const Point3 d(g.normal(0.1), g.normal(0.1), g.normal(0.1));
        const double r = g.uniform(1, 4), dr = g.normal(0.2);
        pairs.push_back({Circle3D::make(c + d, Vec3::UnitZ(), r + dr), Circle3D::make(c, Vec3::UnitZ(), r)});
        sc += d.norm();
        sr += std::abs(dr);
        sq += dr * dr;
    }
    const auto s = score_fitting(pairs);
    EXPECT_NEAR(s.ad_c, sc / 5, 1e-12);
    EXPECT_NEAR(s.ad_r, sr / 5, 1e-12);
    EXPECT_NEAR(s.mse_r, sq / 5, 1e-12);
    std::reverse(pairs.begin(), pairs.end());
    const auto t = score_fitting(pairs);
    EXPECT_NEAR(t.ad_c, s.ad_c, 1e-15);
    EXPECT_NEAR(t.mse_r, s.mse_r, 1e-15);
}

TEST(Fitting, JensenBound) {
    oracle::Gen g(23);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<CirclePair> pairs;
        const int k = g.integer(1, 20);
        for (int j = 0; j < k; ++j)
            pairs.push_back({at(g.normal(1), 0, 0, g.uniform(0.1, 5)), at(0, 0, 0, g.uniform(0.1, 5))});
        const auto s = score_fitting(pairs);
        EXPECT_GE(s.mse_r, s.ad_r * s.ad_r * (1 - 1e-12));
    }
}

TEST(Fitting, InPlaneDropsNormalOffset) {
    const CirclePair p{at(3, 4, 7, 1), at(0, 0, 0, 1)};
    EXPECT_NEAR(center_deviation(p), std::sqrt(74.0), 1e-12);
    EXPECT_NEAR(center_deviation(p, CenterMode::InPlane), 5.0, 1e-12);
    const Vec3 n = Vec3(1, 1, 0).normalized();
    const CirclePair q{Circle3D::make(Point3(2, 2, 0), Vec3::UnitZ(), 1), Circle3D::make(Point3::Zero(), n, 1)};
    EXPECT_NEAR(center_deviation(q, CenterMode::InPlane), 0.0, 1e-12);
}

TEST(Evaluate, AggregatesMatchPerCircle) {
    const std::vector<Circle3D> truth{at(0, 0, 0, 1), at(10, 0, 0, 2), at(0, 10, 0, 3)};
    const std::vector<Circle3D> found{at(10.1, 0, 0, 2.2), at(30, 0, 0, 1), at(0.05, 0, 0, 0.9)};
    const auto labels = labels_from(6, {0, 1, 2});
    const std::vector<std::size_t> pred{0, 1, 5};
    const auto r = evaluate(found, truth, pred, labels, 1.0);
    EXPECT_EQ(r.found_count, 3u);
    EXPECT_EQ(r.truth_count, 3u);
    ASSERT_EQ(r.per_circle.size(), 2u);
    EXPECT_EQ(r.per_circle[0].truth_id, 0u);
    EXPECT_EQ(r.per_circle[0].found_id, 2u);
    EXPECT_EQ(r.per_circle[1].truth_id, 1u);
    double c = 0, a = 0, q = 0;
    for (const auto& pc : r.per_circle) {
        c += pc.ad_c;
        a += pc.ad_r;
        q += pc.ad_r * pc.ad_r;
    }
    EXPECT_EQ(r.fitting.k, 2u);
    EXPECT_NEAR(r.fitting.ad_c, c / 2, 1e-12);
    EXPECT_NEAR(r.fitting.ad_r, a / 2, 1e-12);
    EXPECT_NEAR(r.fitting.mse_r, q / 2, 1e-12);
    EXPECT_NEAR(r.detection.precision, 2.0 / 3.0, 1e-15);

    const auto empty = evaluate({}, truth, {}, labels, 1.0);
    EXPECT_EQ(empty.fitting.k, 0u);
    EXPECT_TRUE(empty.per_circle.empty());
}

TEST(Formatting, TableAndCsv) {
    const std::vector<TableRow> rows{{"Hyper", {{0.1, 0.2, 0.04, 3}, {0.5, 0.25, 0.0625, 3}}}};
    const auto t = format_fit_table({"0.1%", "0.5%"}, rows);
    for (const char* s : {"Noise level", "Method", "AD(c)", "AD(r)", "MSE(r)", "Hyper", "0.250000", "0.062500"})
        EXPECT_NE(t.find(s), std::string::npos) << s;
    const std::vector<Circle3D> truth{at(0, 0, 0, 1)}, found{at(0, 0, 0, 1.5)};
    const auto r = evaluate(found, truth, {}, labels_from(1, {}), 1.0);
    const auto csv = report_csv(r);
    EXPECT_EQ(csv.rfind("truth_id,found_id,ad_c,ad_r\n", 0), 0u);
    EXPECT_NE(csv.find("0,0,0,0.5"), std::string::npos);
    EXPECT_FALSE(format_report(r).empty());
}
