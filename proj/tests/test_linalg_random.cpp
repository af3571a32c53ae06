#include "arcfit/linalg.hpp"
#include "arcfit/random.hpp"

#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <set>

using namespace arcfit;

namespace {

template <int N>
Eigen::Matrix<double, N, N> random_symmetric(oracle::Gen& g, double scale = 1.0) {
    Eigen::Matrix<double, N, N> a;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) a(i, j) = g.uniform(-scale, scale);
    return a + a.transpose();
}

template <int N>
void check_decomposition(const Eigen::Matrix<double, N, N>& a) {
    const auto e = linalg::symmetric_eigen<N>(a);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> ref(a);
    const double tol = 1e-12 * std::max(1.0, a.norm());
    for (int k = 0; k < N; ++k) EXPECT_NEAR(e.values[k], ref.eigenvalues()[k], tol);
    for (int k = 1; k < N; ++k) EXPECT_LE(e.values[k - 1], e.values[k]);
    const auto recon = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    EXPECT_LE((recon - a).norm(), tol);
    EXPECT_LE((e.vectors.transpose() * e.vectors - Eigen::Matrix<double, N, N>::Identity()).norm(), 1e-12);
}

}  // namespace

TEST(SymmetricEigen, MatchesReferenceSolver3x3) {
    oracle::Gen g(11);
    for (int t = 0; t < 200; ++t) check_decomposition<3>(random_symmetric<3>(g, g.uniform(1e-3, 1e3)));
}

TEST(SymmetricEigen, MatchesReferenceSolver4x4) {
    oracle::Gen g(12);
    for (int t = 0; t < 200; ++t) check_decomposition<4>(random_symmetric<4>(g, g.uniform(1e-3, 1e3)));
}

TEST(SymmetricEigen, DiagonalAndRepeatedValues) {
    Eigen::Matrix3d d = Eigen::Vector3d(3.0, -1.0, 2.0).asDiagonal();
    const auto e = linalg::symmetric_eigen<3>(d);
    EXPECT_DOUBLE_EQ(e.values[0], -1.0);
    EXPECT_DOUBLE_EQ(e.values[1], 2.0);
    EXPECT_DOUBLE_EQ(e.values[2], 3.0);
    check_decomposition<4>(Eigen::Matrix4d::Identity() * 2.0);
    check_decomposition<3>(Eigen::Matrix3d::Zero());
}

TEST(FullPivotSolve, MatchesReference) {
    oracle::Gen g(13);
    for (int t = 0; t < 100; ++t) {
        Eigen::Matrix3d a;
        for (int i = 0; i < 9; ++i) a(i) = g.uniform(-1, 1);
        const Eigen::Vector3d b(g.uniform(-1, 1), g.uniform(-1, 1), g.uniform(-1, 1));
        const auto x = linalg::solve_full_pivot<3>(a, b);
        ASSERT_TRUE(x);
        EXPECT_LE((*x - a.fullPivLu().solve(b)).norm(), 1e-9 * std::max(1.0, x->norm()));
    }
}

TEST(FullPivotSolve, SingularReturnsNothing) {
    Eigen::Matrix3d a;
    a << 1, 2, 3, 2, 4, 6, 0, 1, 1;
    EXPECT_FALSE(linalg::solve_full_pivot<3>(a, Eigen::Vector3d(1, 2, 3)));
}

TEST(Rng, SameSeedSameStream) {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        differs = differs || x != c.next_u64();
    }
    EXPECT_TRUE(differs);
}

TEST(Rng, SplitmixReferenceValue) {
    std::uint64_t state = 0;
    EXPECT_EQ(splitmix64(state), 0xe220a8397b1dcdafULL);
}

TEST(Rng, RangesAndMoments) {
    Rng r(7);
    double sum = 0.0, sq = 0.0;
    std::set<std::uint64_t> seen;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const auto k = r.below(7);
        ASSERT_LT(k, 7u);
        seen.insert(k);
        const double z = r.normal();
        sum += z;
        sq += z * z;
    }
    EXPECT_EQ(seen.size(), 7u);
    EXPECT_NEAR(sum / n, 0.0, 0.01);
    EXPECT_NEAR(sq / n, 1.0, 0.02);
}
