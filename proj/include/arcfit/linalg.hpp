#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>

namespace arcfit::linalg {

template <int N>
struct SymmetricEigen {
    Eigen::Matrix<double, N, 1> values;   // ascending
    Eigen::Matrix<double, N, N> vectors;  // column k pairs with values[k]
};

/// Cyclic Jacobi eigen-decomposition of a small symmetric matrix. Sweeps stop
/// once the off-diagonal Frobenius norm falls below 1e-14 of the full norm.
template <int N>
SymmetricEigen<N> symmetric_eigen(const Eigen::Matrix<double, N, N>& input) {
    using Mat = Eigen::Matrix<double, N, N>;
    Mat a = 0.5 * (input + input.transpose());
    Mat v = Mat::Identity();

    const double total = a.norm();
    const double tol = 1e-14 * total;
    auto off_norm = [&a] {
        double s = 0.0;
        for (int p = 0; p < N; ++p)
            for (int q = p + 1; q < N; ++q) s += 2.0 * a(p, q) * a(p, q);
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < 100 && total > 0.0 && off_norm() > tol; ++sweep) {
        for (int p = 0; p < N - 1; ++p) {
            for (int q = p + 1; q < N; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < N; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < N; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < N; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::array<int, N> order;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&a](int i, int j) { return a(i, i) < a(j, j); });

    SymmetricEigen<N> out;
    for (int k = 0; k < N; ++k) {
        out.values[k] = a(order[k], order[k]);
        out.vectors.col(k) = v.col(order[k]);
    }
    return out;
}

/// Gaussian elimination with full pivoting. Returns nullopt when the largest
/// remaining pivot drops below `rel_tol` times the largest entry of `m`.
template <int N>
std::optional<Eigen::Matrix<double, N, 1>> solve_full_pivot(Eigen::Matrix<double, N, N> m,
                                                            Eigen::Matrix<double, N, 1> b,
                                                            double rel_tol = 1e-14) {
    std::array<int, N> col;
    std::iota(col.begin(), col.end(), 0);
    const double scale = m.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) return std::nullopt;

    for (int k = 0; k < N; ++k) {
        int pr = k, pc = k;
        double best = 0.0;
        for (int i = k; i < N; ++i)
            for (int j = k; j < N; ++j)
                if (std::abs(m(i, j)) > best) {
                    best = std::abs(m(i, j));
                    pr = i;
                    pc = j;
                }
        if (best <= rel_tol * scale) return std::nullopt;
        m.row(k).swap(m.row(pr));
        std::swap(b[k], b[pr]);
        m.col(k).swap(m.col(pc));
        std::swap(col[k], col[pc]);
        for (int i = k + 1; i < N; ++i) {
            const double f = m(i, k) / m(k, k);
            m.row(i) -= f * m.row(k);
            b[i] -= f * b[k];
        }
    }

    Eigen::Matrix<double, N, 1> y;
    for (int i = N - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < N; ++j) s -= m(i, j) * y[j];
        y[i] = s / m(i, i);
    }
    Eigen::Matrix<double, N, 1> x;
    for (int k = 0; k < N; ++k) x[col[k]] = y[k];
    return x;
}

}  // namespace arcfit::linalg
