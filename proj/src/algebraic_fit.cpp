#include "arcfit/algebraic_fit.hpp"

#include "arcfit/errors.hpp"
#include "arcfit/geometry.hpp"
#include "arcfit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace arcfit {

namespace {

/// Validated copy of `weights` (uniform when empty), optionally scaled to sum 1.
std::vector<double> prepared_weights(std::size_t n, std::span<const double> weights, bool normalize) {
    if (!weights.empty() && weights.size() != n)
        throw InvalidArgument("weights and points differ in length (" + std::to_string(weights.size()) +
                              " vs " + std::to_string(n) + ")");
    std::vector<double> w(n, 1.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!weights.empty()) w[i] = weights[i];
        if (!std::isfinite(w[i]) || w[i] < 0.0) throw InvalidArgument("weights must be finite and nonnegative");
        sum += w[i];
    }
    if (!(sum > 0.0)) throw InvalidArgument("all weights are zero");
    if (normalize)
        for (double& v : w) v /= sum;
    return w;
}

void require_points(std::span<const Point2> points) {
    if (points.size() < 3) throw InvalidArgument("circle fitting needs at least 3 points");
    for (const auto& p : points)
        if (!p.allFinite()) throw InvalidArgument("point is not finite");
}

Eigen::Matrix4d moment_matrix(std::span<const Point2> points, std::span<const double> w) {
    Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double x = points[i].x(), y = points[i].y();
        const Eigen::Vector4d z(x * x + y * y, x, y, 1.0);
        M.selfadjointView<Eigen::Lower>().rankUpdate(z, w[i] * w[i]);
    }
    M = M.selfadjointView<Eigen::Lower>();
    return M / static_cast<double>(points.size());
}

Eigen::Matrix4d constraint_from(ConstraintKind kind, std::span<const Point2> points, std::span<const double> w) {
    if (kind == ConstraintKind::Taubin) {
        // Gradient moments, weighted like the objective (w^2), scaled to unit mass.
        double sq = 0.0, sx = 0.0, sy = 0.0, sz = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double q = w[i] * w[i];
            const double x = points[i].x(), y = points[i].y();
            sq += q;
            sx += q * x;
            sy += q * y;
            sz += q * (x * x + y * y);
        }
        return constraint_matrix(kind, 1.0, sx / sq, sy / sq, sz / sq);
    }
    double sw = 0.0, sx = 0.0, sy = 0.0, sz = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double x = points[i].x(), y = points[i].y();
        sw += w[i];
        sx += w[i] * x;
        sy += w[i] * y;
        sz += w[i] * (x * x + y * y);
    }
    return constraint_matrix(kind, sw, sx, sy, sz);
}

}  // namespace

std::string_view to_string(ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::Hyper: return "hyper";
        case ConstraintKind::Pratt: return "pratt";
        case ConstraintKind::Taubin: return "taubin";
        case ConstraintKind::Kasa: return "kasa";
    }
    return "hyper";
}

ConstraintKind parse_constraint(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "hyper") return ConstraintKind::Hyper;
    if (s == "pratt") return ConstraintKind::Pratt;
    if (s == "taubin") return ConstraintKind::Taubin;
    if (s == "kasa" || s == "lls") return ConstraintKind::Kasa;
    throw InvalidArgument("unknown constraint '" + s + "'");
}

Point3 Circle3D::center() const { return lift(circle.center, frame); }

Circle3D Circle3D::make(const Point3& center, const Vec3& normal, double radius) {
    Circle3D c;
    c.frame = PlaneFrame::from_normal(center, normal);
    c.circle.center = Point2::Zero();
    c.circle.radius = radius;
    return c;
}

Eigen::Matrix4d constraint_matrix(ConstraintKind kind, double sw, double sx, double sy, double sz) {
    Eigen::Matrix4d H = Eigen::Matrix4d::Zero();
    switch (kind) {
        case ConstraintKind::Hyper:
            H << 8.0 * sz, 4.0 * sx, 4.0 * sy, 2.0,
                 4.0 * sx, 1.0, 0.0, 0.0,
                 4.0 * sy, 0.0, 1.0, 0.0,
                 2.0, 0.0, 0.0, 0.0;
            break;
        case ConstraintKind::Pratt:
            H(0, 3) = H(3, 0) = -2.0;
            H(1, 1) = H(2, 2) = 1.0;
            break;
        case ConstraintKind::Taubin:
            H << 4.0 * sz / sw, 2.0 * sx / sw, 2.0 * sy / sw, 0.0,
                 2.0 * sx / sw, 1.0, 0.0, 0.0,
                 2.0 * sy / sw, 0.0, 1.0, 0.0,
                 0.0, 0.0, 0.0, 0.0;
            break;
        case ConstraintKind::Kasa:
            H(0, 0) = 1.0;
            break;
    }
    return H;
}

DesignMatrices build_design_matrices(std::span<const Point2> points, std::span<const double> weights,
                                     ConstraintKind kind, const FitOptions& options) {
    require_points(points);
    const auto w = prepared_weights(points.size(), weights, options.normalize_weights);
    return {moment_matrix(points, w), constraint_from(kind, points, w)};
}

double algebraic_objective(std::span<const Point2> points, std::span<const double> weights,
                           const AlgebraicCircle& k, const FitOptions& options) {
    require_points(points);
    const auto w = prepared_weights(points.size(), weights, options.normalize_weights);
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double x = points[i].x(), y = points[i].y();
        const double f = k.A * (x * x + y * y) + k.B * x + k.C * y + k.D;
        s += w[i] * w[i] * f * f;
    }
    return s / static_cast<double>(points.size());
}

ConstrainedSolution solve_constrained(const Eigen::Matrix4d& M, const Eigen::Matrix4d& H) {
    if (!M.allFinite() || !H.allFinite()) throw InvalidArgument("design matrices are not finite");
    const double scale = std::max(M.cwiseAbs().maxCoeff(), H.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale ||
        (H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvalidArgument("design matrices must be symmetric");

    const double trace = M.trace();
    if (!(trace > 0.0)) throw DegenerateFit("moment matrix is zero");
    const double tol = 1e-12 * trace;

    const auto em = linalg::symmetric_eigen<4>(M);
    Eigen::Vector4d K;
    double eta;
    Condition condition = Condition::WellPosed;

    if (em.values[0] <= tol) {
        // Data lies on an exact conic of this family; the null vector is the fit.
        if (em.values[1] <= tol) throw DegenerateFit("moment matrix has a multi-dimensional null space");
        K = em.vectors.col(0);
        const double s = K.dot(H * K);
        if (!(s > 0.0)) throw DegenerateFit("exact solution violates the constraint sign");
        K /= std::sqrt(s);
        eta = std::max(0.0, K.dot(M * K));
    } else {
        // M = L L^T with L = V sqrt(Lambda); then L^-1 H L^-T y = (1/eta) y.
        const Eigen::Vector4d inv_sqrt = em.values.cwiseSqrt().cwiseInverse();
        const Eigen::Matrix4d Linv = inv_sqrt.asDiagonal() * em.vectors.transpose();
        const Eigen::Matrix4d C = Linv * H * Linv.transpose();
        const auto ec = linalg::symmetric_eigen<4>(C);
        const double mu = ec.values[3];
        if (!(mu > 0.0) || !(1.0 / mu > tol))
            throw DegenerateFit("no positive generalized eigenvalue above tolerance");
        K = Linv.transpose() * ec.vectors.col(3);
        const double s = K.dot(H * K);
        if (!(s > 0.0)) throw DegenerateFit("constraint is not positive at the solution");
        K /= std::sqrt(s);
        eta = 1.0 / mu;
        if (ec.values[2] > 0.0 && ec.values[3] - ec.values[2] <= 1e-10 * ec.values[3])
            condition = Condition::NearDegenerate;
        if (em.values[0] <= 1e-15 * em.values[3]) condition = Condition::NearDegenerate;
    }

    if (K[0] < 0.0) K = -K;
    if (std::abs(K[0]) < 1e-12 * K.norm()) throw DegenerateCircle("solution is a line (A ~ 0)");
    if (std::abs(K[0]) < 1e-8 * K.norm()) condition = Condition::NearDegenerate;

    ConstrainedSolution out;
    out.params = AlgebraicCircle::from(K);
    out.diag.eta = eta;
    out.diag.objective = std::max(0.0, K.dot(M * K));
    out.diag.condition = condition;
    return out;
}

Circle2D algebraic_to_geometric(const AlgebraicCircle& k) {
    const Eigen::Vector4d v = k.vec();
    if (!v.allFinite()) throw InvalidArgument("algebraic parameters are not finite");
    if (!(std::abs(k.A) > 1e-300) || std::abs(k.A) < 1e-12 * v.norm())
        throw DegenerateCircle("A is zero: the conic is a line");
    const double disc = k.B * k.B + k.C * k.C - 4.0 * k.A * k.D;
    if (!(disc > 0.0)) throw DegenerateCircle("discriminant B^2+C^2-4AD is not positive");
    Circle2D c;
    c.center = Point2(-k.B / (2.0 * k.A), -k.C / (2.0 * k.A));
    c.radius = std::sqrt(disc) / (2.0 * std::abs(k.A));
    return c;
}

Fit2D fit_circle_2d(std::span<const Point2> points, std::span<const double> weights, ConstraintKind kind,
                    const FitOptions& options) {
    require_points(points);
    const auto w = prepared_weights(points.size(), weights, options.normalize_weights);
    const std::size_t n = points.size();

    // Solve in centered, unit-RMS coordinates. Every constraint in the family is
    // similarity invariant when weights are normalized, so this only changes
    // the numerics, not the solution.
    Point2 shift = Point2::Zero();
    double scale = 1.0;
    if (options.normalize_weights) {
        for (std::size_t i = 0; i < n; ++i) shift += w[i] * points[i];
        double spread = 0.0;
        for (std::size_t i = 0; i < n; ++i) spread += w[i] * (points[i] - shift).squaredNorm();
        scale = std::sqrt(spread);
        if (!(scale > 0.0)) throw DegenerateFit("all weighted points coincide");
    }
    std::vector<Point2> local(n);
    for (std::size_t i = 0; i < n; ++i) local[i] = (points[i] - shift) / scale;

    Eigen::Vector4d K_local;
    FitDiagnostics diag;
    if (kind == ConstraintKind::Kasa) {
        // A = 1: minimise sum w^2 (z + Bx + Cy + D)^2 over (B, C, D).
        Eigen::Matrix3d N = Eigen::Matrix3d::Zero();
        Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
        for (std::size_t i = 0; i < n; ++i) {
            const double q = w[i] * w[i];
            const Eigen::Vector3d a(local[i].x(), local[i].y(), 1.0);
            N.noalias() += q * a * a.transpose();
            rhs -= q * local[i].squaredNorm() * a;
        }
        const auto sol = linalg::solve_full_pivot<3>(N, rhs, 1e-12);
        if (!sol) throw DegenerateFit("points are collinear");
        K_local << 1.0, (*sol)[0], (*sol)[1], (*sol)[2];
    } else {
        const Eigen::Matrix4d M = moment_matrix(local, w);
        const Eigen::Matrix4d H = constraint_from(kind, local, w);
        const auto sol = solve_constrained(M, H);
        K_local = sol.params.vec();
        diag.condition = sol.diag.condition;
    }

    Fit2D out;
    const Circle2D local_circle = algebraic_to_geometric(AlgebraicCircle::from(K_local));
    out.circle.center = shift + scale * local_circle.center;
    out.circle.radius = scale * local_circle.radius;

    // Back to caller coordinates: x' = (x - shift) / scale, multiplied through by scale^2.
    const double a = K_local[0], b = K_local[1] * scale, c = K_local[2] * scale, d = K_local[3] * scale * scale;
    Eigen::Vector4d K(a, b - 2.0 * a * shift.x(), c - 2.0 * a * shift.y(),
                      a * shift.squaredNorm() - b * shift.x() - c * shift.y() + d);
    const Eigen::Matrix4d M = moment_matrix(points, w);
    const Eigen::Matrix4d H = constraint_from(kind, points, w);
    const double kh = K.dot(H * K);
    if (kh > 0.0) K /= std::sqrt(kh);
    if (K[0] < 0.0) K = -K;
    out.params = AlgebraicCircle::from(K);
    diag.objective = std::max(0.0, K.dot(M * K));
    diag.eta = kh > 0.0 ? diag.objective : 0.0;
    out.diag = diag;
    return out;
}

Fit3D fit_circle_3d(std::span<const Point3> points, std::span<const double> weights, ConstraintKind kind,
                    const FitOptions& options) {
    if (points.size() < 3) throw InvalidArgument("circle fitting needs at least 3 points");
    const PlaneFrame plane = weighted_pca_plane(points, weights);
    const auto flat = project_to_plane(points, plane);
    const Fit2D fit = fit_circle_2d(flat, weights, kind, options);

    Fit3D out;
    out.circle.frame = plane;
    out.circle.frame.origin = lift(fit.circle.center, plane);
    out.circle.circle.center = Point2::Zero();
    out.circle.circle.radius = fit.circle.radius;
    out.diag = fit.diag;
    return out;
}

Fit3D fit_circle_3d(const PointCloud& cloud, const IndexList& indices, ConstraintKind kind,
                    const FitOptions& options) {
    std::vector<Point3> pts;
    std::vector<double> w;
    pts.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= cloud.size()) throw InvalidArgument("point index out of range");
        pts.push_back(cloud.points[i]);
        if (cloud.weights) w.push_back((*cloud.weights)[i]);
    }
    return fit_circle_3d(pts, w, kind, options);
}

}  // namespace arcfit
