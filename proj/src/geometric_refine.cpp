#include "arcfit/algebraic_fit.hpp"
#include "arcfit/errors.hpp"
#include "arcfit/geometry.hpp"
#include "arcfit/linalg.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace arcfit {

namespace {

constexpr int kMaxIterations = 100;
constexpr double kCoincident = 1e-14;

double weight_at(std::span<const double> weights, std::size_t i) { return weights.empty() ? 1.0 : weights[i]; }

double objective_at(std::span<const Point2> points, std::span<const double> weights, const Eigen::Vector3d& t) {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = std::hypot(t[0] - points[i].x(), t[1] - points[i].y());
        const double e = weight_at(weights, i) * (t[2] - d);
        s += e * e;
    }
    return s;
}

}  // namespace

double geometric_objective(std::span<const Point2> points, std::span<const double> weights,
                           const Circle2D& circle) {
    if (!weights.empty() && weights.size() != points.size())
        throw InvalidArgument("weights and points differ in length");
    return objective_at(points, weights, {circle.center.x(), circle.center.y(), circle.radius});
}

RefineResult geometric_refine(std::span<const Point2> points, std::span<const double> weights,
                              const Circle2D& init) {
    if (points.size() < 3) throw InvalidArgument("refinement needs at least 3 points");
    if (!weights.empty() && weights.size() != points.size())
        throw InvalidArgument("weights and points differ in length");
    if (!(init.radius > 0.0) || !init.center.allFinite() || !std::isfinite(init.radius))
        throw InvalidArgument("initial circle is invalid");

    Eigen::Vector3d theta(init.center.x(), init.center.y(), init.radius);
    double f = objective_at(points, weights, theta);
    double lambda = 1e-3;
    bool converged = false;
    int it = 0;

    for (; it < kMaxIterations; ++it) {
        Eigen::Matrix3d JtJ = Eigen::Matrix3d::Zero();
        Eigen::Vector3d Jte = Eigen::Vector3d::Zero();
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double w = weight_at(weights, i);
            const Point2 delta = Point2(theta[0], theta[1]) - points[i];
            const double d = delta.norm();
            Eigen::Vector3d row;
            if (d < kCoincident)
                row << 0.0, 0.0, w;
            else
                row << -w * delta.x() / d, -w * delta.y() / d, w;
            const double e = w * (theta[2] - d);
            JtJ.noalias() += row * row.transpose();
            Jte += row * e;
        }

        const double damp = lambda * std::max(JtJ.trace() / 3.0, 1e-300);
        const auto step = linalg::solve_full_pivot<3>(JtJ + damp * Eigen::Matrix3d::Identity(), -Jte, 1e-300);
        if (!step) {
            converged = true;
            break;
        }
        if (step->norm() < 1e-12 * std::max(1.0, theta.norm())) {
            converged = true;
            break;
        }
        const Eigen::Vector3d trial = theta + *step;
        const double ft = objective_at(points, weights, trial);
        if (ft < f) {
            theta = trial;
            f = ft;
            lambda *= 0.1;
        } else {
            lambda *= 10.0;
            if (lambda > 1e16) {
                converged = true;
                break;
            }
        }
    }

    RefineResult out;
    out.circle.center = Point2(theta[0], theta[1]);
    out.circle.radius = std::abs(theta[2]);
    out.diag.eta = 0.0;
    out.diag.objective = objective_at(points, weights, {theta[0], theta[1], out.circle.radius});
    out.diag.condition = converged ? Condition::WellPosed : Condition::NearDegenerate;
    out.iterations = it;
    return out;
}

Circle3D geometric_refine_3d(std::span<const Point3> points, std::span<const double> weights,
                             const Circle3D& init, FitDiagnostics* diag) {
    const auto flat = project_to_plane(points, init.frame);
    const RefineResult r = geometric_refine(flat, weights, init.circle);
    Circle3D out = init;
    out.frame.origin = lift(r.circle.center, init.frame);
    out.circle.center = Point2::Zero();
    out.circle.radius = r.circle.radius;
    if (diag) *diag = r.diag;
    return out;
}

}  // namespace arcfit
