#pragma once

#include "arcfit/types.hpp"

#include <Eigen/Core>

#include <span>
#include <string_view>

namespace arcfit {

enum class ConstraintKind { Hyper, Pratt, Taubin, Kasa };

std::string_view to_string(ConstraintKind kind);
/// Accepts "hyper", "pratt", "taubin", "kasa" (also "lls" for kasa).
ConstraintKind parse_constraint(std::string_view name);

/// Coefficients of A(x^2+y^2) + Bx + Cy + D = 0.
struct AlgebraicCircle {
    double A = 0.0, B = 0.0, C = 0.0, D = 0.0;

    Eigen::Vector4d vec() const { return {A, B, C, D}; }
    static AlgebraicCircle from(const Eigen::Vector4d& k) { return {k[0], k[1], k[2], k[3]}; }
};

struct Circle2D {
    Point2 center = Point2::Zero();
    double radius = 0.0;
};

/// Circle in space. The frame origin is the circle center.
struct Circle3D {
    PlaneFrame frame;
    Circle2D circle;

    Point3 center() const;
    const Vec3& normal() const { return frame.normal; }
    double radius() const { return circle.radius; }

    static Circle3D make(const Point3& center, const Vec3& normal, double radius);
};

enum class Condition { WellPosed, NearDegenerate };

struct FitDiagnostics {
    double eta = 0.0;        // generalized eigenvalue of the chosen solution
    double objective = 0.0;  // K^T M K at the solution
    Condition condition = Condition::WellPosed;
};

struct FitOptions {
    /// Rescale weights so they sum to one before assembling M and H.
    bool normalize_weights = true;
};

struct DesignMatrices {
    Eigen::Matrix4d M;
    Eigen::Matrix4d H;
};

/// M = (1/n) Z^T W^T W Z with rows z_i = (x^2+y^2, x, y, 1); H is the
/// constraint matrix of `kind`. Empty `weights` means uniform.
DesignMatrices build_design_matrices(std::span<const Point2> points,
                                     std::span<const double> weights = {},
                                     ConstraintKind kind = ConstraintKind::Hyper,
                                     const FitOptions& options = {});

/// Constraint matrix built from weighted moments (sum w, sum wx, sum wy, sum w(x^2+y^2)).
Eigen::Matrix4d constraint_matrix(ConstraintKind kind, double sw, double sx, double sy, double sz);

struct ConstrainedSolution {
    AlgebraicCircle params;
    FitDiagnostics diag;
};

/// Generalized eigenpair of M K = eta H K with the smallest positive eta,
/// scaled so K^T H K = 1 and A > 0.
ConstrainedSolution solve_constrained(const Eigen::Matrix4d& M, const Eigen::Matrix4d& H);

Circle2D algebraic_to_geometric(const AlgebraicCircle& k);

/// Weighted algebraic residual sum (1/n) sum w_i^2 (K . z_i)^2 with the same
/// weight handling as build_design_matrices.
double algebraic_objective(std::span<const Point2> points, std::span<const double> weights,
                           const AlgebraicCircle& k, const FitOptions& options = {});

struct Fit2D {
    Circle2D circle;
    AlgebraicCircle params;  // in the caller's coordinates, K^T H K = 1
    FitDiagnostics diag;
};

Fit2D fit_circle_2d(std::span<const Point2> points, std::span<const double> weights = {},
                    ConstraintKind kind = ConstraintKind::Hyper, const FitOptions& options = {});

struct Fit3D {
    Circle3D circle;
    FitDiagnostics diag;
};

/// Weighted-PCA plane of the selected points, then the planar fit, lifted back.
/// Uses the cloud's weight channel when present.
Fit3D fit_circle_3d(const PointCloud& cloud, const IndexList& indices,
                    ConstraintKind kind = ConstraintKind::Hyper, const FitOptions& options = {});
Fit3D fit_circle_3d(std::span<const Point3> points, std::span<const double> weights,
                    ConstraintKind kind = ConstraintKind::Hyper, const FitOptions& options = {});

// Geometric refinement --------------------------------------------------------

/// sum (w_i |r - |c - p_i||)^2
double geometric_objective(std::span<const Point2> points, std::span<const double> weights,
                           const Circle2D& circle);

struct RefineResult {
    Circle2D circle;
    FitDiagnostics diag;  // objective is the geometric objective; eta is unused (0)
    int iterations = 0;
};

/// Damped Gauss-Newton (Levenberg) on (cx, cy, r). Never returns a circle with a
/// larger geometric objective than `init`.
RefineResult geometric_refine(std::span<const Point2> points, std::span<const double> weights,
                              const Circle2D& init);

/// Refines a 3D circle in its own plane against the given points.
Circle3D geometric_refine_3d(std::span<const Point3> points, std::span<const double> weights,
                             const Circle3D& init, FitDiagnostics* diag = nullptr);

}  // namespace arcfit
