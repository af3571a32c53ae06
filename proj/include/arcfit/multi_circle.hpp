#pragma once

#include "arcfit/algebraic_fit.hpp"
#include "arcfit/boundary.hpp"
#include "arcfit/parallel.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace arcfit {

struct RansacParams {
    int iterations = 1000;
    double inlier_tol = 0.05;
    int min_inliers = 10;
    int max_circles = 64;
    std::uint64_t seed = 1;
    /// Candidates with a larger circumradius are rejected (5 R_hyper by default in the CLI).
    double max_radius = std::numeric_limits<double>::infinity();
    /// The 2nd and 3rd sample are drawn within this distance of the 1st.
    double sample_radius = std::numeric_limits<double>::infinity();

    void validate() const;
};

struct CircleInstance {
    Circle3D circle;          // refit on all inliers
    IndexList inlier_indices; // ascending, into the cloud
    FitDiagnostics diagnostics;
    Circle3D candidate;       // the winning three-point model
};

/// 2 x the cloud's mean nearest-neighbour distance.
double default_inlier_tol(const PointCloud& cloud);

double point_to_circle3d_distance(const Point3& p, const Circle3D& c);

/// Sequential RANSAC over the detected points. Deterministic for a given seed
/// regardless of the execution driver.
std::vector<CircleInstance> cluster_and_fit(const PointCloud& cloud, const Detection& detection,
                                            const RansacParams& params,
                                            ConstraintKind kind = ConstraintKind::Hyper,
                                            Exec exec = Exec::Parallel);

struct Pairing {
    std::size_t found;
    std::size_t truth;
    double distance;
};

/// Greedy one-to-one matching by ascending center distance, ties broken by
/// (found, truth) index. Pairs farther than `center_tol` stay unmatched.
std::vector<Pairing> match_instances(std::span<const Circle3D> found, std::span<const Circle3D> truth,
                                     double center_tol);

std::vector<Circle3D> circles_of(std::span<const CircleInstance> instances);

}  // namespace arcfit
