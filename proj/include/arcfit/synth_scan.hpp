#pragma once

#include "arcfit/algebraic_fit.hpp"
#include "arcfit/parallel.hpp"
#include "arcfit/types.hpp"

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace arcfit {

struct CircleSpec {
    Point3 center = Point3::Zero();
    double radius = 1.0;
    Vec3 normal = Vec3::UnitZ();  // must be parallel to the plate normal
    double arc_span = 2.0 * std::numbers::pi;
    double arc_start = 0.0;       // radians, measured from the plate u axis
    double depth = 0.0;           // bore depth (or boss height)
    bool outer_wall = false;      // boss standing on the plate instead of a drilled hole
};

/// A flat plate with circular holes (or bosses), scanned from one direction.
struct SceneSpec {
    std::vector<CircleSpec> circles;
    double plane_extent = 10.0;   // plate half-width
    double sample_spacing = 0.1;
    double noise_sigma_rel = 0.0; // fraction of the bounding-box diagonal
    bool inner_wall = true;
    double view_angle_deg = 90.0; // between plate and scanner direction
    double view_azimuth_deg = 0.0;
    Point3 plane_origin = Point3::Zero();
    Vec3 plane_normal = Vec3::UnitZ();
    std::uint64_t seed = 0;

    /// Throws InvalidSpec. Returns non-fatal warnings.
    std::vector<std::string> validate() const;
};

struct ScanScene {
    PointCloud cloud;                   // labels channel always present
    std::vector<Circle3D> truth;        // as specified, never re-estimated
    std::vector<Point3> gt_curve_samples;
    double noise_sigma = 0.0;           // absolute
    double label_threshold = 0.0;
    std::vector<std::string> warnings;
};

ScanScene generate_scene(const SceneSpec& spec, Exec exec = Exec::Parallel);

/// Labels points closer than `t` (strict) to any curve sample as circle
/// boundary. Default `t` is the cloud's mean nearest-neighbour distance.
ScanScene label_scene(ScanScene scene, std::optional<double> t = std::nullopt, Exec exec = Exec::Parallel);

std::vector<Label> label_points(std::span<const Point3> points, std::span<const Point3> curve, double t,
                                Exec exec = Exec::Parallel);

/// Arc-length spacing of the ground-truth curve samples for a spec.
double curve_sample_spacing(const SceneSpec& spec);

/// Plate with `count` holes on a regular layout, radii cycling through
/// `distinct_radii` values between r_min and 5 r_min.
SceneSpec desk_scene_spec(int count, int distinct_radii, double noise_sigma_rel, std::uint64_t seed);

/// Noise x density variants of a base spec (0.1 / 0.5 / 1.0 % noise, 1 / 1.5 / 2 x spacing).
std::vector<SceneSpec> enhancement_variants(const SceneSpec& base);

}  // namespace arcfit
