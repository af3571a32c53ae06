#include "arcfit/synth_scan.hpp"

#include "arcfit/errors.hpp"
#include "arcfit/geometry.hpp"
#include "arcfit/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace arcfit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct LocalCircle {
    double x, y, r;
    double start, span, depth;
    double notch;  // width of the removed band outside a partial arc
    bool boss;
};

bool full_turn(double span) { return span >= kTwoPi; }

bool in_arc(double angle, const LocalCircle& c) {
    if (full_turn(c.span)) return true;
    double rel = std::fmod(angle - c.start, kTwoPi);
    if (rel < 0.0) rel += kTwoPi;
    return rel <= c.span;
}

std::vector<LocalCircle> local_circles(const SceneSpec& spec, const PlaneFrame& plate) {
    std::vector<LocalCircle> out;
    for (const auto& c : spec.circles) {
        const Point2 q = project_to_plane(c.center, plate);
        out.push_back({q.x(), q.y(), c.radius, c.arc_start, std::min(c.arc_span, kTwoPi), c.depth,
                       full_turn(c.arc_span) ? 0.0 : c.radius, c.outer_wall});
    }
    return out;
}

Vec3 view_direction(const SceneSpec& spec) {
    const double a = spec.view_angle_deg * std::numbers::pi / 180.0;
    const double b = spec.view_azimuth_deg * std::numbers::pi / 180.0;
    return {std::cos(a) * std::cos(b), std::cos(a) * std::sin(b), std::sin(a)};
}

void add_walls(const SceneSpec& spec, const LocalCircle& c, const Vec3& view, Rng& rng,
               std::vector<Point3>& out) {
    const double s = spec.sample_spacing;
    const int rings = static_cast<int>(std::floor(c.depth / s + 1e-9));
    const int per_ring = std::max(8, static_cast<int>(std::ceil(kTwoPi * c.r / s)));
    const double step = kTwoPi / per_ring;
    for (int k = 0; k <= rings; ++k) {
        const double z = c.boss ? k * s : -k * s;
        const double phase = rng.uniform() * step;
        for (int m = 0; m < per_ring; ++m) {
            const double theta = c.start + phase + m * step;
            if (!in_arc(theta, c)) continue;
            const double ct = std::cos(theta), st = std::sin(theta);
            const Point3 p(c.x + c.r * ct, c.y + c.r * st, z);
            const double facing = c.boss ? (ct * view.x() + st * view.y()) : -(ct * view.x() + st * view.y());
            if (facing < -1e-12) continue;
            if (!c.boss && z < 0.0) {
                // The ray towards the scanner must leave through the aperture.
                const double t = -z / view.z();
                const double qx = p.x() + t * view.x() - c.x, qy = p.y() + t * view.y() - c.y;
                if (std::hypot(qx, qy) > c.r * (1.0 + 1e-9)) continue;
            }
            out.push_back(p);
        }
    }
    if (c.boss && c.depth > 0.0) {
        for (double y = c.y - c.r; y <= c.y + c.r; y += s)
            for (double x = c.x - c.r; x <= c.x + c.r; x += s) {
                const double jx = rng.uniform(-0.25, 0.25) * s, jy = rng.uniform(-0.25, 0.25) * s;
                if (std::hypot(x + jx - c.x, y + jy - c.y) < c.r) out.emplace_back(x + jx, y + jy, c.depth);
            }
    }
}

}  // namespace

std::vector<std::string> SceneSpec::validate() const {
    auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!finite_pos(plane_extent)) throw InvalidSpec("plane_extent must be positive");
    if (!finite_pos(sample_spacing)) throw InvalidSpec("sample_spacing must be positive");
    if (!std::isfinite(noise_sigma_rel) || noise_sigma_rel < 0.0) throw InvalidSpec("noise_sigma_rel must be >= 0");
    if (!(view_angle_deg > 0.0 && view_angle_deg <= 90.0)) throw InvalidSpec("view_angle_deg must lie in (0, 90]");
    if (!plane_origin.allFinite() || !plane_normal.allFinite() || !(plane_normal.norm() > 0.0))
        throw InvalidSpec("plane origin/normal must be finite and the normal nonzero");
    if (2.0 * plane_extent / sample_spacing > 1e5) throw InvalidSpec("sample_spacing is too fine for the plate");

    const PlaneFrame plate = PlaneFrame::from_normal(plane_origin, plane_normal);
    for (std::size_t i = 0; i < circles.size(); ++i) {
        const auto& c = circles[i];
        const std::string tag = "circle " + std::to_string(i) + ": ";
        if (!finite_pos(c.radius)) throw InvalidSpec(tag + "radius must be positive");
        if (!(c.arc_span > 0.0 && c.arc_span <= kTwoPi + 1e-12)) throw InvalidSpec(tag + "arc_span must lie in (0, 2pi]");
        if (!std::isfinite(c.depth) || c.depth < 0.0) throw InvalidSpec(tag + "depth must be >= 0");
        if (!c.center.allFinite() || !std::isfinite(c.arc_start)) throw InvalidSpec(tag + "center is not finite");
        if (!(c.normal.norm() > 0.0) || std::abs(c.normal.normalized().dot(plate.normal)) < 1.0 - 1e-9)
            throw InvalidSpec(tag + "normal must be parallel to the plate normal");
        if (std::abs((c.center - plate.origin).dot(plate.normal)) > 1e-9 * (1.0 + plane_extent))
            throw InvalidSpec(tag + "center must lie on the plate");
    }
    const auto local = local_circles(*this, plate);
    for (std::size_t i = 0; i < local.size(); ++i) {
        const auto& a = local[i];
        const double reach = a.r + a.notch;
        if (std::abs(a.x) + reach > plane_extent || std::abs(a.y) + reach > plane_extent)
            throw InvalidSpec("circle " + std::to_string(i) + " crosses the plate boundary");
        for (std::size_t j = i + 1; j < local.size(); ++j) {
            const auto& b = local[j];
            if (std::hypot(a.x - b.x, a.y - b.y) < reach + b.r + b.notch)
                throw InvalidSpec("circles " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
        }
    }

    std::vector<std::string> warnings;
    if (!circles.empty()) {
        auto [lo, hi] = std::minmax_element(circles.begin(), circles.end(),
                                            [](const auto& a, const auto& b) { return a.radius < b.radius; });
        if (hi->radius > 5.0 * lo->radius) warnings.push_back("largest radius exceeds five times the smallest");
    }
    return warnings;
}

double curve_sample_spacing(const SceneSpec& spec) { return spec.sample_spacing / 10.0; }

ScanScene generate_scene(const SceneSpec& spec, Exec exec) {
    ScanScene scene;
    scene.warnings = spec.validate();
    const PlaneFrame plate = PlaneFrame::from_normal(spec.plane_origin, spec.plane_normal);
    const auto circles = local_circles(spec, plate);
    const Vec3 view = view_direction(spec);
    Rng rng(spec.seed);

    std::vector<Point3> local;
    const double s = spec.sample_spacing, e = spec.plane_extent;
    const int steps = static_cast<int>(std::floor(2.0 * e / s + 1e-9));
    local.reserve(static_cast<std::size_t>(steps + 1) * (steps + 1));
    for (int iy = 0; iy <= steps; ++iy) {
        for (int ix = 0; ix <= steps; ++ix) {
            const double jx = rng.uniform(-0.25, 0.25) * s, jy = rng.uniform(-0.25, 0.25) * s;
            const double x = std::clamp(-e + ix * s + jx, -e, e), y = std::clamp(-e + iy * s + jy, -e, e);
            bool keep = true;
            for (const auto& c : circles) {
                const double rho = std::hypot(x - c.x, y - c.y);
                if (rho < c.r || (rho < c.r + c.notch && !in_arc(std::atan2(y - c.y, x - c.x), c))) {
                    keep = false;
                    break;
                }
            }
            if (keep) local.emplace_back(x, y, 0.0);
        }
    }
    for (const auto& c : circles)
        if (c.boss || spec.inner_wall) add_walls(spec, c, view, rng, local);

    auto to_world = [&](const Point3& q) { return lift(q.head<2>(), plate) + q.z() * plate.normal; };
    scene.cloud.points.reserve(local.size());
    for (const auto& q : local) scene.cloud.points.push_back(to_world(q));

    const double g = curve_sample_spacing(spec);
    for (const auto& c : circles) {
        const bool full = full_turn(c.span);
        const int count = std::max(3, static_cast<int>(std::ceil(c.span * c.r / g)) + (full ? 0 : 1));
        const double step = full ? c.span / count : c.span / (count - 1);
        for (int k = 0; k < count; ++k) {
            const double t = c.start + k * step;
            scene.gt_curve_samples.push_back(to_world({c.x + c.r * std::cos(t), c.y + c.r * std::sin(t), 0.0}));
        }
    }
    for (std::size_t i = 0; i < spec.circles.size(); ++i) {
        Circle3D t;
        t.frame = plate;
        t.frame.origin = spec.circles[i].center;
        t.circle.radius = spec.circles[i].radius;
        scene.truth.push_back(t);
    }

    if (!scene.cloud.points.empty()) {
        Point3 lo = scene.cloud.points[0], hi = lo;
        for (const auto& p : scene.cloud.points) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        scene.noise_sigma = spec.noise_sigma_rel * (hi - lo).norm();
        if (scene.noise_sigma > 0.0)
            for (auto& p : scene.cloud.points)
                for (int k = 0; k < 3; ++k) p[k] += scene.noise_sigma * rng.normal();
    }
    if (scene.gt_curve_samples.empty()) {
        scene.label_threshold = average_nn_distance(scene.cloud.points, exec);
        scene.cloud.labels = std::vector<Label>(scene.cloud.size(), Label::NonCircle);
        return scene;
    }
    return label_scene(std::move(scene), std::nullopt, exec);
}

std::vector<Label> label_points(std::span<const Point3> points, std::span<const Point3> curve, double t,
                                Exec exec) {
    if (!std::isfinite(t) || t < 0.0) throw InvalidArgument("label threshold must be finite and >= 0");
    std::vector<Label> out(points.size(), Label::NonCircle);
    if (t == 0.0 || curve.empty()) return out;
    const SpatialIndex index(curve, t);
    auto label_one = [&](std::size_t i) {
        for (std::size_t j : index.query(points[i], t))
            if ((points[i] - curve[j]).norm() < t) return Label::CircleBoundary;
        return Label::NonCircle;
    };
    const auto n = static_cast<std::ptrdiff_t>(points.size());
    if (exec == Exec::Serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = label_one(i);
    } else {
#pragma omp parallel for schedule(dynamic, 512)
        for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = label_one(i);
    }
    return out;
}

ScanScene label_scene(ScanScene scene, std::optional<double> t, Exec exec) {
    if (scene.gt_curve_samples.empty()) throw InvalidArgument("scene has no ground-truth curve samples");
    const double thr = t ? *t : average_nn_distance(scene.cloud.points, exec);
    scene.label_threshold = thr;
    scene.cloud.labels = label_points(scene.cloud.points, scene.gt_curve_samples, thr, exec);
    return scene;
}

SceneSpec desk_scene_spec(int count, int distinct_radii, double noise_sigma_rel, std::uint64_t seed) {
    if (count < 1 || distinct_radii < 1) throw InvalidSpec("desk scene needs at least one circle and radius");
    SceneSpec spec;
    spec.seed = seed;
    spec.noise_sigma_rel = noise_sigma_rel;
    spec.sample_spacing = 0.5;
    spec.inner_wall = true;
    const double r_min = 2.0, r_max = 5.0 * r_min;
    const double pitch = 2.0 * r_max + 10.0;
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
    const int rows = (count + cols - 1) / cols;
    spec.plane_extent = 0.5 * pitch * std::max(cols, rows);
    for (int k = 0; k < count; ++k) {
        const int ri = k % distinct_radii;
        const double r = distinct_radii == 1 ? r_min : r_min + (r_max - r_min) * ri / (distinct_radii - 1);
        CircleSpec c;
        const int col = k % cols, row = k / cols;
        c.center = Point3(-spec.plane_extent + pitch * (col + 0.5), -spec.plane_extent + pitch * (row + 0.5), 0.0);
        c.radius = r;
        c.depth = r;
        spec.circles.push_back(c);
    }
    return spec;
}

std::vector<SceneSpec> enhancement_variants(const SceneSpec& base) {
    std::vector<SceneSpec> out;
    for (double noise : {0.001, 0.005, 0.01})
        for (double density : {1.0, 1.5, 2.0}) {
            SceneSpec s = base;
            s.noise_sigma_rel = noise;
            s.sample_spacing = base.sample_spacing * density;
            out.push_back(s);
        }
    return out;
}

}  // namespace arcfit
