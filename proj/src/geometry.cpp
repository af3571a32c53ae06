#include "arcfit/geometry.hpp"

#include "arcfit/errors.hpp"
#include "arcfit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace arcfit {

namespace {

void require_finite(const Point3& p, const char* what) {
    if (!p.allFinite()) throw InvalidArgument(std::string(what) + " is not finite");
}

}  // namespace

// SpatialIndex ----------------------------------------------------------------

std::size_t SpatialIndex::KeyHash::operator()(const Key& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<std::uint64_t>(k.y) * 0xc2b2ae3d27d4eb4fULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667b19e3779f9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
}

SpatialIndex::SpatialIndex(std::span<const Point3> points, double cell_size)
    : points_(points), cell_(cell_size) {
    if (!(cell_size > 0.0) || !std::isfinite(cell_size))
        throw InvalidArgument("spatial index cell size must be positive and finite");
    lo_ = Point3::Constant(std::numeric_limits<double>::infinity());
    hi_ = -lo_;
    cells_.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        require_finite(points[i], "point");
        lo_ = lo_.cwiseMin(points[i]);
        hi_ = hi_.cwiseMax(points[i]);
        cells_[key_of(points[i])].push_back(static_cast<std::uint32_t>(i));
    }
}

SpatialIndex::Key SpatialIndex::key_of(const Point3& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x() / cell_)),
            static_cast<std::int64_t>(std::floor(p.y() / cell_)),
            static_cast<std::int64_t>(std::floor(p.z() / cell_))};
}

template <class Fn>
void SpatialIndex::for_cells(const Point3& lo, const Point3& hi, Fn&& fn) const {
    const Key a = key_of(lo.cwiseMax(lo_));
    const Key b = key_of(hi.cwiseMin(hi_));
    for (std::int64_t x = a.x; x <= b.x; ++x)
        for (std::int64_t y = a.y; y <= b.y; ++y)
            for (std::int64_t z = a.z; z <= b.z; ++z) {
                auto it = cells_.find(Key{x, y, z});
                if (it != cells_.end()) fn(it->second);
            }
}

IndexList SpatialIndex::query(const Point3& center, double radius) const {
    require_finite(center, "query center");
    if (!std::isfinite(radius)) throw InvalidArgument("query radius is not finite");
    if (!(radius > 0.0)) throw InvalidArgument("query radius must be positive");

    IndexList out;
    if (points_.empty()) return out;
    const Point3 lo = center - Point3::Constant(radius);
    const Point3 hi = center + Point3::Constant(radius);
    if ((lo.array() > hi_.array()).any() || (hi.array() < lo_.array()).any()) return out;

    const Point3 clo = lo.cwiseMax(lo_), chi = hi.cwiseMin(hi_);
    const Eigen::Array3d span = ((chi - clo) / cell_).array().floor() + 2.0;
    if (span.prod() > static_cast<double>(points_.size())) {
        for (std::size_t i = 0; i < points_.size(); ++i)
            if ((points_[i] - center).norm() <= radius) out.push_back(i);
        return out;
    }
    for_cells(lo, hi, [&](const std::vector<std::uint32_t>& bucket) {
        for (std::uint32_t i : bucket)
            if ((points_[i] - center).norm() <= radius) out.push_back(i);
    });
    std::sort(out.begin(), out.end());
    return out;
}

double SpatialIndex::nearest_distance(const Point3& q, std::size_t self) const {
    const double inf = std::numeric_limits<double>::infinity();
    if (points_.empty()) return inf;
    const double reach = (q - lo_).cwiseAbs().cwiseMax((q - hi_).cwiseAbs()).norm();
    double radius = cell_;
    while (true) {
        double best = inf;
        for (std::size_t j : query(q, radius))
            if (j != self) best = std::min(best, (points_[j] - q).norm());
        if (best <= radius || radius > reach) return best;
        radius *= 2.0;
    }
}

double suggested_cell_size(std::span<const Point3> points) {
    if (points.size() < 2) return 1.0;
    Point3 lo = points[0], hi = points[0];
    for (const auto& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    Eigen::Vector3d ext = hi - lo;
    std::sort(ext.data(), ext.data() + 3);
    double area = ext[1] * ext[2];
    double cell = area > 0.0 ? std::sqrt(area / static_cast<double>(points.size()))
                             : ext[2] / static_cast<double>(points.size());
    if (!(cell > 0.0)) cell = 1.0;
    return cell;
}

IndexList ball_query(const PointCloud& cloud, const Point3& center, double radius) {
    require_finite(center, "query center");
    if (!std::isfinite(radius)) throw InvalidArgument("query radius is not finite");
    if (!(radius > 0.0)) throw InvalidArgument("query radius must be positive");
    SpatialIndex index(cloud.points, radius);
    return index.query(center, radius);
}

std::vector<double> nearest_neighbor_distances(std::span<const Point3> points, Exec exec) {
    std::vector<double> out(points.size(), std::numeric_limits<double>::infinity());
    if (points.size() < 2) return out;
    const SpatialIndex index(points, suggested_cell_size(points));
    const auto n = static_cast<std::ptrdiff_t>(points.size());
    if (exec == Exec::Serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = index.nearest_distance(points[i], i);
    } else {
#pragma omp parallel for schedule(dynamic, 256)
        for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = index.nearest_distance(points[i], i);
    }
    return out;
}

double average_nn_distance(std::span<const Point3> points, Exec exec) {
    if (points.size() < 2) return 0.0;
    const auto d = nearest_neighbor_distances(points, exec);
    double s = 0.0;
    for (double v : d) s += v;
    return s / static_cast<double>(d.size());
}

// Planes ----------------------------------------------------------------------

PlaneFrame weighted_pca_plane(std::span<const Point3> points, std::span<const double> weights) {
    if (points.size() < 3) throw InvalidArgument("weighted PCA needs at least 3 points");
    if (!weights.empty() && weights.size() != points.size())
        throw InvalidArgument("weights and points differ in length");

    double sw = 0.0;
    Point3 centroid = Point3::Zero();
    for (std::size_t i = 0; i < points.size(); ++i) {
        require_finite(points[i], "point");
        const double w = weights.empty() ? 1.0 : weights[i];
        if (!std::isfinite(w) || w < 0.0) throw InvalidArgument("weights must be finite and nonnegative");
        sw += w;
        centroid += w * points[i];
    }
    if (!(sw > 0.0)) throw InvalidArgument("weights sum to zero");
    centroid /= sw;

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        if (w == 0.0) continue;
        const Vec3 d = points[i] - centroid;
        cov.noalias() += (w / sw) * d * d.transpose();
    }

    const auto eig = linalg::symmetric_eigen<3>(cov);
    const double top = eig.values[2];
    if (!(top > 0.0) || eig.values[1] - eig.values[0] <= 1e-10 * top)
        throw DegenerateGeometry("weighted covariance is rank deficient");

    PlaneFrame f;
    f.origin = centroid;
    f.normal = eig.vectors.col(0).normalized();
    Eigen::Index k;
    f.normal.cwiseAbs().maxCoeff(&k);
    if (f.normal[k] < 0.0) f.normal = -f.normal;
    f.u_axis = eig.vectors.col(2);
    f.u_axis = (f.u_axis - f.u_axis.dot(f.normal) * f.normal).normalized();
    f.v_axis = f.normal.cross(f.u_axis);
    return f;
}

Point2 project_to_plane(const Point3& p, const PlaneFrame& frame) {
    require_finite(p, "point");
    const Vec3 d = p - frame.origin;
    return {d.dot(frame.u_axis), d.dot(frame.v_axis)};
}

std::vector<Point2> project_to_plane(std::span<const Point3> points, const PlaneFrame& frame) {
    std::vector<Point2> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(project_to_plane(p, frame));
    return out;
}

Point3 lift(const Point2& q, const PlaneFrame& frame) {
    return frame.origin + q.x() * frame.u_axis + q.y() * frame.v_axis;
}

OccupancyGrid rasterize_grid(std::span<const Point2> points, double extent) {
    if (!(extent > 0.0) || !std::isfinite(extent)) throw InvalidArgument("grid extent must be positive");
    OccupancyGrid g;
    g.extent = extent;
    constexpr int n = OccupancyGrid::kSize;
    const double cell = 2.0 * extent / n;
    auto bin = [&](double t) {
        const double c = std::floor((t + extent) / cell);
        return static_cast<int>(std::clamp(c, 0.0, static_cast<double>(n - 1)));
    };
    for (const auto& p : points) {
        if (!p.allFinite()) throw InvalidArgument("grid point is not finite");
        g.cells[bin(p.y())][bin(p.x())] = 1;
    }
    return g;
}

AlignedPatches align_to_principal_frame(std::span<const Point3> local, std::span<const Point3> global,
                                        std::span<const double> global_weights, const Point3& query) {
    const PlaneFrame f = weighted_pca_plane(global, global_weights);
    AlignedPatches out;
    out.rotation.row(0) = f.u_axis.transpose();
    out.rotation.row(1) = f.v_axis.transpose();
    out.rotation.row(2) = f.normal.transpose();
    out.local.reserve(local.size());
    out.global.reserve(global.size());
    for (const auto& p : local) out.local.push_back(out.rotation * (p - query));
    for (const auto& p : global) out.global.push_back(out.rotation * (p - query));
    return out;
}

}  // namespace arcfit
