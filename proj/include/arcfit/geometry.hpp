#pragma once

#include "arcfit/parallel.hpp"
#include "arcfit/types.hpp"

#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace arcfit {

/// Uniform spatial hash over a fixed point set. Built once, read-only after.
class SpatialIndex {
public:
    SpatialIndex(std::span<const Point3> points, double cell_size);

    /// Indices i with |p_i - center| <= radius, ascending.
    IndexList query(const Point3& center, double radius) const;

    /// Distance to the closest indexed point other than `self` (pass
    /// `npos` to consider all points). Infinity when no such point exists.
    double nearest_distance(const Point3& query, std::size_t self = npos) const;

    double cell_size() const noexcept { return cell_; }
    std::size_t size() const noexcept { return points_.size(); }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    struct Key {
        std::int64_t x, y, z;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };

    Key key_of(const Point3& p) const;
    template <class Fn>
    void for_cells(const Point3& lo, const Point3& hi, Fn&& fn) const;

    std::span<const Point3> points_;
    double cell_;
    std::unordered_map<Key, std::vector<std::uint32_t>, KeyHash> cells_;
    Point3 lo_, hi_;
};

/// Cell size suited to nearest-neighbour work on `points`: the mean spacing of a
/// uniform sample over the two dominant bounding-box extents.
double suggested_cell_size(std::span<const Point3> points);

IndexList ball_query(const PointCloud& cloud, const Point3& center, double radius);

/// Per-point distance to the nearest other point.
std::vector<double> nearest_neighbor_distances(std::span<const Point3> points,
                                               Exec exec = Exec::Parallel);
double average_nn_distance(std::span<const Point3> points, Exec exec = Exec::Parallel);

/// Weighted-PCA plane. Origin is the weighted centroid, the normal is the
/// smallest-eigenvalue eigenvector with its largest-magnitude component made
/// positive, u is the largest-eigenvalue eigenvector and v = normal x u.
/// Empty `weights` means uniform. Throws DegenerateGeometry when the two
/// smallest eigenvalues coincide (within 1e-10 of the largest).
PlaneFrame weighted_pca_plane(std::span<const Point3> points, std::span<const double> weights = {});

std::vector<Point2> project_to_plane(std::span<const Point3> points, const PlaneFrame& frame);
Point2 project_to_plane(const Point3& p, const PlaneFrame& frame);
Point3 lift(const Point2& q, const PlaneFrame& frame);

/// 11x11 occupancy of [-extent, extent]^2; row follows v, column follows u.
/// Points outside the extent land in the border cell.
OccupancyGrid rasterize_grid(std::span<const Point2> points, double extent);

struct AlignedPatches {
    std::vector<Point3> local;
    std::vector<Point3> global;
    Eigen::Matrix3d rotation;  // rows: u, v, normal of the global patch
};

/// Translates both patches so `query` is at the origin and rotates them with
/// the principal axes of the global patch (normal onto +Z).
AlignedPatches align_to_principal_frame(std::span<const Point3> local,
                                        std::span<const Point3> global,
                                        std::span<const double> global_weights = {},
                                        const Point3& query = Point3::Zero());

}  // namespace arcfit
