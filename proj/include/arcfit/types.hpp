#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace arcfit {

using Point3 = Eigen::Vector3d;
using Point2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using IndexList = std::vector<std::size_t>;

enum class Label : std::uint8_t { NonCircle = 0, CircleBoundary = 1 };

/// Ordered points with optional per-point weight and label channels.
struct PointCloud {
    std::vector<Point3> points;
    std::optional<std::vector<double>> weights;
    std::optional<std::vector<Label>> labels;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }

    /// Throws InvalidArgument when a channel length or value is inconsistent.
    void validate() const;

    /// Copy of the selected points; channels follow the selection.
    PointCloud subset(const IndexList& indices) const;
};

/// Plane with a right-handed orthonormal in-plane basis: u x v = normal.
struct PlaneFrame {
    Point3 origin = Point3::Zero();
    Vec3 normal = Vec3::UnitZ();
    Vec3 u_axis = Vec3::UnitX();
    Vec3 v_axis = Vec3::UnitY();

    static PlaneFrame canonical() { return {}; }

    /// Frame through `origin` with the given normal and a deterministic in-plane basis.
    static PlaneFrame from_normal(const Point3& origin, const Vec3& normal);

    bool is_orthonormal(double tol = 1e-12) const;
};

struct OccupancyGrid {
    static constexpr int kSize = 11;

    std::array<std::array<std::uint8_t, kSize>, kSize> cells{};
    double extent = 1.0;

    int occupied() const;
    bool operator==(const OccupancyGrid&) const = default;
};

}  // namespace arcfit
