#include "arcfit/types.hpp"

#include "arcfit/errors.hpp"

#include <cmath>
#include <string>

namespace arcfit {

void PointCloud::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i)
        if (!points[i].allFinite())
            throw InvalidArgument("point " + std::to_string(i) + " is not finite");
    if (weights) {
        if (weights->size() != points.size())
            throw InvalidArgument("weight channel has " + std::to_string(weights->size()) +
                                  " entries for " + std::to_string(points.size()) + " points");
        for (double w : *weights)
            if (!std::isfinite(w) || w < 0.0)
                throw InvalidArgument("weights must be finite and nonnegative");
    }
    if (labels && labels->size() != points.size())
        throw InvalidArgument("label channel has " + std::to_string(labels->size()) +
                              " entries for " + std::to_string(points.size()) + " points");
}

PointCloud PointCloud::subset(const IndexList& indices) const {
    PointCloud out;
    out.points.reserve(indices.size());
    if (weights) out.weights.emplace().reserve(indices.size());
    if (labels) out.labels.emplace().reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= points.size()) throw InvalidArgument("subset index out of range");
        out.points.push_back(points[i]);
        if (weights) out.weights->push_back((*weights)[i]);
        if (labels) out.labels->push_back((*labels)[i]);
    }
    return out;
}

PlaneFrame PlaneFrame::from_normal(const Point3& origin, const Vec3& normal) {
    const double len = normal.norm();
    if (!(len > 0.0) || !std::isfinite(len)) throw InvalidArgument("plane normal must be nonzero");
    PlaneFrame f;
    f.origin = origin;
    f.normal = normal / len;
    // Seed axis: the coordinate axis least aligned with the normal.
    Eigen::Index k;
    f.normal.cwiseAbs().minCoeff(&k);
    Vec3 seed = Vec3::Unit(k);
    f.u_axis = (seed - seed.dot(f.normal) * f.normal).normalized();
    f.v_axis = f.normal.cross(f.u_axis);
    return f;
}

bool PlaneFrame::is_orthonormal(double tol) const {
    return std::abs(normal.norm() - 1.0) <= tol && std::abs(u_axis.norm() - 1.0) <= tol &&
           std::abs(v_axis.norm() - 1.0) <= tol && std::abs(u_axis.dot(v_axis)) <= tol &&
           std::abs(u_axis.dot(normal)) <= tol && std::abs(v_axis.dot(normal)) <= tol &&
           (u_axis.cross(v_axis) - normal).cwiseAbs().maxCoeff() <= 10 * tol;
}

int OccupancyGrid::occupied() const {
    int n = 0;
    for (const auto& row : cells)
        for (auto c : row) n += c;
    return n;
}

}  // namespace arcfit
