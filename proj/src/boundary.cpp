#include "arcfit/boundary.hpp"

#include "arcfit/errors.hpp"
#include "arcfit/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

namespace arcfit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double gap_score(const PointCloud& cloud, const SpatialIndex& index, const BoundaryParams& params,
                 std::size_t i) {
    const Point3& p = cloud.points[i];
    const IndexList nbrs = index.query(p, params.query_radius);
    if (nbrs.size() - 1 < static_cast<std::size_t>(params.min_neighbors)) return 1.0;

    std::vector<Point3> patch;
    patch.reserve(nbrs.size());
    for (std::size_t j : nbrs) patch.push_back(cloud.points[j]);
    PlaneFrame frame;
    try {
        frame = weighted_pca_plane(patch);
    } catch (const DegenerateGeometry&) {
        return 0.0;
    }

    std::vector<double> angles;
    angles.reserve(nbrs.size());
    const double eps = 1e-12 * params.query_radius;
    for (std::size_t j : nbrs) {
        if (j == i) continue;
        const Vec3 d = cloud.points[j] - p;
        const double u = d.dot(frame.u_axis), v = d.dot(frame.v_axis);
        if (std::hypot(u, v) <= eps) continue;
        angles.push_back(std::atan2(v, u));
    }
    if (angles.size() < 2) return 1.0;
    std::sort(angles.begin(), angles.end());
    double gap = angles.front() + kTwoPi - angles.back();
    for (std::size_t k = 1; k < angles.size(); ++k) gap = std::max(gap, angles[k] - angles[k - 1]);
    return std::clamp(gap / kTwoPi, 0.0, 1.0);
}

PointCloud centered(const PointCloud& cloud, const IndexList& idx, const Point3& query) {
    PointCloud out;
    out.points.reserve(idx.size());
    for (std::size_t i : idx) out.points.push_back(cloud.points[i] - query);
    out.weights = std::vector<double>(idx.size(), 1.0);
    return out;
}

PointCloud fixed_size(const PointCloud& cloud, IndexList idx, const Point3& query, std::size_t size,
                      Rng& rng) {
    if (idx.size() > size) {
        for (std::size_t k = 0; k < size; ++k) {
            const std::size_t pick = k + static_cast<std::size_t>(rng.below(idx.size() - k));
            std::swap(idx[k], idx[pick]);
        }
        idx.resize(size);
        std::sort(idx.begin(), idx.end());
    }
    PointCloud out = centered(cloud, idx, query);
    while (out.points.size() < size) {
        out.points.push_back(Point3::Zero());
        out.weights->push_back(0.0);
    }
    return out;
}

}  // namespace

BoundaryParams BoundaryParams::from_r_hyper(double r_hyper) {
    if (!(r_hyper > 0.0)) throw InvalidArgument("r_hyper must be positive");
    BoundaryParams p;
    p.query_radius = 0.25 * r_hyper;
    return p;
}

void BoundaryParams::validate() const {
    if (!(query_radius > 0.0) || !std::isfinite(query_radius))
        throw InvalidArgument("boundary query_radius must be positive");
    if (!(angle_gap_threshold > 0.0 && angle_gap_threshold < kTwoPi))
        throw InvalidArgument("angle_gap_threshold must lie in (0, 2pi)");
    if (min_neighbors < 3) throw InvalidArgument("min_neighbors must be at least 3");
}

std::vector<double> angle_gap_scores(const PointCloud& cloud, const SpatialIndex& index,
                                     const BoundaryParams& params, Exec exec) {
    params.validate();
    std::vector<double> score(cloud.size(), 0.0);
    const auto n = static_cast<std::ptrdiff_t>(cloud.size());
    if (exec == Exec::Serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) score[i] = gap_score(cloud, index, params, i);
    } else {
#pragma omp parallel for schedule(dynamic, 128)
        for (std::ptrdiff_t i = 0; i < n; ++i) score[i] = gap_score(cloud, index, params, i);
    }
    return score;
}

Detection detect_boundary_angle_gap(const PointCloud& cloud, const BoundaryParams& params, Exec exec) {
    params.validate();
    if (cloud.empty()) throw InvalidArgument("boundary detection needs a nonempty cloud");
    const SpatialIndex index(cloud.points, params.query_radius);
    const auto score = angle_gap_scores(cloud, index, params, exec);
    const double cut = params.angle_gap_threshold / kTwoPi;
    Detection d;
    for (std::size_t i = 0; i < score.size(); ++i)
        if (score[i] > cut) {
            d.indices.push_back(i);
            d.probabilities.push_back(score[i]);
        }
    return d;
}

Detection detection_from_probabilities(PointCloud& cloud, std::span<const double> probabilities,
                                       const ExternalDetectionOptions& options) {
    if (probabilities.size() != cloud.size())
        throw FormatError("detection file has " + std::to_string(probabilities.size()) +
                          " values for a cloud of " + std::to_string(cloud.size()) + " points");
    std::vector<double> weights(cloud.size());
    Detection d;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const double p = probabilities[i];
        if (!std::isfinite(p) || p < 0.0)
            throw FormatError("detection value " + std::to_string(i) + " is negative or not finite");
        weights[i] = p > 0.0 ? p : options.epsilon;
        if (p >= options.threshold) {
            d.indices.push_back(i);
            d.probabilities.push_back(std::min(p, 1.0));
        }
    }
    cloud.weights = std::move(weights);
    return d;
}

Detection load_external_detection(PointCloud& cloud, const std::filesystem::path& path,
                                  const ExternalDetectionOptions& options) {
    const auto values = io::read_weights(path);
    return detection_from_probabilities(cloud, values, options);
}

PatchPair extract_patch_pair(const PointCloud& cloud, const Point3& query, double r_hyper, Rng& rng) {
    if (!(r_hyper > 0.0) || !std::isfinite(r_hyper)) throw InvalidArgument("r_hyper must be positive");
    if (!query.allFinite()) throw InvalidArgument("query is not finite");
    PatchPair out;
    if (cloud.empty()) {
        out.local = fixed_size(cloud, {}, query, kLocalPatchSize, rng);
        out.global = fixed_size(cloud, {}, query, kGlobalPatchSize, rng);
        out.small.weights.emplace();
        out.big.weights.emplace();
        return out;
    }
    const SpatialIndex index(cloud.points, r_hyper);
    out.small = centered(cloud, index.query(query, 3.0 * r_hyper), query);
    out.big = centered(cloud, index.query(query, 5.0 * r_hyper), query);
    out.local = fixed_size(cloud, index.query(query, 0.25 * r_hyper), query, kLocalPatchSize, rng);
    out.global = fixed_size(cloud, index.query(query, 2.0 * r_hyper), query, kGlobalPatchSize, rng);
    return out;
}

std::vector<Point3> select_patch_queries(const PointCloud& cloud, std::span<const Point3> centers,
                                         std::span<const double> radii, double r_hyper, std::size_t count,
                                         Rng& rng) {
    if (centers.size() != radii.size()) throw InvalidArgument("centers and radii differ in length");
    std::vector<Point3> out(centers.begin(), centers.end());
    if (cloud.empty()) return out;
    const std::size_t budget = 100 * std::max<std::size_t>(count, 1);
    for (std::size_t attempt = 0; out.size() < centers.size() + count && attempt < budget; ++attempt) {
        const Point3& q = cloud.points[rng.below(cloud.size())];
        bool ok = true;
        for (std::size_t j = 0; j < centers.size() && ok; ++j) {
            const double d = (q - centers[j]).norm();
            ok = d < 3.0 * r_hyper || d > 3.0 * r_hyper + radii[j];
        }
        if (ok) out.push_back(q);
    }
    return out;
}

void write_patch_pair(const std::filesystem::path& dir, std::size_t k, const PatchPair& pair) {
    std::filesystem::create_directories(dir);
    auto emit = [&](const char* name, const PointCloud& c) {
        const auto path = dir / ("pair_" + std::to_string(k) + "_" + name + ".xyz");
        std::ofstream f(path);
        if (!f) throw Error("cannot write " + path.string());
        io::write_xyz(f, c);
    };
    emit("small", pair.small);
    emit("big", pair.big);
    emit("local", pair.local);
    emit("global", pair.global);
}

}  // namespace arcfit
