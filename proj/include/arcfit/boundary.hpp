#pragma once

#include "arcfit/geometry.hpp"
#include "arcfit/parallel.hpp"
#include "arcfit/random.hpp"
#include "arcfit/types.hpp"

#include <filesystem>
#include <numbers>
#include <span>
#include <vector>

namespace arcfit {

struct BoundaryParams {
    double query_radius = 1.0;
    double angle_gap_threshold = 0.75 * std::numbers::pi;
    int min_neighbors = 5;

    /// Neighbourhood of a quarter of the radius hyper-parameter.
    static BoundaryParams from_r_hyper(double r_hyper);
    void validate() const;
};

struct Detection {
    IndexList indices;
    std::vector<double> probabilities;  // parallel to indices

    std::size_t size() const noexcept { return indices.size(); }
    bool empty() const noexcept { return indices.empty(); }
};

/// Largest angular gap between neighbour directions around each point, as a
/// fraction of a full turn. Sparse points score 1, points whose local plane is
/// degenerate score 0.
std::vector<double> angle_gap_scores(const PointCloud& cloud, const SpatialIndex& index,
                                     const BoundaryParams& params, Exec exec = Exec::Parallel);

/// Flags points whose largest angular gap exceeds the threshold.
Detection detect_boundary_angle_gap(const PointCloud& cloud, const BoundaryParams& params,
                                    Exec exec = Exec::Parallel);

struct ExternalDetectionOptions {
    double threshold = 0.5;
    double epsilon = 1e-4;  // replaces zero weights
};

/// Applies externally produced per-point probabilities: points at or above the
/// threshold are detected, and the probabilities become the cloud's weights.
Detection detection_from_probabilities(PointCloud& cloud, std::span<const double> probabilities,
                                       const ExternalDetectionOptions& options = {});
Detection load_external_detection(PointCloud& cloud, const std::filesystem::path& path,
                                  const ExternalDetectionOptions& options = {});

struct PatchPair {
    PointCloud small;   // radius 3 R
    PointCloud big;     // radius 5 R
    PointCloud local;   // 16 points, radius R / 4
    PointCloud global;  // 128 points, radius 2 R
};

inline constexpr std::size_t kLocalPatchSize = 16;
inline constexpr std::size_t kGlobalPatchSize = 128;

/// Patches around `query`, translated so the query sits at the origin. Local
/// and global patches are padded with the origin (weight 0) or uniformly
/// downsampled to their fixed sizes; real points carry weight 1.
PatchPair extract_patch_pair(const PointCloud& cloud, const Point3& query, double r_hyper, Rng& rng);

/// Query points for patch pairs: every circle center, then up to `count` random cloud points
/// whose distance d to each center satisfies d < 3R or d > 3R + r_j.
std::vector<Point3> select_patch_queries(const PointCloud& cloud, std::span<const Point3> centers,
                                         std::span<const double> radii, double r_hyper,
                                         std::size_t count, Rng& rng);

/// Writes pair_<k>_{small,big,local,global}.xyz into `dir`.
void write_patch_pair(const std::filesystem::path& dir, std::size_t k, const PatchPair& pair);

}  // namespace arcfit
