#pragma once

#include "arcfit/boundary.hpp"
#include "arcfit/metrics.hpp"
#include "arcfit/multi_circle.hpp"
#include "arcfit/serialize.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace arcfit {

struct PipelineConfig {
    double r_hyper = 1.0;
    ConstraintKind constraint = ConstraintKind::Hyper;
    RansacParams ransac;
    std::optional<double> inlier_tol;  // unset: 2 x mean nearest-neighbour distance
    BoundaryParams boundary;
    ExternalDetectionOptions external;
    bool refine = false;
    std::uint64_t seed = 1;

    /// Boundary radius R/4, local sampling within 2R, candidates up to 5R.
    static PipelineConfig from_r_hyper(double r_hyper);
    void validate() const;
};

Json config_json(const PipelineConfig& config);
/// Missing keys fall back to from_r_hyper of the given (or default) r_hyper.
PipelineConfig config_from_json(const Json& j);

struct ExtractResult {
    std::vector<CircleInstance> instances;
    Detection detection;
    bool external_detection = false;
    double inlier_tol = 0.0;
};

/// Detection (angle-gap, or the given per-point probabilities), sequential
/// RANSAC, and optional geometric refinement of every instance.
ExtractResult run_extract(PointCloud cloud, const PipelineConfig& config,
                          std::optional<std::span<const double>> probabilities = std::nullopt,
                          Exec exec = Exec::Parallel);

struct BenchConfig {
    std::uint64_t seed = 1;
    std::vector<double> noise_levels{0.001, 0.005, 0.01};
    int circles = 18;
    int distinct_radii = 6;
};

struct BenchLevel {
    double noise = 0.0;
    double noise_sigma = 0.0;
    std::size_t points = 0;
    DetectionScore detection;            // angle-gap detector against the labels
    std::vector<FitScore> methods;       // parallel to BenchResult::methods
    std::vector<std::size_t> found;      // instance count per method
};

struct BenchResult {
    std::vector<std::string> methods;
    std::vector<BenchLevel> levels;
};

/// Desk-scale scene per noise level; every fitting method runs on the
/// label-derived boundary points. Output does not depend on thread count.
BenchResult run_bench(const BenchConfig& config);
Json bench_json(const BenchConfig& config, const BenchResult& result);
std::string bench_table(const BenchResult& result);

}  // namespace arcfit
