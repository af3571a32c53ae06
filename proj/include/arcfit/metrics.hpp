#pragma once

#include "arcfit/algebraic_fit.hpp"
#include "arcfit/types.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace arcfit {

/// Precision, recall and F1 as unit fractions; zero denominators give 0.
struct DetectionScore {
    double precision = 0.0, recall = 0.0, f1 = 0.0;
    std::size_t tp = 0, fp = 0, fn = 0;
};

DetectionScore score_detection(std::span<const std::size_t> predicted, std::span<const Label> truth_labels);

enum class CenterMode { Spatial, InPlane };

struct CirclePair {
    Circle3D found;
    Circle3D truth;
};

struct FitScore {
    double ad_c = 0.0;   // mean center deviation
    double ad_r = 0.0;   // mean |r - r_true|
    double mse_r = 0.0;  // mean (r - r_true)^2
    std::size_t k = 0;
};

/// Center deviation of one pair; InPlane discards the offset along the truth normal.
double center_deviation(const CirclePair& pair, CenterMode mode = CenterMode::Spatial);

/// Throws EmptyScore for an empty pairing.
FitScore score_fitting(std::span<const CirclePair> pairs, CenterMode mode = CenterMode::Spatial);

struct PerCircle {
    std::size_t truth_id = 0;
    std::size_t found_id = 0;
    double ad_c = 0.0;
    double ad_r = 0.0;
};

struct EvalReport {
    DetectionScore detection;
    FitScore fitting;
    std::vector<PerCircle> per_circle;
    std::size_t found_count = 0;
    std::size_t truth_count = 0;
    double center_tol = 0.0;
    CenterMode center_mode = CenterMode::Spatial;
};

/// Matches found circles to the truth, scores the matched pairs and the
/// predicted boundary set. A report with no matched pair has k = 0.
EvalReport evaluate(std::span<const Circle3D> found, std::span<const Circle3D> truth,
                    std::span<const std::size_t> predicted, std::span<const Label> truth_labels,
                    double center_tol, CenterMode mode = CenterMode::Spatial);

struct TableRow {
    std::string method;
    std::vector<FitScore> levels;  // one per column group
};

/// Aligned text table: one AD(c) / AD(r) / MSE(r) group per level.
std::string format_fit_table(const std::vector<std::string>& level_names, const std::vector<TableRow>& rows);

std::string format_report(const EvalReport& report);
std::string report_csv(const EvalReport& report);

}  // namespace arcfit
