#pragma once

#include "arcfit/algebraic_fit.hpp"
#include "arcfit/metrics.hpp"
#include "arcfit/multi_circle.hpp"
#include "arcfit/synth_scan.hpp"

#include <json.hpp>

#include <span>
#include <vector>

namespace arcfit {

using Json = nlohmann::ordered_json;

Json circle_record(const Circle3D& circle, const FitDiagnostics& diag, ConstraintKind kind);
Json instances_json(std::span<const CircleInstance> instances, ConstraintKind kind);

/// Accepts an array of circle records or an object with a `circles` array.
std::vector<Circle3D> circles_from_json(const Json& j);

/// Union of the `inliers` arrays of an instances document, ascending.
IndexList inliers_from_json(const Json& j);

Json truth_json(const ScanScene& scene, const SceneSpec& spec);

Json scene_spec_json(const SceneSpec& spec);
/// Missing keys keep their defaults. Throws InvalidSpec on malformed values.
SceneSpec scene_spec_from_json(const Json& j);

Json report_json(const EvalReport& report);

/// Parses text, reporting the source and line on failure.
Json parse_json(const std::string& text, const std::string& source);

}  // namespace arcfit
