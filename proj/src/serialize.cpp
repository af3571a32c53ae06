#include "arcfit/serialize.hpp"

#include "arcfit/errors.hpp"

#include <algorithm>
#include <numbers>

namespace arcfit {

namespace {

Json vec3(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 to_vec3(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != 3 || !std::all_of(j.begin(), j.end(), [](const Json& v) { return v.is_number(); }))
        throw FormatError(std::string(what) + " must be an array of three numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

double number(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) throw FormatError(std::string("missing numeric field '") + key + "'");
    return j[key].get<double>();
}

template <class T>
void read_opt(const Json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j[key].get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidSpec(std::string("bad value for '") + key + "'");
    }
}

Vec3 spec_vec3(const Json& j, const char* key, const Vec3& fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return to_vec3(j[key], key);
    } catch (const FormatError& e) {
        throw InvalidSpec(e.what());
    }
}

Json fit_score_json(const FitScore& s) {
    return {{"ad_c", s.ad_c}, {"ad_r", s.ad_r}, {"mse_r", s.mse_r}, {"k", s.k}};
}

}  // namespace

Json circle_record(const Circle3D& circle, const FitDiagnostics& diag, ConstraintKind kind) {
    Json j;
    j["center"] = vec3(circle.center());
    j["radius"] = circle.radius();
    j["normal"] = vec3(circle.normal());
    j["eta"] = diag.eta;
    j["objective"] = diag.objective;
    j["constraint"] = std::string(to_string(kind));
    if (diag.condition == Condition::NearDegenerate) j["condition"] = "near-degenerate";
    return j;
}

Json instances_json(std::span<const CircleInstance> instances, ConstraintKind kind) {
    Json arr = Json::array();
    for (const auto& inst : instances) {
        Json j = circle_record(inst.circle, inst.diagnostics, kind);
        j["inliers"] = inst.inlier_indices;
        arr.push_back(std::move(j));
    }
    return arr;
}

std::vector<Circle3D> circles_from_json(const Json& j) {
    const Json* arr = &j;
    if (j.is_object()) {
        if (!j.contains("circles")) throw FormatError("expected a 'circles' array");
        arr = &j["circles"];
    }
    if (!arr->is_array()) throw FormatError("expected an array of circle records");
    std::vector<Circle3D> out;
    for (const auto& rec : *arr) {
        if (!rec.is_object()) throw FormatError("circle record must be an object");
        const double r = number(rec, "radius");
        if (!(r > 0.0)) throw FormatError("circle radius must be positive");
        if (!rec.contains("center")) throw FormatError("missing field 'center'");
        const Vec3 c = to_vec3(rec["center"], "center");
        const Vec3 n = rec.contains("normal") ? to_vec3(rec["normal"], "normal") : Vec3::UnitZ();
        if (!(n.norm() > 0.0)) throw FormatError("circle normal must be nonzero");
        out.push_back(Circle3D::make(c, n.normalized(), r));
    }
    return out;
}

IndexList inliers_from_json(const Json& j) {
    if (!j.is_array()) throw FormatError("expected an instances array");
    IndexList out;
    for (const auto& rec : j) {
        if (!rec.contains("inliers")) continue;
        for (const auto& v : rec["inliers"]) {
            if (!v.is_number_unsigned()) throw FormatError("inlier indices must be nonnegative integers");
            out.push_back(v.get<std::size_t>());
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Json truth_json(const ScanScene& scene, const SceneSpec& spec) {
    Json j;
    j["seed"] = spec.seed;
    j["points"] = scene.cloud.size();
    j["noise_sigma"] = scene.noise_sigma;
    j["label_threshold"] = scene.label_threshold;
    Json circles = Json::array();
    for (const auto& c : scene.truth)
        circles.push_back({{"center", vec3(c.center())}, {"radius", c.radius()}, {"normal", vec3(c.normal())}});
    j["circles"] = std::move(circles);
    return j;
}

Json scene_spec_json(const SceneSpec& s) {
    Json j;
    j["plane_extent"] = s.plane_extent;
    j["sample_spacing"] = s.sample_spacing;
    j["noise_sigma_rel"] = s.noise_sigma_rel;
    j["inner_wall"] = s.inner_wall;
    j["view_angle_deg"] = s.view_angle_deg;
    j["view_azimuth_deg"] = s.view_azimuth_deg;
    j["plane_origin"] = vec3(s.plane_origin);
    j["plane_normal"] = vec3(s.plane_normal);
    j["seed"] = s.seed;
    Json circles = Json::array();
    for (const auto& c : s.circles) {
        Json cj;
        cj["center"] = vec3(c.center);
        cj["radius"] = c.radius;
        cj["normal"] = vec3(c.normal);
        cj["arc_span"] = c.arc_span;
        cj["arc_start"] = c.arc_start;
        cj["depth"] = c.depth;
        cj["outer_wall"] = c.outer_wall;
        circles.push_back(std::move(cj));
    }
    j["circles"] = std::move(circles);
    return j;
}

SceneSpec scene_spec_from_json(const Json& j) {
    if (!j.is_object()) throw InvalidSpec("scene spec must be a JSON object");
    SceneSpec s;
    read_opt(j, "plane_extent", s.plane_extent);
    read_opt(j, "sample_spacing", s.sample_spacing);
    read_opt(j, "noise_sigma_rel", s.noise_sigma_rel);
    read_opt(j, "inner_wall", s.inner_wall);
    read_opt(j, "view_angle_deg", s.view_angle_deg);
    read_opt(j, "view_azimuth_deg", s.view_azimuth_deg);
    read_opt(j, "seed", s.seed);
    s.plane_origin = spec_vec3(j, "plane_origin", s.plane_origin);
    s.plane_normal = spec_vec3(j, "plane_normal", s.plane_normal);
    if (j.contains("circles")) {
        if (!j["circles"].is_array()) throw InvalidSpec("'circles' must be an array");
        for (const auto& cj : j["circles"]) {
            if (!cj.is_object()) throw InvalidSpec("circle entry must be an object");
            CircleSpec c;
            if (!cj.contains("center") || !cj.contains("radius")) throw InvalidSpec("circle needs center and radius");
            c.center = spec_vec3(cj, "center", c.center);
            read_opt(cj, "radius", c.radius);
            c.normal = spec_vec3(cj, "normal", s.plane_normal);
            read_opt(cj, "arc_span", c.arc_span);
            read_opt(cj, "arc_start", c.arc_start);
            read_opt(cj, "depth", c.depth);
            read_opt(cj, "outer_wall", c.outer_wall);
            s.circles.push_back(c);
        }
    }
    return s;
}

Json report_json(const EvalReport& r) {
    Json j;
    j["detection"] = {{"precision", r.detection.precision}, {"recall", r.detection.recall},
                      {"f1", r.detection.f1},               {"tp", r.detection.tp},
                      {"fp", r.detection.fp},               {"fn", r.detection.fn}};
    j["fitting"] = fit_score_json(r.fitting);
    Json per = Json::array();
    for (const auto& c : r.per_circle)
        per.push_back({{"truth_id", c.truth_id}, {"found_id", c.found_id}, {"ad_c", c.ad_c}, {"ad_r", c.ad_r}});
    j["per_circle"] = std::move(per);
    j["config"] = {{"found", r.found_count},
                   {"truth", r.truth_count},
                   {"center_tol", r.center_tol},
                   {"center_mode", r.center_mode == CenterMode::InPlane ? "in-plane" : "spatial"}};
    return j;
}

Json parse_json(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // byte offset -> line
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n'));
        throw ParseError(source, line, "invalid JSON");
    }
}

}  // namespace arcfit
