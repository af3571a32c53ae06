#include "arcfit/pipeline.hpp"

#include "arcfit/errors.hpp"
#include "arcfit/geometry.hpp"
#include "arcfit/synth_scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace arcfit {

namespace {

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * v);
    return buf;
}

Detection label_detection(const ScanScene& scene) {
    Detection d;
    const auto& labels = *scene.cloud.labels;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == Label::CircleBoundary) {
            d.indices.push_back(i);
            d.probabilities.push_back(1.0);
        }
    return d;
}

FitScore score_instances(const std::vector<Circle3D>& found, const std::vector<Circle3D>& truth, double tol) {
    const auto pairing = match_instances(found, truth, tol);
    if (pairing.empty()) return {};
    std::vector<CirclePair> pairs;
    for (const auto& p : pairing) pairs.push_back({found[p.found], truth[p.truth]});
    return score_fitting(pairs);
}

}  // namespace

PipelineConfig PipelineConfig::from_r_hyper(double r_hyper) {
    PipelineConfig c;
    c.r_hyper = r_hyper;
    c.boundary = BoundaryParams::from_r_hyper(r_hyper);
    c.ransac.sample_radius = 2.0 * r_hyper;
    c.ransac.max_radius = 5.0 * r_hyper;
    return c;
}

void PipelineConfig::validate() const {
    if (!(r_hyper > 0.0) || !std::isfinite(r_hyper)) throw InvalidArgument("r_hyper must be positive");
    if (inlier_tol && !(*inlier_tol > 0.0)) throw InvalidArgument("inlier_tol must be positive");
    boundary.validate();
    RansacParams r = ransac;
    if (inlier_tol) r.inlier_tol = *inlier_tol;
    r.validate();
}

Json config_json(const PipelineConfig& c) {
    Json j;
    j["r_hyper"] = c.r_hyper;
    j["constraint"] = std::string(to_string(c.constraint));
    j["refine"] = c.refine;
    j["seed"] = c.seed;
    j["inlier_tol"] = c.inlier_tol ? Json(*c.inlier_tol) : Json(nullptr);
    j["ransac"] = {{"iterations", c.ransac.iterations},
                   {"min_inliers", c.ransac.min_inliers},
                   {"max_circles", c.ransac.max_circles},
                   {"max_radius", c.ransac.max_radius},
                   {"sample_radius", c.ransac.sample_radius}};
    j["boundary"] = {{"query_radius", c.boundary.query_radius},
                     {"angle_gap_threshold", c.boundary.angle_gap_threshold},
                     {"min_neighbors", c.boundary.min_neighbors}};
    j["external"] = {{"threshold", c.external.threshold}, {"epsilon", c.external.epsilon}};
    return j;
}

PipelineConfig config_from_json(const Json& j) {
    if (!j.is_object()) throw InvalidSpec("config must be a JSON object");
    auto get = [](const Json& o, const char* key, auto& out) {
        if (!o.contains(key) || o[key].is_null()) return;
        try {
            out = o[key].get<std::decay_t<decltype(out)>>();
        } catch (const nlohmann::json::exception&) {
            throw InvalidSpec(std::string("bad value for '") + key + "'");
        }
    };
    double r_hyper = 1.0;
    get(j, "r_hyper", r_hyper);
    PipelineConfig c = PipelineConfig::from_r_hyper(r_hyper);
    if (j.contains("constraint")) {
        if (!j["constraint"].is_string()) throw InvalidSpec("bad value for 'constraint'");
        try {
            c.constraint = parse_constraint(j["constraint"].get<std::string>());
        } catch (const InvalidArgument& e) {
            throw InvalidSpec(e.what());
        }
    }
    get(j, "refine", c.refine);
    get(j, "seed", c.seed);
    double tol = 0.0;
    if (j.contains("inlier_tol") && !j["inlier_tol"].is_null()) {
        get(j, "inlier_tol", tol);
        c.inlier_tol = tol;
    }
    if (j.contains("ransac")) {
        const Json& r = j["ransac"];
        get(r, "iterations", c.ransac.iterations);
        get(r, "min_inliers", c.ransac.min_inliers);
        get(r, "max_circles", c.ransac.max_circles);
        get(r, "max_radius", c.ransac.max_radius);
        get(r, "sample_radius", c.ransac.sample_radius);
    }
    if (j.contains("boundary")) {
        const Json& b = j["boundary"];
        get(b, "query_radius", c.boundary.query_radius);
        get(b, "angle_gap_threshold", c.boundary.angle_gap_threshold);
        get(b, "min_neighbors", c.boundary.min_neighbors);
    }
    if (j.contains("external")) {
        get(j["external"], "threshold", c.external.threshold);
        get(j["external"], "epsilon", c.external.epsilon);
    }
    try {
        c.validate();
    } catch (const InvalidArgument& e) {
        throw InvalidSpec(e.what());
    }
    return c;
}

ExtractResult run_extract(PointCloud cloud, const PipelineConfig& config,
                          std::optional<std::span<const double>> probabilities, Exec exec) {
    config.validate();
    cloud.validate();
    ExtractResult out;
    if (cloud.size() < 2) return out;

    if (probabilities) {
        out.detection = detection_from_probabilities(cloud, *probabilities, config.external);
        out.external_detection = true;
    } else {
        out.detection = detect_boundary_angle_gap(cloud, config.boundary, exec);
    }

    RansacParams params = config.ransac;
    params.seed = config.seed;
    params.inlier_tol = config.inlier_tol ? *config.inlier_tol : default_inlier_tol(cloud);
    out.inlier_tol = params.inlier_tol;
    out.instances = cluster_and_fit(cloud, out.detection, params, config.constraint, exec);

    if (config.refine) {
        std::vector<double> prob(cloud.size(), 0.0);
        for (std::size_t k = 0; k < out.detection.size(); ++k)
            prob[out.detection.indices[k]] = out.detection.probabilities[k];
        for (auto& inst : out.instances) {
            std::vector<Point3> pts;
            std::vector<double> w;
            for (std::size_t i : inst.inlier_indices) {
                pts.push_back(cloud.points[i]);
                w.push_back(prob[i]);
            }
            FitDiagnostics diag;
            inst.circle = geometric_refine_3d(pts, w, inst.circle, &diag);
            inst.diagnostics.objective = diag.objective;
        }
    }
    return out;
}

BenchResult run_bench(const BenchConfig& config) {
    BenchResult result;
    result.methods = {"Hyper", "Pratt", "Taubin", "LLS", "Hyper+refine"};
    const ConstraintKind kinds[] = {ConstraintKind::Hyper, ConstraintKind::Pratt, ConstraintKind::Taubin,
                                    ConstraintKind::Kasa, ConstraintKind::Hyper};
    const std::size_t nm = result.methods.size();
    const std::size_t nl = config.noise_levels.size();
    result.levels.resize(nl);

    std::vector<ScanScene> scenes(nl);
    std::vector<SceneSpec> specs(nl);
    for (std::size_t l = 0; l < nl; ++l)
        specs[l] = desk_scene_spec(config.circles, config.distinct_radii, config.noise_levels[l], config.seed + l);

#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t l = 0; l < static_cast<std::ptrdiff_t>(nl); ++l)
        scenes[l] = generate_scene(specs[l], Exec::Serial);

    for (std::size_t l = 0; l < nl; ++l) {
        auto& lv = result.levels[l];
        lv.noise = config.noise_levels[l];
        lv.noise_sigma = scenes[l].noise_sigma;
        lv.points = scenes[l].cloud.size();
        lv.methods.resize(nm);
        lv.found.resize(nm);
    }

    // one job per (level, method) plus one detector job per level
    const std::ptrdiff_t jobs = static_cast<std::ptrdiff_t>(nl * (nm + 1));
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t job = 0; job < jobs; ++job) {
        const std::size_t l = static_cast<std::size_t>(job) / (nm + 1);
        const std::size_t m = static_cast<std::size_t>(job) % (nm + 1);
        const ScanScene& scene = scenes[l];
        const double spacing = specs[l].sample_spacing;
        if (m == nm) {
            BoundaryParams bp;
            bp.query_radius = 2.0 * spacing;
            const Detection d = detect_boundary_angle_gap(scene.cloud, bp, Exec::Serial);
            result.levels[l].detection = score_detection(d.indices, *scene.cloud.labels);
            continue;
        }
        const Detection det = label_detection(scene);
        RansacParams rp;
        rp.seed = config.seed;
        rp.inlier_tol = std::max(2.0 * scene.label_threshold, 3.0 * scene.noise_sigma);
        rp.sample_radius = 8.0 * spacing;
        double r_max = 0.0;
        for (const auto& c : scene.truth) r_max = std::max(r_max, c.radius());
        rp.max_radius = 1.5 * r_max;
        auto inst = cluster_and_fit(scene.cloud, det, rp, kinds[m], Exec::Serial);
        if (m == nm - 1) {
            for (auto& c : inst) {
                std::vector<Point3> pts;
                for (std::size_t i : c.inlier_indices) pts.push_back(scene.cloud.points[i]);
                c.circle = geometric_refine_3d(pts, {}, c.circle);
            }
        }
        const auto circles = circles_of(inst);
        result.levels[l].found[m] = circles.size();
        result.levels[l].methods[m] = score_instances(circles, scene.truth, 2.0);
    }
    return result;
}

Json bench_json(const BenchConfig& config, const BenchResult& result) {
    Json j;
    j["seed"] = config.seed;
    j["circles"] = config.circles;
    j["distinct_radii"] = config.distinct_radii;
    Json levels = Json::array();
    for (const auto& lv : result.levels) {
        Json lj;
        lj["noise"] = lv.noise;
        lj["noise_sigma"] = lv.noise_sigma;
        lj["points"] = lv.points;
        lj["detection"] = {{"precision", lv.detection.precision},
                           {"recall", lv.detection.recall},
                           {"f1", lv.detection.f1}};
        Json methods = Json::array();
        for (std::size_t m = 0; m < result.methods.size(); ++m)
            methods.push_back({{"method", result.methods[m]},
                               {"found", lv.found[m]},
                               {"ad_c", lv.methods[m].ad_c},
                               {"ad_r", lv.methods[m].ad_r},
                               {"mse_r", lv.methods[m].mse_r},
                               {"k", lv.methods[m].k}});
        lj["methods"] = std::move(methods);
        levels.push_back(std::move(lj));
    }
    j["levels"] = std::move(levels);
    return j;
}

std::string bench_table(const BenchResult& result) {
    std::vector<std::string> names;
    for (const auto& lv : result.levels) names.push_back(percent(lv.noise));
    std::vector<TableRow> rows;
    for (std::size_t m = 0; m < result.methods.size(); ++m) {
        TableRow row{result.methods[m], {}};
        for (const auto& lv : result.levels) row.levels.push_back(lv.methods[m]);
        rows.push_back(std::move(row));
    }
    std::string out = format_fit_table(names, rows);
    out += "\nangle-gap detector\n";
    for (const auto& lv : result.levels) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "  noise %-6s  P %6.2f%%  R %6.2f%%  F1 %6.2f%%\n", percent(lv.noise).c_str(),
                      100.0 * lv.detection.precision, 100.0 * lv.detection.recall, 100.0 * lv.detection.f1);
        out += buf;
    }
    return out;
}

}  // namespace arcfit
