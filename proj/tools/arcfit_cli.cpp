#include "arcfit/algebraic_fit.hpp"
#include "arcfit/boundary.hpp"
#include "arcfit/errors.hpp"
#include "arcfit/io.hpp"
#include "arcfit/metrics.hpp"
#include "arcfit/pipeline.hpp"
#include "arcfit/serialize.hpp"
#include "arcfit/synth_scan.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace arcfit;

namespace {

constexpr int kOk = 0, kRuntime = 1, kUsage = 2;

void emit(const Json& j, const std::string& path) {
    const std::string text = j.dump(2) + "\n";
    if (path.empty()) std::cout << text;
    else io::write_text(path, text);
}

Json load_json(const std::string& path) { return parse_json(io::read_text(path), path); }

struct Common {
    std::optional<std::uint64_t> seed;
    std::optional<double> r_hyper;
    std::string constraint;
    std::optional<double> inlier_tol;
    std::optional<int> iterations;
    std::string weights;
    bool refine = false;
    std::string format = "xyz";
    std::string json_out;
};

void add_fit_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "RANSAC seed");
    cmd->add_option("--r-hyper", c.r_hyper, "Radius hyper-parameter (about the target radius)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--constraint", c.constraint, "hyper | pratt | taubin | kasa")
        ->check(CLI::IsMember({"hyper", "pratt", "taubin", "kasa", "lls"}));
    cmd->add_option("--inlier-tol", c.inlier_tol, "RANSAC inlier distance")->check(CLI::PositiveNumber);
    cmd->add_option("--iterations", c.iterations, "RANSAC trials per extracted circle")->check(CLI::PositiveNumber);
    cmd->add_option("--weights", c.weights, "Per-point probabilities, one per line (or PLY weight property)");
    cmd->add_flag("--refine", c.refine, "Geometric refinement of each circle");
    cmd->add_option("--json-out", c.json_out, "Write JSON here instead of standard output");
}

PipelineConfig make_config(const std::string& config_path, const Common& c) {
    PipelineConfig cfg = config_path.empty() ? PipelineConfig::from_r_hyper(c.r_hyper.value_or(1.0))
                                             : config_from_json(load_json(config_path));
    if (c.r_hyper && !config_path.empty()) {
        const PipelineConfig d = PipelineConfig::from_r_hyper(*c.r_hyper);
        cfg.r_hyper = d.r_hyper;
        cfg.boundary.query_radius = d.boundary.query_radius;
        cfg.ransac.sample_radius = d.ransac.sample_radius;
        cfg.ransac.max_radius = d.ransac.max_radius;
    }
    if (!c.constraint.empty()) cfg.constraint = parse_constraint(c.constraint);
    if (c.seed) cfg.seed = *c.seed;
    if (c.inlier_tol) cfg.inlier_tol = *c.inlier_tol;
    if (c.iterations) cfg.ransac.iterations = *c.iterations;
    if (c.refine) cfg.refine = true;
    return cfg;
}

int cmd_gen(const std::string& spec_path, const std::string& out_dir, const Common& c) {
    SceneSpec spec = scene_spec_from_json(load_json(spec_path));
    if (c.seed) spec.seed = *c.seed;
    const ScanScene scene = generate_scene(spec);
    for (const auto& w : scene.warnings) std::cerr << "warning: " << w << "\n";
    fs::create_directories(out_dir);
    const auto format = io::parse_format(c.format);
    const fs::path cloud_path = fs::path(out_dir) / (format == io::CloudFormat::Ply ? "scene.ply" : "scene.xyz");
    io::write_cloud(cloud_path, scene.cloud, format);
    io::write_text(fs::path(out_dir) / "truth.json", truth_json(scene, spec).dump(2) + "\n");
    std::cout << "seed " << spec.seed << "\n"
              << "points " << scene.cloud.size() << "\n"
              << "circles " << scene.truth.size() << "\n"
              << "cloud " << cloud_path.string() << "\n";
    return kOk;
}

int cmd_detect(const std::string& cloud_path, const std::string& out_path, const Common& c) {
    const PointCloud cloud = io::read_cloud(cloud_path);
    const BoundaryParams params = BoundaryParams::from_r_hyper(c.r_hyper.value_or(1.0));
    std::vector<double> prob(cloud.size(), 0.0);
    if (!cloud.empty()) {
        const Detection d = detect_boundary_angle_gap(cloud, params);
        for (std::size_t i : d.indices) prob[i] = 1.0;
        std::cerr << "detected " << d.size() << " of " << cloud.size() << " points\n";
    }
    std::ostringstream out;
    for (double p : prob) out << p << "\n";
    if (out_path.empty()) std::cout << out.str();
    else io::write_text(out_path, out.str());
    return kOk;
}

int cmd_fit(const std::string& cloud_path, const Common& c) {
    PointCloud cloud = io::read_cloud(cloud_path);
    if (!c.weights.empty()) cloud.weights = io::read_weights(c.weights);
    cloud.validate();
    const ConstraintKind kind = c.constraint.empty() ? ConstraintKind::Hyper : parse_constraint(c.constraint);
    std::vector<double> w = cloud.weights.value_or(std::vector<double>{});
    Fit3D fit = fit_circle_3d(cloud.points, w, kind);
    if (c.refine) {
        FitDiagnostics diag;
        fit.circle = geometric_refine_3d(cloud.points, w, fit.circle, &diag);
        fit.diag.objective = diag.objective;
    }
    emit(circle_record(fit.circle, fit.diag, kind), c.json_out);
    return kOk;
}

int cmd_extract(const std::string& cloud_path, const std::string& config_path, const Common& c) {
    const PointCloud cloud = io::read_cloud(cloud_path);
    const PipelineConfig cfg = make_config(config_path, c);
    std::optional<std::vector<double>> probs;
    if (!c.weights.empty()) {
        probs = io::read_weights(c.weights);
        std::cerr << "detection: external probabilities from " << c.weights << "\n";
    } else {
        std::cerr << "detection: angle-gap\n";
    }
    std::optional<std::span<const double>> view;
    if (probs) view = std::span<const double>(*probs);
    const ExtractResult res = run_extract(cloud, cfg, view);
    std::cerr << "extracted " << res.instances.size() << " circles from " << res.detection.size()
              << " boundary points\n";
    emit(instances_json(res.instances, cfg.constraint), c.json_out);
    return kOk;
}

struct EvalArgs {
    std::string instances, truth, labels, predictions, csv;
    std::optional<double> center_tol;
    bool in_plane = false;
};

int cmd_eval(const EvalArgs& a, const Common& c) {
    const Json inst = load_json(a.instances);
    const Json truth_doc = load_json(a.truth);
    const auto found = circles_from_json(inst);
    const auto truth = circles_from_json(truth_doc);
    const PointCloud labelled = io::read_cloud(a.labels);
    if (!labelled.labels) throw FormatError(a.labels + ": cloud has no label column");
    if (truth_doc.is_object() && truth_doc.contains("points") &&
        truth_doc["points"].get<std::size_t>() != labelled.size())
        throw FormatError("truth describes " + std::to_string(truth_doc["points"].get<std::size_t>()) +
                          " points but " + a.labels + " has " + std::to_string(labelled.size()));

    IndexList predicted;
    if (!a.predictions.empty()) {
        const auto p = io::read_weights(a.predictions);
        if (p.size() != labelled.size()) throw FormatError("predictions and labels differ in length");
        for (std::size_t i = 0; i < p.size(); ++i)
            if (p[i] >= 0.5) predicted.push_back(i);
    } else {
        predicted = inliers_from_json(inst);
    }
    double tol = 0.0;
    if (a.center_tol) {
        tol = *a.center_tol;
    } else {
        double r_min = std::numeric_limits<double>::infinity();
        for (const auto& t : truth) r_min = std::min(r_min, t.radius());
        tol = std::isfinite(r_min) ? 0.5 * r_min : 1.0;
    }
    const EvalReport report =
        evaluate(found, truth, predicted, *labelled.labels, tol, a.in_plane ? CenterMode::InPlane : CenterMode::Spatial);
    Json j = report_json(report);
    if (!c.json_out.empty()) io::write_text(c.json_out, j.dump(2) + "\n");
    else std::cout << j.dump(2) << "\n";
    std::cout << format_report(report);
    if (!a.csv.empty()) io::write_text(a.csv, report_csv(report));
    return kOk;
}

int cmd_bench(const Common& c, const std::vector<double>& levels) {
    BenchConfig cfg;
    if (c.seed) cfg.seed = *c.seed;
    if (!levels.empty()) cfg.noise_levels = levels;
    const BenchResult res = run_bench(cfg);
    const Json j = bench_json(cfg, res);
    if (!c.json_out.empty()) io::write_text(c.json_out, j.dump(2) + "\n");
    std::cout << bench_table(res);
    return kOk;
}

int cmd_patches(const std::string& cloud_path, const std::string& truth_path, const std::string& out_dir,
                std::size_t count, const Common& c) {
    const PointCloud cloud = io::read_cloud(cloud_path);
    const auto truth = circles_from_json(load_json(truth_path));
    const double r = c.r_hyper.value_or(1.0);
    std::vector<Point3> centers;
    std::vector<double> radii;
    for (const auto& t : truth) {
        centers.push_back(t.center());
        radii.push_back(t.radius());
    }
    Rng rng(c.seed.value_or(1));
    const auto queries = select_patch_queries(cloud, centers, radii, r, count, rng);
    fs::create_directories(out_dir);
    for (std::size_t k = 0; k < queries.size(); ++k)
        write_patch_pair(out_dir, k, extract_patch_pair(cloud, queries[k], r, rng));
    std::cout << "pairs " << queries.size() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Circle extraction from 3D point clouds"};
    app.require_subcommand(1);
    Common c;

    std::string spec_path, out_dir, cloud_path, config_path, out_path, truth_path;
    auto* gen = app.add_subcommand("gen", "Generate a synthetic scan from a scene spec");
    gen->add_option("spec", spec_path, "Scene spec JSON")->required();
    gen->add_option("out-dir", out_dir, "Output directory")->required();
    gen->add_option("--seed", c.seed, "Override the spec seed");
    gen->add_option("--format", c.format, "xyz | ply")->check(CLI::IsMember({"xyz", "ply"}));

    auto* detect = app.add_subcommand("detect", "Angle-gap boundary detection; one probability per point");
    detect->add_option("cloud", cloud_path, "Point cloud (.xyz or .ply)")->required();
    detect->add_option("-o,--out", out_path, "Probability file (default: standard output)");
    detect->add_option("--r-hyper", c.r_hyper, "Radius hyper-parameter")->check(CLI::PositiveNumber);

    auto* fit = app.add_subcommand("fit", "Fit one circle to all points of a cloud");
    fit->add_option("cloud", cloud_path, "Point cloud")->required();
    add_fit_flags(fit, c);

    auto* extract = app.add_subcommand("extract", "Detect, cluster and fit every circle in a cloud");
    extract->add_option("cloud", cloud_path, "Point cloud")->required();
    extract->add_option("config", config_path, "Pipeline config JSON");
    add_fit_flags(extract, c);

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "Score extracted circles against ground truth");
    eval->add_option("instances", ea.instances, "Instances JSON")->required();
    eval->add_option("truth", ea.truth, "truth.json")->required();
    eval->add_option("labels", ea.labels, "Labelled cloud")->required();
    eval->add_option("--predictions", ea.predictions, "Per-point probabilities used as the detected set");
    eval->add_option("--center-tol", ea.center_tol, "Matching distance (default: half the smallest radius)")
        ->check(CLI::PositiveNumber);
    eval->add_flag("--in-plane", ea.in_plane, "Measure center deviation in the truth plane");
    eval->add_option("--csv", ea.csv, "Per-circle CSV");
    eval->add_option("--json-out", c.json_out, "Write the report JSON here");

    std::vector<double> levels;
    auto* bench = app.add_subcommand("bench", "Method x noise-level grid on desk-scale scenes");
    bench->add_option("--seed", c.seed, "Scene and RANSAC seed");
    bench->add_option("--levels", levels, "Relative noise levels");
    bench->add_option("--json-out", c.json_out, "Write the result JSON here");

    std::size_t count = 32;
    auto* patches = app.add_subcommand("patches", "Export training patch pairs");
    patches->add_option("cloud", cloud_path, "Point cloud")->required();
    patches->add_option("truth", truth_path, "truth.json")->required();
    patches->add_option("out-dir", out_dir, "Output directory")->required();
    patches->add_option("--count", count, "Random non-center queries");
    patches->add_option("--r-hyper", c.r_hyper, "Radius hyper-parameter")->check(CLI::PositiveNumber);
    patches->add_option("--seed", c.seed, "Sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*gen) return cmd_gen(spec_path, out_dir, c);
        if (*detect) return cmd_detect(cloud_path, out_path, c);
        if (*fit) return cmd_fit(cloud_path, c);
        if (*extract) return cmd_extract(cloud_path, config_path, c);
        if (*eval) return cmd_eval(ea, c);
        if (*bench) return cmd_bench(c, levels);
        if (*patches) return cmd_patches(cloud_path, truth_path, out_dir, count, c);
    } catch (const InvalidSpec& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kUsage;
}
