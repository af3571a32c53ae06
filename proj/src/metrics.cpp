#include "arcfit/metrics.hpp"

#include "arcfit/errors.hpp"
#include "arcfit/multi_circle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_set>

namespace arcfit {

namespace {

std::string num(double v, const char* f = "%.6f") {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string pad(const std::string& s, std::size_t w) {
    return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

}  // namespace

DetectionScore score_detection(std::span<const std::size_t> predicted, std::span<const Label> truth_labels) {
    std::vector<std::uint8_t> hit(truth_labels.size(), 0);
    for (std::size_t i : predicted) {
        if (i >= truth_labels.size()) throw InvalidArgument("predicted index out of range");
        hit[i] = 1;
    }
    DetectionScore s;
    for (std::size_t i = 0; i < truth_labels.size(); ++i) {
        const bool positive = truth_labels[i] == Label::CircleBoundary;
        if (hit[i] && positive) ++s.tp;
        else if (hit[i]) ++s.fp;
        else if (positive) ++s.fn;
    }
    if (s.tp + s.fp > 0) s.precision = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
    if (s.tp + s.fn > 0) s.recall = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn);
    if (s.precision + s.recall > 0.0) s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

double center_deviation(const CirclePair& pair, CenterMode mode) {
    Vec3 d = pair.found.center() - pair.truth.center();
    if (mode == CenterMode::InPlane) d -= d.dot(pair.truth.normal()) * pair.truth.normal();
    return d.norm();
}

FitScore score_fitting(std::span<const CirclePair> pairs, CenterMode mode) {
    if (pairs.empty()) throw EmptyScore("fitting score needs at least one matched pair");
    FitScore s;
    s.k = pairs.size();
    for (const auto& p : pairs) {
        const double dr = p.found.radius() - p.truth.radius();
        s.ad_c += center_deviation(p, mode);
        s.ad_r += std::abs(dr);
        s.mse_r += dr * dr;
    }
    const double k = static_cast<double>(s.k);
    s.ad_c /= k;
    s.ad_r /= k;
    s.mse_r /= k;
    return s;
}

EvalReport evaluate(std::span<const Circle3D> found, std::span<const Circle3D> truth,
                    std::span<const std::size_t> predicted, std::span<const Label> truth_labels,
                    double center_tol, CenterMode mode) {
    EvalReport r;
    r.detection = score_detection(predicted, truth_labels);
    r.found_count = found.size();
    r.truth_count = truth.size();
    r.center_tol = center_tol;
    r.center_mode = mode;

    auto pairing = match_instances(found, truth, center_tol);
    std::sort(pairing.begin(), pairing.end(), [](const Pairing& a, const Pairing& b) { return a.truth < b.truth; });
    std::vector<CirclePair> pairs;
    for (const auto& p : pairing) {
        CirclePair cp{found[p.found], truth[p.truth]};
        r.per_circle.push_back({p.truth, p.found, center_deviation(cp, mode),
                                std::abs(cp.found.radius() - cp.truth.radius())});
        pairs.push_back(cp);
    }
    if (!pairs.empty()) r.fitting = score_fitting(pairs, mode);
    return r;
}

std::string format_fit_table(const std::vector<std::string>& level_names, const std::vector<TableRow>& rows) {
    constexpr std::size_t kMethod = 14, kCol = 11;
    std::ostringstream out;
    out << pad("Noise level", kMethod);
    for (const auto& name : level_names) out << " |" << pad(name, 3 * kCol);
    out << "\n" << pad("Method", kMethod);
    for (std::size_t i = 0; i < level_names.size(); ++i)
        out << " |" << pad("AD(c)", kCol) << pad("AD(r)", kCol) << pad("MSE(r)", kCol);
    out << "\n" << std::string(kMethod + level_names.size() * (3 * kCol + 2), '-') << "\n";
    for (const auto& row : rows) {
        out << pad(row.method, kMethod);
        for (const auto& s : row.levels)
            out << " |" << pad(num(s.ad_c), kCol) << pad(num(s.ad_r), kCol) << pad(num(s.mse_r), kCol);
        out << "\n";
    }
    return out.str();
}

std::string format_report(const EvalReport& r) {
    std::ostringstream out;
    out << "detection  P " << num(100.0 * r.detection.precision, "%.2f") << "%  R "
        << num(100.0 * r.detection.recall, "%.2f") << "%  F1 " << num(100.0 * r.detection.f1, "%.2f")
        << "%  (tp " << r.detection.tp << ", fp " << r.detection.fp << ", fn " << r.detection.fn << ")\n";
    out << "circles    found " << r.found_count << ", truth " << r.truth_count << ", matched " << r.fitting.k
        << "\n";
    out << format_fit_table({"all"}, {{"matched", {r.fitting}}});
    out << "\n" << pad("truth", 6) << pad("found", 7) << pad("AD(c)", 12) << pad("AD(r)", 12) << "\n";
    for (const auto& c : r.per_circle)
        out << pad(std::to_string(c.truth_id), 6) << pad(std::to_string(c.found_id), 7) << pad(num(c.ad_c), 12)
            << pad(num(c.ad_r), 12) << "\n";
    return out.str();
}

std::string report_csv(const EvalReport& r) {
    std::ostringstream out;
    out << "truth_id,found_id,ad_c,ad_r\n";
    for (const auto& c : r.per_circle)
        out << c.truth_id << ',' << c.found_id << ',' << num(c.ad_c, "%.17g") << ',' << num(c.ad_r, "%.17g")
            << '\n';
    return out.str();
}

}  // namespace arcfit
