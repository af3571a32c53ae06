#include "arcfit/multi_circle.hpp"

#include "arcfit/errors.hpp"
#include "arcfit/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iterator>
#include <numeric>
#include <optional>
#include <tuple>

namespace arcfit {

namespace {

constexpr int kRefitRounds = 5;

struct Trial {
    std::array<std::size_t, 3> sample{};
    bool drawn = false;
};

struct Scored {
    std::optional<Circle3D> circle;
    std::size_t inliers = 0;
};

/// Positions (into the detection arrays) of alive points within `tol` of `c`.
IndexList inliers_of(const Circle3D& c, double tol, const SpatialIndex& index, std::span<const Point3> pts,
                     const std::vector<std::uint8_t>& alive) {
    IndexList out;
    for (std::size_t j : index.query(c.center(), c.radius() + tol))
        if (alive[j] && point_to_circle3d_distance(pts[j], c) <= tol) out.push_back(j);
    return out;
}

Scored score_trial(const Trial& t, std::span<const Point3> pts, const std::vector<std::uint8_t>& alive,
                   const SpatialIndex& index, const RansacParams& params, ConstraintKind kind) {
    Scored s;
    if (!t.drawn) return s;
    const Point3 &a = pts[t.sample[0]], &b = pts[t.sample[1]], &c = pts[t.sample[2]];
    const Vec3 ab = b - a, ac = c - a;
    if (ab.cross(ac).norm() <= 1e-10 * ab.norm() * ac.norm()) return s;
    const std::array<Point3, 3> triple{a, b, c};
    try {
        const Fit3D fit = fit_circle_3d(triple, {}, kind);
        if (!(fit.circle.radius() <= params.max_radius)) return s;
        s.inliers = inliers_of(fit.circle, params.inlier_tol, index, pts, alive).size();
        s.circle = fit.circle;
    } catch (const Error&) {
        s.circle.reset();
    }
    return s;
}

}  // namespace

void RansacParams::validate() const {
    if (iterations < 1) throw InvalidArgument("RANSAC iterations must be at least 1");
    if (!(inlier_tol > 0.0) || !std::isfinite(inlier_tol)) throw InvalidArgument("inlier_tol must be positive");
    if (min_inliers < 3) throw InvalidArgument("min_inliers must be at least 3");
    if (max_circles < 0) throw InvalidArgument("max_circles must be nonnegative");
    if (!(max_radius > 0.0)) throw InvalidArgument("max_radius must be positive");
    if (!(sample_radius > 0.0)) throw InvalidArgument("sample_radius must be positive");
}

double default_inlier_tol(const PointCloud& cloud) {
    const double d = average_nn_distance(cloud.points);
    if (!(d > 0.0) || !std::isfinite(d)) throw InvalidArgument("cannot derive an inlier tolerance from this cloud");
    return 2.0 * d;
}

double point_to_circle3d_distance(const Point3& p, const Circle3D& c) {
    const Point3 center = c.center();
    const Vec3 d = p - center;
    const double off = d.dot(c.normal());
    const Vec3 in_plane = d - off * c.normal();
    const double rho = in_plane.norm();
    const double radial = rho > 0.0 ? std::abs(rho - c.radius()) : c.radius();
    return std::hypot(radial, off);
}

std::vector<CircleInstance> cluster_and_fit(const PointCloud& cloud, const Detection& detection,
                                            const RansacParams& params, ConstraintKind kind, Exec exec) {
    params.validate();
    if (detection.probabilities.size() != detection.indices.size())
        throw InvalidArgument("detection indices and probabilities differ in length");
    std::vector<CircleInstance> found;
    const std::size_t n = detection.size();
    if (n < 3) return found;

    std::vector<Point3> pts(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (detection.indices[k] >= cloud.size()) throw InvalidArgument("detection index out of range");
        pts[k] = cloud.points[detection.indices[k]];
    }
    const double cell = std::max(suggested_cell_size(pts), params.inlier_tol);
    const SpatialIndex index(pts, cell);

    std::vector<std::uint8_t> alive(n, 1);
    std::size_t alive_count = n;
    Rng rng(params.seed);
    const bool local_sampling = std::isfinite(params.sample_radius);
    const std::size_t need = std::max<std::size_t>(3, static_cast<std::size_t>(params.min_inliers));

    while (found.size() < static_cast<std::size_t>(params.max_circles) && alive_count >= need) {
        IndexList pool;
        pool.reserve(alive_count);
        for (std::size_t k = 0; k < n; ++k)
            if (alive[k]) pool.push_back(k);

        std::vector<Trial> trials(static_cast<std::size_t>(params.iterations));
        for (auto& t : trials) {
            const std::size_t a = pool[rng.below(pool.size())];
            if (local_sampling) {
                IndexList nb;
                for (std::size_t j : index.query(pts[a], params.sample_radius))
                    if (alive[j] && j != a) nb.push_back(j);
                if (nb.size() < 2) continue;
                const std::size_t ib = rng.below(nb.size());
                std::size_t ic = rng.below(nb.size() - 1);
                if (ic >= ib) ++ic;
                t.sample = {a, nb[ib], nb[ic]};
            } else {
                // pool positions distinct from a
                std::size_t ib = rng.below(pool.size() - 1);
                std::size_t ic = rng.below(pool.size() - 2);
                const std::size_t ia = static_cast<std::size_t>(
                    std::lower_bound(pool.begin(), pool.end(), a) - pool.begin());
                if (ib >= ia) ++ib;
                const std::size_t lo = std::min(ia, ib), hi = std::max(ia, ib);
                if (ic >= lo) ++ic;
                if (ic >= hi) ++ic;
                t.sample = {a, pool[ib], pool[ic]};
            }
            t.drawn = true;
        }

        std::vector<Scored> scored(trials.size());
        const auto nt = static_cast<std::ptrdiff_t>(trials.size());
        if (exec == Exec::Serial) {
            for (std::ptrdiff_t i = 0; i < nt; ++i)
                scored[i] = score_trial(trials[i], pts, alive, index, params, kind);
        } else {
#pragma omp parallel for schedule(dynamic, 8)
            for (std::ptrdiff_t i = 0; i < nt; ++i)
                scored[i] = score_trial(trials[i], pts, alive, index, params, kind);
        }

        std::size_t best = trials.size();
        for (std::size_t i = 0; i < scored.size(); ++i)
            if (scored[i].circle && (best == trials.size() || scored[i].inliers > scored[best].inliers)) best = i;
        if (best == trials.size() || scored[best].inliers < need) break;

        CircleInstance inst;
        inst.candidate = *scored[best].circle;
        IndexList members = inliers_of(inst.candidate, params.inlier_tol, index, pts, alive);

        auto refit_on = [&](const IndexList& m) {
            std::vector<Point3> mp;
            std::vector<double> mw;
            for (std::size_t k : m) {
                mp.push_back(pts[k]);
                mw.push_back(detection.probabilities[k]);
            }
            return fit_circle_3d(mp, mw, kind);
        };
        try {
            Fit3D refit = refit_on(members);
            // grow the consensus set with the refit circle until it stops changing
            for (int round = 0; round < kRefitRounds; ++round) {
                IndexList grown = inliers_of(refit.circle, params.inlier_tol, index, pts, alive);
                IndexList merged;
                std::set_union(members.begin(), members.end(), grown.begin(), grown.end(),
                               std::back_inserter(merged));
                if (merged.size() == members.size()) break;
                members = std::move(merged);
                refit = refit_on(members);
            }
            inst.circle = refit.circle;
            inst.diagnostics = refit.diag;
        } catch (const Error&) {
            inst.circle = inst.candidate;
            inst.diagnostics.condition = Condition::NearDegenerate;
        }
        for (std::size_t k : members) {
            alive[k] = 0;
            inst.inlier_indices.push_back(detection.indices[k]);
        }
        alive_count -= members.size();
        if (!(inst.circle.radius() <= params.max_radius)) continue;
        std::sort(inst.inlier_indices.begin(), inst.inlier_indices.end());
        found.push_back(std::move(inst));
    }

    std::stable_sort(found.begin(), found.end(), [](const CircleInstance& a, const CircleInstance& b) {
        return a.inlier_indices.size() > b.inlier_indices.size();
    });
    return found;
}

std::vector<Pairing> match_instances(std::span<const Circle3D> found, std::span<const Circle3D> truth,
                                     double center_tol) {
    if (!(center_tol > 0.0)) throw InvalidArgument("center_tol must be positive");
    std::vector<Pairing> all;
    all.reserve(found.size() * truth.size());
    for (std::size_t i = 0; i < found.size(); ++i)
        for (std::size_t j = 0; j < truth.size(); ++j)
            all.push_back({i, j, (found[i].center() - truth[j].center()).norm()});
    std::sort(all.begin(), all.end(), [](const Pairing& a, const Pairing& b) {
        return std::tie(a.distance, a.found, a.truth) < std::tie(b.distance, b.found, b.truth);
    });
    std::vector<std::uint8_t> used_f(found.size(), 0), used_t(truth.size(), 0);
    std::vector<Pairing> out;
    for (const auto& p : all) {
        if (p.distance > center_tol) break;
        if (used_f[p.found] || used_t[p.truth]) continue;
        used_f[p.found] = used_t[p.truth] = 1;
        out.push_back(p);
    }
    std::sort(out.begin(), out.end(), [](const Pairing& a, const Pairing& b) { return a.found < b.found; });
    return out;
}

std::vector<Circle3D> circles_of(std::span<const CircleInstance> instances) {
    std::vector<Circle3D> out;
    out.reserve(instances.size());
    for (const auto& i : instances) out.push_back(i.circle);
    return out;
}

}  // namespace arcfit
