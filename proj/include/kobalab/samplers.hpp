#pragma once

#include <utility>

#include "kobalab/pseudodistance.hpp"
#include "kobalab/sampling.hpp"

namespace kobalab {

// Pair family stratified by boundary depth and by pseudodistance-to-depth
// ratio. Keeping M(x,y)/h inside a fixed range across depth buckets makes
// the per-bucket statistics comparable as h shrinks; without that control
// the comparison bands mix regimes and the slope tests measure the sampler
// instead of the geometry.
struct PairFamilyConfig {
    double h = 1e-3;            // bucket depth
    double depth_jitter = 2.0;  // endpoint depths are h * U[1, jitter]
    double ratio_min = 0.5;     // target M/h range for lateral pairs
    double ratio_max = 16.0;
    double fiber_depth_ratio = 32.0;  // max depth ratio for fiber pairs
    double lateral_fraction = 0.5;    // share of lateral (feet-separated) pairs
    double patch_radius = 0.15;
};

// Tangential unit direction at the boundary point p.
inline CVec tangent_direction(const ConvexDomain& dom, const CPoint& p, Rng& rng) {
    const CVec nrm = outward_normal(dom, p);
    for (int attempt = 0; attempt < 16; ++attempt) {
        CVec t = to_complex(rng.sphere(2 * dom.dim()));
        t -= hdot(t, nrm) * nrm;
        const double nn = t.norm();
        if (nn > 1e-6) return t / nn;
    }
    throw NumericalError("tangent_direction: degenerate draws");
}

// Boundary point displaced a Euclidean distance s from p along the
// tangential direction, reprojected through the origin ray.
inline CPoint displaced_boundary_point(const ConvexDomain& dom, const CPoint& p, const CVec& tang,
                                       double s) {
    const CPoint probe = p + s * tang;
    const double t = ray_level_root(dom, CPoint(CPoint::Zero(dom.dim())), probe, 0.0);
    return t * unit(probe);
}

// Fiber point whose foot sits at the tangential displacement where the
// Taylor gauge of M against the base point reaches the target (clamped to
// the patch and the chart).
inline CPoint lateral_partner(const ConvexDomain& dom, const TaylorGauge& gauge, const CPoint& p,
                              const CVec& tang, double target, double hy, double s_max) {
    const auto y_at = [&](double s) {
        return fiber_point(dom, displaced_boundary_point(dom, p, tang, s), hy);
    };
    double lo = 1e-9, hi = s_max;
    if (gauge(y_at(hi)) <= target) return y_at(hi);
    if (gauge(y_at(lo)) >= target) return y_at(lo);
    for (int i = 0; i < 40; ++i) {
        const double mid = std::sqrt(lo * hi);
        if (gauge(y_at(mid)) < target)
            lo = mid;
        else
            hi = mid;
        if (hi / lo < 1.0 + 1e-6) break;
    }
    return y_at(hi);
}

inline std::pair<CPoint, CPoint> draw_pair(const ConvexDomain& dom, const PairFamilyConfig& cfg,
                                           Rng& rng) {
    const BoundaryPatch patch = BoundaryPatch::pole(dom.dim(), cfg.patch_radius);
    const CPoint p = boundary_point(dom, patch, rng);
    const double h_cap = dom.spec().h_max;
    const double hx = std::min(cfg.h * rng.uniform(1.0, cfg.depth_jitter), h_cap);
    const CPoint x = fiber_point(dom, p, hx);

    if (rng.uniform() >= cfg.lateral_fraction) {
        // fiber pair: same foot, depths separated by a controlled ratio
        const double hy = std::min(hx * rng.log_uniform(1.0, cfg.fiber_depth_ratio), h_cap);
        return {x, fiber_point(dom, p, hy)};
    }

    // lateral pair: separate the feet until the Taylor gauge of M reaches
    // the target ratio (clamped so the pair stays inside the chart)
    const double target =
        std::min(hx * rng.log_uniform(cfg.ratio_min, cfg.ratio_max), 0.4 * dom.spec().eps_max);
    const TaylorGauge gauge = make_taylor_gauge(dom, x);
    const CVec tang = tangent_direction(dom, p, rng);
    const double hy = std::min(cfg.h * rng.uniform(1.0, cfg.depth_jitter), h_cap);
    return {x, lateral_partner(dom, gauge, p, tang, target, hy, 2.0 * cfg.patch_radius)};
}

// Point cloud for the four-point and triangle statistics: a base point at
// bucket depth plus partners whose pseudodistances to it are targeted
// multiples of the depth, so the whole configuration is self-similar
// across buckets.
inline std::vector<CPoint> draw_cluster(const ConvexDomain& dom, const PairFamilyConfig& cfg,
                                        int partners, double ratio_lo, double ratio_hi,
                                        Rng& rng) {
    const BoundaryPatch patch = BoundaryPatch::pole(dom.dim(), cfg.patch_radius);
    const CPoint p = boundary_point(dom, patch, rng);
    const double h_cap = dom.spec().h_max;
    const double hx = std::min(cfg.h * rng.uniform(1.0, cfg.depth_jitter), h_cap);
    const CPoint x = fiber_point(dom, p, hx);
    const TaylorGauge gauge = make_taylor_gauge(dom, x);

    std::vector<CPoint> cloud{x};
    for (int k = 0; k < partners; ++k) {
        const double hy = std::min(cfg.h * rng.uniform(1.0, cfg.depth_jitter), h_cap);
        if (rng.uniform() < cfg.lateral_fraction) {
            const double target =
                std::min(hx * rng.log_uniform(ratio_lo, ratio_hi), 0.4 * dom.spec().eps_max);
            const CVec tang = tangent_direction(dom, p, rng);
            cloud.push_back(
                lateral_partner(dom, gauge, p, tang, target, hy, 2.0 * cfg.patch_radius));
        } else {
            const double hd =
                std::min(hx * rng.log_uniform(1.0, cfg.fiber_depth_ratio), h_cap);
            cloud.push_back(fiber_point(dom, p, hd));
        }
    }
    return cloud;
}

}  // namespace kobalab
