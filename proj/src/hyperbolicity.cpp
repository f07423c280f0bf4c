#include "kobalab/hyperbolicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kobalab/errors.hpp"
#include "kobalab/parallel.hpp"
#include "kobalab/stats.hpp"

namespace kobalab {

namespace {

Interval sandwich_interval(const ConvexDomain& dom, const CPoint& x, const CPoint& y,
                           const SandwichOptions& opts) {
    if ((x - y).norm() == 0) return {0, 0};
    const DistanceSandwich s = distance_sandwich(dom, x, y, opts);
    return {s.k_lo, s.k_up};
}

struct Quadruple {
    CPoint x, y, z, w;
    double h = 0;
};

// Quadruple clustered at the bucket scale: y, z are partners of x with
// pseudodistance a bounded multiple of the depth, w is a deeper anchor at
// the same scale. Self-similarity across buckets keeps the per-bucket
// statistics comparable.
Quadruple draw_quadruple(const ConvexDomain& dom, const ScanConfig& cfg, double h,
                         std::uint64_t seed, int index) {
    Rng rng(seed, 307, static_cast<std::uint64_t>(index));
    Quadruple q;
    q.h = h;

    const BoundaryPatch patch = BoundaryPatch::pole(dom.dim(), cfg.patch_radius);
    const double h_cap = dom.spec().h_max;
    const CPoint p = boundary_point(dom, patch, rng);
    const double hx = std::min(h * rng.uniform(1.0, 2.0), h_cap);
    q.x = fiber_point(dom, p, hx);
    const TaylorGauge gauge = make_taylor_gauge(dom, q.x);
    const double chart_cap = 0.4 * dom.spec().eps_max;

    for (CPoint* out : {&q.y, &q.z}) {
        const double hy = std::min(h * rng.uniform(1.0, 2.0), h_cap);
        if (rng.uniform() < 0.5) {
            const double target = std::min(hx * rng.log_uniform(0.5, cfg.ratio_max), chart_cap);
            const CVec tang = tangent_direction(dom, p, rng);
            *out = lateral_partner(dom, gauge, p, tang, target, hy, 2.0 * cfg.patch_radius);
        } else {
            *out = fiber_point(dom, p, std::min(hx * rng.log_uniform(1.0, 32.0), h_cap));
        }
    }

    const double hw = std::min(h * rng.uniform(8.0, 32.0), h_cap);
    const double target_w = std::min(hx * rng.log_uniform(8.0, cfg.anchor_ratio), chart_cap);
    const CVec tang_w = tangent_direction(dom, p, rng);
    q.w = lateral_partner(dom, gauge, p, tang_w, target_w, hw, 2.0 * cfg.patch_radius);
    return q;
}

DefectReport summarize(const ScanConfig& cfg, const std::vector<ScanRow>& rows) {
    DefectReport rep;
    rep.sample_count = static_cast<int>(rows.size());
    rep.seed = cfg.seed;
    std::vector<double> uppers;
    double wsum = 0;
    for (const ScanRow& r : rows) {
        uppers.push_back(r.value_hi);
        wsum += r.width_sum;
        rep.width_max = std::max(rep.width_max, r.width_sum);
    }
    if (!rows.empty()) rep.width_mean = wsum / static_cast<double>(rows.size());
    rep.q50 = quantile(uppers, 0.50);
    rep.q95 = quantile(uppers, 0.95);
    rep.q100 = quantile(uppers, 1.00);

    std::vector<double> log_inv_h;
    for (double h : cfg.depth_grid) {
        double mx = -std::numeric_limits<double>::infinity();
        bool any = false;
        for (const ScanRow& r : rows) {
            if (r.h == h) {
                mx = std::max(mx, r.value_hi);
                any = true;
            }
        }
        if (any) {
            rep.bucket_h.push_back(h);
            rep.bucket_max.push_back(mx);
            log_inv_h.push_back(std::log(1.0 / h));
        }
    }
    rep.slope = ols_slope(log_inv_h, rep.bucket_max);
    return rep;
}

}  // namespace

Interval gromov_product_interval(const ConvexDomain& dom, const CPoint& x, const CPoint& y,
                                 const CPoint& w, const SandwichOptions& opts) {
    const Interval kxw = sandwich_interval(dom, x, w, opts);
    const Interval kwy = sandwich_interval(dom, w, y, opts);
    const Interval kxy = sandwich_interval(dom, x, y, opts);
    return 0.5 * (kxw + kwy - kxy);
}

DefectReport four_point_scan(const ConvexDomain& dom, const ScanConfig& cfg,
                             std::vector<ScanRow>* rows_out) {
    const int buckets = static_cast<int>(cfg.depth_grid.size());
    if (buckets == 0 || cfg.count <= 0)
        throw ArgumentError("four_point_scan: needs a depth grid and a positive count");
    std::vector<ScanRow> rows(static_cast<std::size_t>(cfg.count));
    parallel_for(cfg.count, [&](int i) {
        const double h = cfg.depth_grid[static_cast<std::size_t>(i % buckets)];
        const Quadruple q = draw_quadruple(dom, cfg, h, cfg.seed, i);
        // six pairwise sandwiches feed the three products
        const Interval kxw = sandwich_interval(dom, q.x, q.w, cfg.sandwich);
        const Interval kyw = sandwich_interval(dom, q.y, q.w, cfg.sandwich);
        const Interval kzw = sandwich_interval(dom, q.z, q.w, cfg.sandwich);
        const Interval kxy = sandwich_interval(dom, q.x, q.y, cfg.sandwich);
        const Interval kxz = sandwich_interval(dom, q.x, q.z, cfg.sandwich);
        const Interval kzy = sandwich_interval(dom, q.z, q.y, cfg.sandwich);
        const Interval pxy = 0.5 * (kxw + kyw - kxy);
        const Interval pxz = 0.5 * (kxw + kzw - kxz);
        const Interval pzy = 0.5 * (kzw + kyw - kzy);
        const Interval defect = imin(pxz, pzy) - pxy;
        ScanRow& row = rows[static_cast<std::size_t>(i)];
        row.sample_id = i;
        row.h = h;
        row.value_lo = defect.lo;
        row.value_hi = defect.hi;
        row.width_sum = kxw.width() + kyw.width() + kzw.width() + kxy.width() + kxz.width() +
                        kzy.width();
    });
    if (rows_out) *rows_out = rows;
    return summarize(cfg, rows);
}

namespace {

std::vector<CPoint> discretize_path(const Path& path, int points) {
    std::vector<CPoint> out;
    const double total = path.euclid_length();
    if (path.knots.size() < 2 || total == 0) {
        out.assign(static_cast<std::size_t>(points), path.knots.front());
        return out;
    }
    for (int k = 0; k < points; ++k) {
        double target = total * static_cast<double>(k) / (points - 1);
        CPoint at = path.knots.front();
        for (std::size_t i = 0; i + 1 < path.knots.size(); ++i) {
            const double seg = (path.knots[i + 1] - path.knots[i]).norm();
            if (target <= seg || i + 2 == path.knots.size()) {
                const double t = seg > 0 ? std::min(1.0, target / seg) : 0.0;
                at = path.knots[i] + t * (path.knots[i + 1] - path.knots[i]);
                break;
            }
            target -= seg;
        }
        out.push_back(at);
    }
    return out;
}

// upper bound of the distance between two nearby interior points: straight
// segment with minimal quadrature settings
double cheap_straight_up(const ConvexDomain& dom, const CPoint& a, const CPoint& b) {
    if ((a - b).norm() == 0) return 0;
    SandwichOptions o;
    o.quad_init = 4;
    o.quad_rel_tol = 2e-3;
    o.slice_tol = 2e-3;
    const Path seg{{a, b}};
    return path_length_bounds(dom, seg, o).hi;
}

}  // namespace

double thin_triangle_defect(const ConvexDomain& dom, const CPoint& x, const CPoint& y,
                            const CPoint& z, const SandwichOptions& opts) {
    constexpr int kSidePoints = 64;
    const Path sides[3] = {distance_sandwich(dom, x, y, opts).witness,
                           distance_sandwich(dom, y, z, opts).witness,
                           distance_sandwich(dom, x, z, opts).witness};
    std::vector<CPoint> pts[3];
    std::vector<double> depth[3];
    for (int s = 0; s < 3; ++s) {
        pts[s] = discretize_path(sides[s], kSidePoints);
        for (const CPoint& p : pts[s]) depth[s].push_back(boundary_distance(dom, p).delta);
    }

    double defect = 0;
    for (int s = 0; s < 3; ++s) {
        for (int iu = 0; iu < kSidePoints; ++iu) {
            const CPoint& u = pts[s][static_cast<std::size_t>(iu)];
            const double du = depth[s][static_cast<std::size_t>(iu)];
            // candidate target points on the other two sides, ranked by a
            // cheap two-log proxy of the distance
            std::vector<std::pair<double, std::pair<int, int>>> order;
            for (int t = 0; t < 3; ++t) {
                if (t == s) continue;
                for (int iw = 0; iw < kSidePoints; ++iw) {
                    const double dw = depth[t][static_cast<std::size_t>(iw)];
                    const double eu = (u - pts[t][static_cast<std::size_t>(iw)]).norm();
                    const double proxy =
                        0.5 * std::log1p(eu / du) + 0.5 * std::log1p(eu / dw);
                    order.emplace_back(proxy, std::make_pair(t, iw));
                }
            }
            std::sort(order.begin(), order.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            double best = std::numeric_limits<double>::infinity();
            const int tries = std::min<std::size_t>(6, order.size());
            for (int k = 0; k < tries; ++k) {
                const auto [t, iw] = order[static_cast<std::size_t>(k)].second;
                best = std::min(best,
                                cheap_straight_up(dom, u, pts[t][static_cast<std::size_t>(iw)]));
            }
            defect = std::max(defect, best);
        }
    }
    return defect;
}

DefectReport thin_triangle_scan(const ConvexDomain& dom, const ScanConfig& cfg,
                                std::vector<ScanRow>* rows_out) {
    const int buckets = static_cast<int>(cfg.depth_grid.size());
    if (buckets == 0 || cfg.count <= 0)
        throw ArgumentError("thin_triangle_scan: needs a depth grid and a positive count");
    std::vector<ScanRow> rows(static_cast<std::size_t>(cfg.count));
    parallel_for(cfg.count, [&](int i) {
        const double h = cfg.depth_grid[static_cast<std::size_t>(i % buckets)];
        Rng rng(cfg.seed, 311, static_cast<std::uint64_t>(i));
        PairFamilyConfig pair_cfg;
        pair_cfg.h = h;
        pair_cfg.ratio_max = cfg.ratio_max;
        pair_cfg.patch_radius = cfg.patch_radius;
        const std::vector<CPoint> tri = draw_cluster(dom, pair_cfg, 2, 0.5, cfg.ratio_max, rng);
        ScanRow& row = rows[static_cast<std::size_t>(i)];
        row.sample_id = i;
        row.h = h;
        const double d = thin_triangle_defect(dom, tri[0], tri[1], tri[2], cfg.sandwich);
        row.value_lo = d;
        row.value_hi = d;
        row.width_sum = 0;
    });
    if (rows_out) *rows_out = rows;
    return summarize(cfg, rows);
}

double visibility_ratio(const ConvexDomain& dom, const CPoint& x, const CPoint& y,
                        const SandwichOptions& opts) {
    if ((x - y).norm() == 0) return std::numeric_limits<double>::infinity();
    const DistanceSandwich s = distance_sandwich(dom, x, y, opts);
    const std::vector<CPoint> samples = discretize_path(s.witness, 33);
    double peak = 0;
    for (const CPoint& p : samples) peak = std::max(peak, boundary_distance(dom, p).delta);
    return peak / s.m;
}

VisibilityReport visibility_scan(const ConvexDomain& dom, const ScanConfig& cfg,
                                 std::vector<ScanRow>* rows_out) {
    const int buckets = static_cast<int>(cfg.depth_grid.size());
    if (buckets == 0 || cfg.count <= 0)
        throw ArgumentError("visibility_scan: needs a depth grid and a positive count");
    std::vector<ScanRow> rows(static_cast<std::size_t>(cfg.count));
    parallel_for(cfg.count, [&](int i) {
        const double h = cfg.depth_grid[static_cast<std::size_t>(i % buckets)];
        Rng rng(cfg.seed, 313, static_cast<std::uint64_t>(i));
        PairFamilyConfig pair_cfg;
        pair_cfg.h = h;
        pair_cfg.ratio_min = 8.0;  // feet-separated pairs
        pair_cfg.ratio_max = std::max(64.0, cfg.ratio_max);
        pair_cfg.lateral_fraction = 1.0;
        pair_cfg.patch_radius = cfg.patch_radius;
        auto [x, y] = draw_pair(dom, pair_cfg, rng);
        ScanRow& row = rows[static_cast<std::size_t>(i)];
        row.sample_id = i;
        row.h = h;
        const double ratio = visibility_ratio(dom, x, y, cfg.sandwich);
        row.value_lo = ratio;
        row.value_hi = ratio;
    });
    if (rows_out) *rows_out = rows;

    VisibilityReport rep;
    std::vector<double> log_inv_h;
    for (double h : cfg.depth_grid) {
        double floor = std::numeric_limits<double>::infinity();
        bool any = false;
        for (const ScanRow& r : rows) {
            if (r.h == h && std::isfinite(r.value_hi)) {
                floor = std::min(floor, r.value_hi);
                any = true;
            }
        }
        if (any) {
            rep.bucket_h.push_back(h);
            rep.bucket_floor.push_back(floor);
            log_inv_h.push_back(std::log(1.0 / h));
        }
    }
    rep.slope = ols_slope(log_inv_h, rep.bucket_floor);
    return rep;
}

namespace {

// Boundary-fiber Gromov product through the sandwich-function proxy: each
// distance is replaced by g, the additively-sharp comparison value. The
// certified interval midpoints are unusable here: their upper sides carry
// direction-dependent slack that grows like log(1/h) along the fibers, so
// a fiber limit read from midpoints never stabilizes.
double g_product(const ConvexDomain& dom, const CPoint& x, const CPoint& y, const CPoint& w) {
    const double dx = boundary_distance(dom, x).delta;
    const double dy = boundary_distance(dom, y).delta;
    const double dw = boundary_distance(dom, w).delta;
    const double gxw = g_from_parts(pseudo_distance_inf(dom, x, w), dx, dw);
    const double gwy = g_from_parts(pseudo_distance_inf(dom, w, y), dw, dy);
    const double gxy = g_from_parts(pseudo_distance_inf(dom, x, y), dx, dy);
    return 0.5 * (gxw + gwy - gxy);
}

}  // namespace

std::vector<VisualRow> visual_metric_scan(const ConvexDomain& dom, const VisualConfig& cfg) {
    if (cfg.pairs <= 0) throw ArgumentError("visual_metric_scan: pairs must be positive");
    BoundaryPatch patch = BoundaryPatch::pole(dom.dim(), cfg.patch_radius);
    if (cfg.patch_center_dir.size() == dom.dim()) patch.center_dir = cfg.patch_center_dir;
    const CPoint center = patch_center(dom, patch);

    // base point omega: explicit, or a fiber point over the (optionally
    // displaced) patch center at fixed depth
    CPoint omega;
    if (cfg.omega_point) {
        omega = *cfg.omega_point;
        if (dom.r(omega) >= 0) throw ArgumentError("visual_metric_scan: omega is not interior");
    } else {
        CPoint omega_foot = center;
        if (cfg.omega_offset != 0) {
            Rng orng(cfg.seed, 401, 0);
            const CVec tang = tangent_direction(dom, center, orng);
            omega_foot = displaced_boundary_point(dom, center, tang, cfg.omega_offset);
        }
        omega = fiber_point(dom, omega_foot, cfg.omega_depth);
    }

    std::vector<VisualRow> rows(static_cast<std::size_t>(cfg.pairs));
    parallel_for(cfg.pairs, [&](int i) {
        Rng rng(cfg.seed, 403, static_cast<std::uint64_t>(i));
        VisualRow& row = rows[static_cast<std::size_t>(i)];
        CPoint xi = boundary_point(dom, patch, rng);
        CPoint eta = boundary_point(dom, patch, rng);
        for (int attempt = 0; attempt < 32 && (xi - eta).norm() < cfg.separation_min; ++attempt)
            eta = boundary_point(dom, patch, rng);
        row.xi = xi;
        row.eta = eta;
        for (double h : cfg.fiber_h) {
            const CPoint xh = fiber_point(dom, xi, h);
            const CPoint eh = fiber_point(dom, eta, h);
            row.products.push_back(g_product(dom, xh, eh, omega));
        }
        row.stable = true;
        for (std::size_t k = 0; k + 1 < row.products.size(); ++k)
            if (std::abs(row.products[k + 1] - row.products[k]) >= cfg.stability_tol)
                row.stable = false;
        row.product = row.products.back();
        const double h_star = cfg.fiber_h.back();
        row.m_matched = pseudo_distance_inf(dom, fiber_point(dom, xi, h_star),
                                            fiber_point(dom, eta, h_star));
        row.ratio_exp1 = std::exp(-row.product) / row.m_matched;
        row.ratio_exp2 = std::exp(-2.0 * row.product) / row.m_matched;
    });
    return rows;
}

}  // namespace kobalab
