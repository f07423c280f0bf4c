#include "kobalab/experiments.hpp"

#include "kobalab/errors.hpp"
#include "kobalab/parallel.hpp"
#include "kobalab/pseudodistance.hpp"

namespace kobalab {

std::vector<SandwichRow> sandwich_scan(const ConvexDomain& dom, const SandwichScanConfig& cfg) {
    if (cfg.pairs <= 0) throw ConfigError("sandwich_scan: pairs must be >= 1");
    if (cfg.depth_grid.empty()) throw ConfigError("sandwich_scan: empty depth grid");
    for (double h : cfg.depth_grid)
        if (h <= 0 || h > dom.spec().h_max)
            throw ConfigError("sandwich_scan: depth grid outside (0, h_max]");

    const int buckets = static_cast<int>(cfg.depth_grid.size());
    std::vector<SandwichRow> rows(static_cast<std::size_t>(cfg.pairs));
    parallel_for(cfg.pairs, [&](int i) {
        Rng rng(cfg.seed, 503, static_cast<std::uint64_t>(i));
        PairFamilyConfig family = cfg.family;
        family.h = cfg.depth_grid[static_cast<std::size_t>(i % buckets)];
        const auto [x, y] = draw_pair(dom, family, rng);
        const DistanceSandwich s = distance_sandwich(dom, x, y, cfg.sandwich);
        SandwichRow& row = rows[static_cast<std::size_t>(i)];
        row.pair_id = i;
        row.h = family.h;
        row.x = x;
        row.y = y;
        row.delta_x = boundary_distance(dom, x).delta;
        row.delta_y = boundary_distance(dom, y).delta;
        row.m = s.m;
        row.g = s.g;
        row.k_lo = s.k_lo;
        row.k_up = s.k_up;
        row.case_tag = s.case_tag;
    });
    return rows;
}

SeparationReport separation_scan(const ConvexDomain& dom, const SeparationConfig& cfg) {
    if (cfg.shell_samples <= 0 || cfg.anchors_per_bucket <= 0)
        throw ConfigError("separation_scan: counts must be >= 1");
    SeparationReport rep;
    const int buckets = static_cast<int>(cfg.depth_grid.size());
    const int total = buckets * cfg.anchors_per_bucket;
    std::vector<double> floors(static_cast<std::size_t>(total));
    parallel_for(total, [&](int i) {
        const double h = cfg.depth_grid[static_cast<std::size_t>(i % buckets)];
        Rng rng(cfg.seed, 509, static_cast<std::uint64_t>(i));
        const BoundaryPatch patch = BoundaryPatch::pole(dom.dim(), cfg.patch_radius);
        const CPoint p = boundary_point(dom, patch, rng);
        const CPoint x = fiber_point(dom, p, h);
        floors[static_cast<std::size_t>(i)] =
            polydisk_separation(dom, x, cfg.c, cfg.shell_samples, cfg.seed + 1000 + i);
    });
    for (int b = 0; b < buckets; ++b) {
        double floor = floors[static_cast<std::size_t>(b)];
        for (int a = 0; a < cfg.anchors_per_bucket; ++a)
            floor = std::min(floor, floors[static_cast<std::size_t>(a * buckets + b)]);
        rep.bucket_h.push_back(cfg.depth_grid[static_cast<std::size_t>(b)]);
        rep.bucket_floor.push_back(floor);
    }
    return rep;
}

}  // namespace kobalab
