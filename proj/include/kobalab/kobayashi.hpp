#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kobalab/domain.hpp"
#include "kobalab/geometry.hpp"

namespace kobalab {

// Piecewise-straight interior path. On a convex domain every segment
// between interior knots stays interior.
struct Path {
    std::vector<CPoint> knots;

    double euclid_length() const {
        double s = 0;
        for (std::size_t i = 0; i + 1 < knots.size(); ++i) s += (knots[i + 1] - knots[i]).norm();
        return s;
    }
};

struct BoundPair {
    double lo = 0;
    double hi = 0;
};

struct SandwichOptions {
    double quad_rel_tol = 1e-4;  // refinement-doubling stop
    int quad_init = 8;           // initial intervals per segment
    int quad_cap = 1 << 14;      // points-per-segment cap
    double slice_tol = 1e-6;     // relative accuracy of the boundary-distance queries
    bool height_search = true;   // optimize the almost-geodesic lift level
    bool knot_refine = true;     // coordinate descent on interior knots
    int refine_passes = 4;

    // cheaper settings for bulk statistics (hyperbolicity scans)
    static SandwichOptions bulk() {
        SandwichOptions o;
        o.quad_rel_tol = 1e-3;
        o.quad_init = 4;
        o.slice_tol = 1e-4;
        o.height_search = false;
        o.knot_refine = false;
        return o;
    }
};

// Pointwise bounds |v|/(2 delta(z,v)) <= k(z;v) <= |v|/delta(z,v).
BoundPair infinitesimal_bounds(const ConvexDomain& dom, const CPoint& z, const CVec& v);

// Composite-trapezoid quadrature of the infinitesimal bounds along each
// segment, doubled until the relative change drops below quad_rel_tol; the
// last Richardson increment is added as safety margin.
BoundPair path_length_bounds(const ConvexDomain& dom, const Path& path,
                             const SandwichOptions& opts = {});

// Candidate quasi-geodesic: endpoints lifted along inward normals to the
// comparison level, straight segments in between. Falls back to the
// straight segment when a lift cannot reach its level.
Path almost_geodesic(const ConvexDomain& dom, const CPoint& x, const CPoint& y,
                     const SandwichOptions& opts = {});

struct DistanceSandwich {
    double k_lo = 0;
    double k_up = 0;
    double g = 0;        // sandwich function value
    double m = 0;        // pseudodistance M(x, y)
    int case_tag = 0;    // 1: M <= |r| max, 2: otherwise
    Path witness;        // path realizing k_up
    struct Components {
        double est3 = 0;             // 1/2 log(1 + |x-y|/min section distance)
        double est4 = 0;             // 1/2 |log(delta_x/delta_y)|
        double est2_diag = 0;        // constant-free two-log expression (diagnostic only)
        double straight = 0;         // L_up of the straight segment
        double almost_geodesic = 0;  // L_up of the lifted path
    } components;
};

DistanceSandwich distance_sandwich(const ConvexDomain& dom, const CPoint& x, const CPoint& y,
                                   const SandwichOptions& opts = {},
                                   const std::vector<Path>* extra_paths = nullptr);

// Minimum certified lower bound over samples of the polydisk shell
// boundary(P(x, c|r(x)|)) intersected with the domain.
double polydisk_separation(const ConvexDomain& dom, const CPoint& x, double c, int samples,
                           std::uint64_t seed);

}  // namespace kobalab
