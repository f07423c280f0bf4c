#pragma once

#include "kobalab/domain.hpp"
#include "kobalab/errors.hpp"
#include "kobalab/geometry.hpp"
#include "kobalab/rng.hpp"

namespace kobalab {

// A boundary patch is described by the ray direction (from the origin
// anchor) of its center and a Euclidean radius of the tangential offsets.
struct BoundaryPatch {
    CVec center_dir;
    double radius = 0.15;

    static BoundaryPatch pole(int n, double radius = 0.15) {
        BoundaryPatch p;
        p.center_dir = CVec::Zero(n);
        p.center_dir[0] = 1.0;
        p.radius = radius;
        return p;
    }
};

inline CVec outward_normal(const ConvexDomain& dom, const CPoint& p) {
    const REval ev = dom.eval(p, false);
    const double gn = ev.grad.norm();
    if (gn <= 0) throw NumericalError("outward_normal: vanishing gradient");
    return ev.grad / gn;
}

inline CPoint patch_center(const ConvexDomain& dom, const BoundaryPatch& patch) {
    const CPoint origin = CPoint::Zero(dom.dim());
    const double t = ray_level_root(dom, origin, patch.center_dir, 0.0);
    return t * unit(patch.center_dir);
}

// Random boundary point: tangential offset at the patch center, reprojected
// to the boundary along the ray from the origin.
inline CPoint boundary_point(const ConvexDomain& dom, const BoundaryPatch& patch, Rng& rng) {
    const int n = dom.dim();
    const CPoint c = patch_center(dom, patch);
    const CVec nrm = outward_normal(dom, c);
    RVec w = rng.sphere(2 * n);
    const double s = patch.radius * std::pow(rng.uniform(), 1.0 / (2.0 * n - 1.0));
    CVec offset = to_complex(RVec(s * w));
    // remove the normal component so the offset is tangential
    offset -= hdot(offset, nrm) * nrm;
    const CPoint probe = c + offset;
    const double t = ray_level_root(dom, CPoint(CPoint::Zero(n)), probe, 0.0);
    return t * unit(probe);
}

// x = p - h * n(p); exact depth h inside the normal tube.
inline CPoint fiber_point(const ConvexDomain& dom, const CPoint& p, double h) {
    const CVec nrm = outward_normal(dom, p);
    const CPoint x = p - h * nrm;
    if (dom.r(x) >= 0) throw ArgumentError("fiber_point: depth too large for this patch");
    return x;
}

}  // namespace kobalab
