#pragma once

#include <vector>

#include "kobalab/domain.hpp"
#include "kobalab/geometry.hpp"

namespace kobalab {

// Orthonormal complex frame at q whose axis radii tau_i are the successive
// minimal distances to the level set {r = r(q) + eps}.
struct MinimalFrame {
    CPoint q;
    double eps = 0;
    std::vector<CVec> basis;  // e_1..e_n, Hermitian-orthonormal
    std::vector<double> tau;  // tau_1 <= ... <= tau_n

    // coordinate of y - q along axis i (0-based)
    std::complex<double> coord(const CPoint& y, int i) const {
        return hdot(y - q, basis[i]);
    }
};

MinimalFrame build_minimal_frame(const ConvexDomain& dom, const CPoint& q, double eps);

// Closed polydisk test: |<y - q, e_i>| <= tau_i for every axis.
bool polydisk_membership(const MinimalFrame& frame, const CPoint& y);

// Ratios tau_i(q, c*eps) / tau_i(q, eps) for each c in c_list.
std::vector<std::vector<double>> scaling_profile(const ConvexDomain& dom, const CPoint& q,
                                                 double eps,
                                                 const std::vector<double>& c_list);

// (sum_i |<v, e_i>| / tau_i)^(-1) for a unit vector v.
double harmonic_radius(const MinimalFrame& frame, const CVec& v);

}  // namespace kobalab
