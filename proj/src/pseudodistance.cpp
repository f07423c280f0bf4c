#include "kobalab/pseudodistance.hpp"

#include <algorithm>
#include <cmath>

#include "kobalab/errors.hpp"
#include "kobalab/parallel.hpp"

namespace kobalab {

TaylorData taylor_data(const ConvexDomain& dom, const MinimalFrame& frame) {
    const int n = dom.dim();
    const int L = dom.spec().type_bound;
    TaylorData td;
    td.base = frame.q;
    td.type_bound = L;
    for (int i = 1; i < n; ++i) {
        const std::vector<double> p = dom.axis_poly(frame.q, frame.basis[i]);
        std::vector<double> a(static_cast<std::size_t>(L - 1), 0.0);
        double amax = 0;
        for (int k = 2; k <= L; ++k) {
            const double c = k < static_cast<int>(p.size()) ? std::abs(p[k]) : 0.0;
            a[k - 2] = c;
            amax = std::max(amax, c);
        }
        if (amax <= 1e-14)
            throw NumericalError("taylor_data: all axis coefficients vanish (type bound violated)",
                                 "axis " + std::to_string(i + 1));
        td.coefficients.push_back(std::move(a));
    }
    return td;
}

double pseudo_distance_inf(const ConvexDomain& dom, const CPoint& x, const CPoint& y) {
    if ((x - y).norm() == 0) return 0.0;
    const double eps_max = dom.spec().eps_max;
    double hi = eps_max;
    if (!polydisk_membership(build_minimal_frame(dom, x, hi), y))
        throw OutOfChartError("pseudo_distance_inf: y lies outside P(x, eps_max)");
    double lo = 1e-14;
    if (polydisk_membership(build_minimal_frame(dom, x, lo), y)) return lo;
    // log-space bisection; membership is monotone because every tau_i
    // increases with eps
    for (int it = 0; it < 60 && hi / lo > 1.0 + 1e-8; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (polydisk_membership(build_minimal_frame(dom, x, mid), y))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double TaylorGauge::operator()(const CPoint& y) const {
    const int n = static_cast<int>(frame.basis.size());
    double m = std::abs(frame.coord(y, 0));
    for (int i = 1; i < n; ++i) {
        const double d = std::abs(frame.coord(y, i));
        double dk = d;  // d^k, starting at k=2 below
        for (int k = 2; k <= data.type_bound; ++k) {
            dk *= d;
            m += data.coefficients[i - 1][k - 2] * dk;
        }
    }
    return m;
}

TaylorGauge make_taylor_gauge(const ConvexDomain& dom, const CPoint& x) {
    const double rx = dom.r(x);
    if (rx >= 0) throw ArgumentError("taylor gauge: base point is not interior");
    TaylorGauge tg;
    // frame at the natural height |r(x)|
    tg.frame = build_minimal_frame(dom, x, std::min(-rx, dom.spec().eps_max));
    tg.data = taylor_data(dom, tg.frame);
    return tg;
}

double pseudo_distance_taylor(const ConvexDomain& dom, const CPoint& x, const CPoint& y) {
    if ((x - y).norm() == 0) return 0.0;
    return make_taylor_gauge(dom, x)(y);
}

namespace {

struct TripleSample {
    CPoint x, y, z;
};

TripleSample draw_triple(const ConvexDomain& dom, const CalibrationConfig& cfg,
                         std::uint64_t seed, int index) {
    Rng rng(seed, 101, static_cast<std::uint64_t>(index));
    const BoundaryPatch patch = BoundaryPatch::pole(dom.dim(), cfg.patch_radius);
    TripleSample t;
    CPoint* out[3] = {&t.x, &t.y, &t.z};
    for (auto* p : out) {
        const CPoint b = boundary_point(dom, patch, rng);
        const double h = rng.log_uniform(cfg.h_min, cfg.h_max);
        *p = fiber_point(dom, b, h);
    }
    return t;
}

double worst_quasi_ratio(const ConvexDomain& dom, const CalibrationConfig& cfg,
                         std::uint64_t seed) {
    std::vector<double> worst(static_cast<std::size_t>(cfg.sample_count), 1.0);
    parallel_for(cfg.sample_count, [&](int i) {
        const TripleSample t = draw_triple(dom, cfg, seed, i);
        double w = 1.0;
        try {
            const double mxy = pseudo_distance_inf(dom, t.x, t.y);
            const double myx = pseudo_distance_inf(dom, t.y, t.x);
            if (myx > 0 && mxy > 0) {
                w = std::max(w, mxy / myx);
                w = std::max(w, myx / mxy);
            }
            const double mxz = pseudo_distance_inf(dom, t.x, t.z);
            const double mzy = pseudo_distance_inf(dom, t.z, t.y);
            if (mxz + mzy > 0) w = std::max(w, mxy / (mxz + mzy));
        } catch (const OutOfChartError&) {
            // pair left the chart; skip the sample
        }
        worst[static_cast<std::size_t>(i)] = w;
    });
    double c = 1.0;
    for (double w : worst) c = std::max(c, w);
    return c;
}

}  // namespace

PseudoCalibration calibrate(const ConvexDomain& dom, const CalibrationConfig& cfg) {
    if (cfg.sample_count < 100)
        throw ArgumentError("calibrate: sample_count must be at least 100");
    PseudoCalibration out;
    out.c_quasi = worst_quasi_ratio(dom, cfg, cfg.seed);
    out.eps0 = std::log(2.0) / (2.0 * std::log(2.0 * out.c_quasi));
    out.sample_count = cfg.sample_count;
    out.chart = dom.spec().label() + ",h_max=" + std::to_string(cfg.h_max);
    return out;
}

double quasi_ratio_retest(const ConvexDomain& dom, const CalibrationConfig& cfg) {
    return worst_quasi_ratio(dom, cfg, cfg.seed);
}

bool power_chain_check(const PseudoCalibration& calib, const ConvexDomain& dom,
                       const std::vector<CPoint>& chain, double eps) {
    if (chain.size() < 3 || chain.size() > 34)
        throw ArgumentError("power_chain_check: chain must have k+2 points, 1 <= k <= 32");
    if (eps > calib.eps0 + 1e-15)
        throw ArgumentError("power_chain_check: eps exceeds the calibrated eps0");
    const double lhs = std::pow(pseudo_distance_inf(dom, chain.front(), chain.back()), eps);
    double rhs = 0;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
        rhs += std::pow(pseudo_distance_inf(dom, chain[i], chain[i + 1]), eps);
    return lhs <= 2.0 * rhs;
}

double g_from_parts(double m, double dx, double dy) {
    return std::log((m + std::max(dx, dy)) / std::sqrt(dx * dy));
}

double g_value(const ConvexDomain& dom, const CPoint& x, const CPoint& y) {
    const double m = pseudo_distance_inf(dom, x, y);
    const double dx = boundary_distance(dom, x).delta;
    const double dy = boundary_distance(dom, y).delta;
    return g_from_parts(m, dx, dy);
}

double g1_value(const ConvexDomain& dom, const CPoint& x, const CPoint& y) {
    const double m = pseudo_distance_inf(dom, x, y);
    return g_from_parts(m, std::abs(dom.r(x)), std::abs(dom.r(y)));
}

}  // namespace kobalab
