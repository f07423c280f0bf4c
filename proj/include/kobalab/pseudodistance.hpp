#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kobalab/domain.hpp"
#include "kobalab/minimal_basis.hpp"
#include "kobalab/sampling.hpp"

namespace kobalab {

// Moduli of the one-variable Taylor coefficients of r along the frame axes
// e_2..e_n, orders 2..L.
struct TaylorData {
    CPoint base;
    int type_bound = 2;
    // a[i][k] = |coefficient of t^(k+2) along axis i+1| for i = 0..n-2
    std::vector<std::vector<double>> coefficients;
};

TaylorData taylor_data(const ConvexDomain& dom, const MinimalFrame& frame);

// M(x, y) = inf{eps > 0 : y in P(x, eps)} by bisection over the polydisk
// membership; relative tolerance 1e-8. Throws OutOfChartError when y lies
// outside P(x, eps_max).
double pseudo_distance_inf(const ConvexDomain& dom, const CPoint& x, const CPoint& y);

// Taylor-side evaluation: |x_1-y_1| + sum_{i>=2} sum_{k=2..L} a_ik |x_i-y_i|^k
// in the frame built at height |r(x)|.
double pseudo_distance_taylor(const ConvexDomain& dom, const CPoint& x, const CPoint& y);

// Frame and coefficients cached at a fixed base point, for evaluating the
// Taylor expression against many targets.
struct TaylorGauge {
    MinimalFrame frame;
    TaylorData data;
    double operator()(const CPoint& y) const;
};
TaylorGauge make_taylor_gauge(const ConvexDomain& dom, const CPoint& x);

struct PseudoCalibration {
    double c_quasi = 1;   // empirical quasi-metric constant, >= 1
    double eps0 = 0;      // log 2 / (2 log 2C)
    int sample_count = 0;
    std::string chart;
};

struct CalibrationConfig {
    double h_max = 0.1;
    double h_min = 1e-6;
    int sample_count = 1000;
    std::uint64_t seed = 42;
    double patch_radius = 0.15;
};

// Empirical quasi-metric constant over sampled pairs and triples drawn from
// the boundary-fiber measure, floored at 1.
PseudoCalibration calibrate(const ConvexDomain& dom, const CalibrationConfig& cfg);

// Worst symmetry/triangle ratio over a fresh sample (the re-test statistic).
double quasi_ratio_retest(const ConvexDomain& dom, const CalibrationConfig& cfg);

// M^eps(first, last) <= 2 * sum of consecutive M^eps along the chain.
bool power_chain_check(const PseudoCalibration& calib, const ConvexDomain& dom,
                       const std::vector<CPoint>& chain, double eps);

// g(x,y)  = log[(M + delta_x v delta_y) / sqrt(delta_x delta_y)]
// g1(x,y) = log[(M + |r(x)| v |r(y)|) / sqrt(|r(x) r(y)|)]
double g_value(const ConvexDomain& dom, const CPoint& x, const CPoint& y);
double g1_value(const ConvexDomain& dom, const CPoint& x, const CPoint& y);

// shared plumbing for g / g1 when M is already known
double g_from_parts(double m, double dx, double dy);

}  // namespace kobalab
