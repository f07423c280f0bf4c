#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kobalab/interval.hpp"
#include "kobalab/kobayashi.hpp"
#include "kobalab/samplers.hpp"

namespace kobalab {

// (x|y)_w with every distance replaced by its sandwich interval.
Interval gromov_product_interval(const ConvexDomain& dom, const CPoint& x, const CPoint& y,
                                 const CPoint& w,
                                 const SandwichOptions& opts = SandwichOptions::bulk());

struct ScanConfig {
    int count = 1000;
    // shallowest bucket chosen so no ratio target hits the chart cap:
    // the buckets then carry identically-distributed configurations
    std::vector<double> depth_grid = {1e-3, 1e-4, 1e-5};
    std::uint64_t seed = 42;
    double patch_radius = 0.15;
    double ratio_max = 8.0;      // M/h targets for the near partners
    double anchor_ratio = 32.0;  // M/h target ceiling for the product anchor
    SandwichOptions sandwich = SandwichOptions::bulk();
};

struct ScanRow {
    int sample_id = 0;
    double h = 0;          // bucket depth
    double value_lo = 0;   // defect interval (degenerate for scalar defects)
    double value_hi = 0;
    double width_sum = 0;  // total sandwich slack feeding the interval
};

struct DefectReport {
    int sample_count = 0;
    std::uint64_t seed = 0;
    double q50 = 0, q95 = 0, q100 = 0;  // quantiles of the defect upper endpoints
    double width_mean = 0, width_max = 0;
    std::vector<double> bucket_h;
    std::vector<double> bucket_max;
    std::optional<double> slope;  // bucket_max against log(1/h)
};

// Four-point condition defect min((x|z)_w,(z|y)_w) - (x|y)_w over seeded
// quadruples, reported by conservative interval endpoints.
DefectReport four_point_scan(const ConvexDomain& dom, const ScanConfig& cfg,
                             std::vector<ScanRow>* rows = nullptr);

// Hausdorff-style thin-triangle defect on the K_up witness paths, sides
// discretized at 64 points.
double thin_triangle_defect(const ConvexDomain& dom, const CPoint& x, const CPoint& y,
                            const CPoint& z,
                            const SandwichOptions& opts = SandwichOptions::bulk());

DefectReport thin_triangle_scan(const ConvexDomain& dom, const ScanConfig& cfg,
                                std::vector<ScanRow>* rows = nullptr);

// max over witness-path samples z of delta(z), divided by M(x, y);
// +infinity for coincident endpoints.
double visibility_ratio(const ConvexDomain& dom, const CPoint& x, const CPoint& y,
                        const SandwichOptions& opts = SandwichOptions::bulk());

struct VisibilityReport {
    std::vector<double> bucket_h;
    std::vector<double> bucket_floor;  // min ratio per bucket
    std::optional<double> slope;       // floor against log(1/h)
};

VisibilityReport visibility_scan(const ConvexDomain& dom, const ScanConfig& cfg,
                                 std::vector<ScanRow>* rows = nullptr);

// --- visual metric ---------------------------------------------------------

struct VisualConfig {
    CVec patch_center_dir;  // empty: first-axis pole
    double patch_radius = 0.2;
    std::optional<CPoint> omega_point;  // explicit base point overrides the two below
    double omega_depth = 0.05;
    double omega_offset = 0.0;  // tangential displacement of the base point foot
    int pairs = 100;
    std::uint64_t seed = 42;
    std::vector<double> fiber_h = {1e-3, 1e-4, 1e-5};
    double stability_tol = 0.05;  // successive product differences
    double separation_min = 0.02; // minimal Euclidean spacing of the boundary pair
    SandwichOptions sandwich = SandwichOptions::bulk();
};

struct VisualRow {
    CPoint xi, eta;
    std::vector<double> products;  // (xi_h|eta_h)_omega midpoints along the h grid
    bool stable = false;
    double product = 0;     // value at the smallest stable h
    double m_matched = 0;   // M at the matched fiber height
    double ratio_exp1 = 0;  // exp(-product) / M      (literal comparison)
    double ratio_exp2 = 0;  // exp(-2 product) / M    (exponent-matched band)
};

std::vector<VisualRow> visual_metric_scan(const ConvexDomain& dom, const VisualConfig& cfg);

}  // namespace kobalab
