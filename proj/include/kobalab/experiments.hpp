#pragma once

#include <cstdint>
#include <vector>

#include "kobalab/hyperbolicity.hpp"
#include "kobalab/kobayashi.hpp"
#include "kobalab/samplers.hpp"

namespace kobalab {

// Depth-stratified sandwich evaluation over the mixed pair family; the
// backbone of the sandwich CLI and of the comparison-band experiments.
struct SandwichScanConfig {
    int pairs = 500;
    std::vector<double> depth_grid = {1e-3, 1e-4, 1e-5};
    std::uint64_t seed = 42;
    PairFamilyConfig family;  // family.h is overridden per bucket
    SandwichOptions sandwich;
};

struct SandwichRow {
    int pair_id = 0;
    double h = 0;
    CPoint x, y;
    double delta_x = 0, delta_y = 0;
    double m = 0, g = 0, k_lo = 0, k_up = 0;
    int case_tag = 0;
};

std::vector<SandwichRow> sandwich_scan(const ConvexDomain& dom, const SandwichScanConfig& cfg);

// Shell separation floors per depth bucket (min certified lower bound over
// samples of the polydisk shell at c|r(x)|).
struct SeparationConfig {
    double c = 2.0;
    int shell_samples = 256;
    int anchors_per_bucket = 4;
    std::vector<double> depth_grid = {1e-2, 1e-3, 1e-4, 1e-5};
    std::uint64_t seed = 42;
    double patch_radius = 0.15;
};

struct SeparationReport {
    std::vector<double> bucket_h;
    std::vector<double> bucket_floor;
};

SeparationReport separation_scan(const ConvexDomain& dom, const SeparationConfig& cfg);

}  // namespace kobalab
