#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace kobalab {

// Quantile with linear interpolation; input need not be sorted.
inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    if (v.size() == 1) return v[0];
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    const double frac = pos - static_cast<double>(i);
    return v[i] * (1.0 - frac) + v[i + 1] * frac;
}

// Ordinary least squares slope of y against x; nullopt when the slope is
// not identifiable (fewer than two points or degenerate x).
inline std::optional<double> ols_slope(const std::vector<double>& x,
                                       const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return std::nullopt;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0) return std::nullopt;
    return sxy / sxx;
}

struct Band {
    double lo = 0, hi = 0;
    double log_width() const { return std::log(hi) - std::log(lo); }
};

inline Band ratio_band(const std::vector<double>& v) {
    Band b{v.front(), v.front()};
    for (double x : v) {
        b.lo = std::min(b.lo, x);
        b.hi = std::max(b.hi, x);
    }
    return b;
}

}  // namespace kobalab
