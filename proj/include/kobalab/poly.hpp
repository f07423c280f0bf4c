#pragma once

#include <vector>

namespace kobalab {

inline double poly_eval(const std::vector<double>& p, double t) {
    double v = 0;
    for (std::size_t i = p.size(); i-- > 0;) v = v * t + p[i];
    return v;
}

inline double poly_eval_deriv(const std::vector<double>& p, double t) {
    double v = 0;
    for (std::size_t i = p.size(); i-- > 1;) v = v * t + p[i] * static_cast<double>(i);
    return v;
}

}  // namespace kobalab
