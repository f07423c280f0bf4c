#include "kobalab/minimal_basis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "kobalab/errors.hpp"
#include "kobalab/rng.hpp"

namespace kobalab {

namespace {

constexpr double kTieTol = 1e-9;

bool lex_greater(const RVec& a, const RVec& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) <= 1e-12) continue;
        return a[i] > b[i];
    }
    return false;
}

struct DirectionHit {
    CVec direction;  // unit complex vector (a real direction of C^n)
    double distance = 0;
};

// Minimal ray distance from q to {r = level} over the phase circle of a
// single complex line C*w. 32-point grid, golden refinement, lexicographic
// tie-break among grid-level ties.
DirectionHit circle_min(const ConvexDomain& dom, const CPoint& q, double level,
                        const CVec& w) {
    constexpr int kGrid = 32;
    const double step = 2.0 * M_PI / kGrid;
    const auto dir_at = [&](double theta) -> CVec {
        return std::complex<double>(std::cos(theta), std::sin(theta)) * w;
    };

    std::array<double, kGrid> root{};
    double best = std::numeric_limits<double>::infinity();
    int best_i = 0;
    double warm = -1;
    for (int i = 0; i < kGrid; ++i) {
        root[i] = ray_level_root_warm(dom, q, dir_at(i * step), level, warm);
        warm = root[i];
        if (root[i] < best) {
            best = root[i];
            best_i = i;
        }
    }

    std::vector<int> ties;
    for (int i = 0; i < kGrid; ++i)
        if (root[i] <= best * (1.0 + kTieTol)) ties.push_back(i);

    DirectionHit hit;
    if (ties.size() > 1) {
        // Near-flat circle: the minimizer phase is not unique. Pick the
        // candidate with the lexicographically largest real coordinates.
        int pick = ties.front();
        RVec pick_re = to_real(dir_at(pick * step));
        for (int i : ties) {
            RVec re = to_real(dir_at(i * step));
            if (lex_greater(re, pick_re)) {
                pick = i;
                pick_re = re;
            }
        }
        hit.direction = dir_at(pick * step);
        hit.distance = ray_level_root(dom, q, hit.direction, level);
        return hit;
    }

    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = (best_i - 1) * step, b = (best_i + 1) * step;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = ray_level_root_warm(dom, q, dir_at(x1), level, best);
    double f2 = ray_level_root_warm(dom, q, dir_at(x2), level, best);
    while (b - a > 1e-10) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = ray_level_root_warm(dom, q, dir_at(x1), level, f2);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = ray_level_root_warm(dom, q, dir_at(x2), level, f1);
        }
    }
    const double theta = 0.5 * (a + b);
    hit.direction = dir_at(theta);
    hit.distance = ray_level_root(dom, q, hit.direction, level);
    return hit;
}

// Multi-start sphere search over the real unit directions of a complex
// subspace (used for higher-dimensional slices and as the degenerate-case
// fallback of the Newton projection).
DirectionHit sphere_min(const ConvexDomain& dom, const CPoint& q, double level,
                        const std::vector<CVec>& w_basis) {
    const int m = static_cast<int>(w_basis.size());
    const int d = 2 * m;
    const auto dir_at = [&](const RVec& u) -> CVec {
        CVec e = CVec::Zero(q.size());
        for (int k = 0; k < m; ++k)
            e += (std::complex<double>(u[2 * k], u[2 * k + 1])) * w_basis[k];
        return e;
    };

    const int n_starts = 64 * m;
    double best = std::numeric_limits<double>::infinity();
    RVec best_u = RVec::Zero(d);
    std::vector<std::pair<double, RVec>> hits;
    for (int i = 0; i < n_starts; ++i) {
        Rng rng(17, 19, static_cast<std::uint64_t>(i));
        const RVec u = rng.sphere(d);
        const double t = ray_level_root(dom, q, dir_at(u), level);
        hits.emplace_back(t, u);
        if (t < best) {
            best = t;
            best_u = u;
        }
    }

    // pattern refinement on the sphere chart from the best start
    RVec u = best_u;
    double scale = 0.4;
    while (scale > 1e-10) {
        bool improved = false;
        for (int axis = 0; axis < d; ++axis) {
            for (double sgn : {1.0, -1.0}) {
                RVec cand = u;
                cand[axis] += sgn * scale;
                cand.normalize();
                const double t = ray_level_root(dom, q, dir_at(cand), level);
                if (t < best * (1.0 - 1e-14)) {
                    best = t;
                    u = cand;
                    improved = true;
                }
            }
        }
        if (!improved) scale *= 0.5;
    }

    std::vector<RVec> ties;
    for (const auto& [t, cand] : hits)
        if (t <= best * (1.0 + kTieTol)) ties.push_back(cand);
    DirectionHit hit;
    if (ties.size() > 1) {
        RVec pick = ties.front();
        for (const RVec& cand : ties)
            if (lex_greater(to_real(dir_at(cand)), to_real(dir_at(pick)))) pick = cand;
        hit.direction = dir_at(pick);
    } else {
        hit.direction = dir_at(u);
    }
    hit.distance = ray_level_root(dom, q, hit.direction, level);
    return hit;
}

// Complex-orthonormal completion of the partial frame (Gram-Schmidt over
// canonical vectors).
std::vector<CVec> complement_basis(int n, const std::vector<CVec>& frame) {
    std::vector<CVec> out;
    for (int j = 0; j < n; ++j) {
        CVec v = CVec::Zero(n);
        v[j] = 1.0;
        for (const CVec& e : frame) v -= hdot(v, e) * e;
        for (const CVec& w : out) v -= hdot(v, w) * w;
        const double nn = v.norm();
        if (nn > 1e-7) out.push_back(v / nn);
        if (static_cast<int>(out.size() + frame.size()) == n) break;
    }
    return out;
}

CVec phase_normalize(const CVec& e) {
    int jmax = 0;
    double amax = -1;
    for (Eigen::Index j = 0; j < e.size(); ++j) {
        if (std::abs(e[j]) > amax) {
            amax = std::abs(e[j]);
            jmax = static_cast<int>(j);
        }
    }
    if (amax <= 0) return e;
    return e * (std::conj(e[jmax]) / amax);
}

}  // namespace

MinimalFrame build_minimal_frame(const ConvexDomain& dom, const CPoint& q, double eps) {
    const int n = dom.dim();
    if (eps <= 0) throw ArgumentError("build_minimal_frame: eps must be positive");
    if (eps > dom.spec().eps_max)
        throw ArgumentError("build_minimal_frame: eps exceeds eps_max");
    const double rq = dom.r(q);
    if (rq >= 0) throw ArgumentError("build_minimal_frame: q is not interior");
    const double level = rq + eps;

    MinimalFrame frame;
    frame.q = q;
    frame.eps = eps;

    const double full_grad = dom.eval(q, false).grad.norm();

    for (int i = 0; i < n; ++i) {
        const std::vector<CVec> w_basis =
            i == 0 ? complement_basis(n, {}) : complement_basis(n, frame.basis);
        const int m = static_cast<int>(w_basis.size());
        if (m == 0) throw NumericalError("build_minimal_frame: subspace completion failed");

        // In-slice gradient decides whether the convex projection is usable
        // or the slice is rotation-degenerate at q.
        CVec gs = CVec::Zero(n);
        {
            const CVec g = dom.eval(q, false).grad;
            for (const CVec& w : w_basis) gs += hdot(g, w) * w;
        }
        const bool degenerate = gs.norm() <= 1e-9 + 1e-7 * full_grad;

        DirectionHit hit;
        bool have_hit = false;
        if (!degenerate && m >= 2) {
            try {
                const LevelProjection proj = project_to_level(dom, q, level, w_basis);
                if (proj.newton_ok && proj.distance > 0) {
                    hit.direction = unit(proj.foot - q);
                    hit.distance = proj.distance;
                    have_hit = true;
                }
            } catch (const std::exception&) {
            }
        }
        if (!have_hit) {
            hit = m == 1 ? circle_min(dom, q, level, w_basis[0])
                         : sphere_min(dom, q, level, w_basis);
        }

        CVec e = hit.direction;
        if (i > 0) e = phase_normalize(e);
        frame.basis.push_back(e);
        frame.tau.push_back(hit.distance);
    }
    return frame;
}

bool polydisk_membership(const MinimalFrame& frame, const CPoint& y) {
    for (std::size_t i = 0; i < frame.basis.size(); ++i)
        if (std::abs(frame.coord(y, static_cast<int>(i))) > frame.tau[i]) return false;
    return true;
}

std::vector<std::vector<double>> scaling_profile(const ConvexDomain& dom, const CPoint& q,
                                                 double eps,
                                                 const std::vector<double>& c_list) {
    for (double c : c_list)
        if (c * eps > dom.spec().eps_max || c * eps <= 0)
            throw ArgumentError("scaling_profile: c*eps outside (0, eps_max]");
    const MinimalFrame base = build_minimal_frame(dom, q, eps);
    std::vector<std::vector<double>> table;
    for (double c : c_list) {
        const MinimalFrame scaled = build_minimal_frame(dom, q, c * eps);
        std::vector<double> row(base.tau.size());
        for (std::size_t i = 0; i < base.tau.size(); ++i) row[i] = scaled.tau[i] / base.tau[i];
        table.push_back(std::move(row));
    }
    return table;
}

double harmonic_radius(const MinimalFrame& frame, const CVec& v) {
    double s = 0;
    for (std::size_t i = 0; i < frame.basis.size(); ++i)
        s += std::abs(hdot(v, frame.basis[i])) / frame.tau[i];
    if (s <= 0) throw ArgumentError("harmonic_radius: zero direction");
    return 1.0 / s;
}

}  // namespace kobalab
