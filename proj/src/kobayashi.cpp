#include "kobalab/kobayashi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "kobalab/errors.hpp"
#include "kobalab/minimal_basis.hpp"
#include "kobalab/poly.hpp"
#include "kobalab/pseudodistance.hpp"
#include "kobalab/rng.hpp"

namespace kobalab {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

// Certified boundary-distance queries inside the 2D slice of the domain
// along one complex line. All quadrature points of a straight segment live
// in the same slice, so the slice boundary is traced once (rays from the
// chord midpoint) and each query costs a polygon scan. The inscribed
// polygon gives distances <= the true one, the supporting lines give
// distances >= the true one; refinement inserts rays until the two agree.
class SliceSection {
  public:
    SliceSection(const ConvexDomain& dom, const CPoint& base, const CVec& vhat)
        : dom_(dom), base_(base), vhat_(vhat) {}

    void init(double chord_len, int initial_rays = 64) {
        center_ = Eigen::Vector2d(0.5 * chord_len, 0);
        center_ambient_ = ambient(center_);
        double warm = -1;
        for (int i = 0; i < initial_rays; ++i) {
            const double phi = kTau * i / initial_rays;
            warm = add_ray(phi, warm);
        }
        std::sort(rays_.begin(), rays_.end(),
                  [](const Ray& a, const Ray& b) { return a.phi < b.phi; });
    }

    struct Dist {
        double inner = 0;  // <= true boundary distance
        double outer = 0;  // >= true boundary distance
    };

    Dist query(const Eigen::Vector2d& z, double rel_tol) {
        for (int round = 0;; ++round) {
            int outside_edge = -1;
            const Dist d = scan(z, &outside_edge);
            if (outside_edge >= 0) {
                // z escaped the inscribed polygon; add the ray through z
                insert_sorted(std::atan2(z.y() - center_.y(), z.x() - center_.x()));
                continue;
            }
            if (d.outer - d.inner <= rel_tol * d.inner || round >= 48) return d;
            refine_near(z);
        }
    }

    Eigen::Vector2d plane_coord(double t_along_chord) const {
        return Eigen::Vector2d(t_along_chord, 0.0);
    }

  private:
    struct Ray {
        double phi = 0;
        Eigen::Vector2d vertex;
        Eigen::Vector2d normal;
    };

    CPoint ambient(const Eigen::Vector2d& s) const {
        return base_ + (std::complex<double>(s.x(), s.y())) * vhat_;
    }

    double add_ray(double phi, double warm) {
        const std::complex<double> zeta(std::cos(phi), std::sin(phi));
        const double t = ray_level_root_warm(dom_, center_ambient_, zeta * vhat_, 0.0, warm);
        Ray ray;
        ray.phi = std::fmod(phi + kTau, kTau);
        ray.vertex = center_ + t * Eigen::Vector2d(std::cos(phi), std::sin(phi));
        const REval ev = dom_.eval(ambient(ray.vertex), false);
        Eigen::Vector2d nrm(hdot(vhat_, ev.grad).real(),
                            hdot(std::complex<double>(0, 1) * vhat_, ev.grad).real());
        const double nn = nrm.norm();
        ray.normal = nn > 0 ? Eigen::Vector2d(nrm / nn) : Eigen::Vector2d(std::cos(phi), std::sin(phi));
        rays_.push_back(ray);
        return t;
    }

    void insert_sorted(double phi) {
        add_ray(std::fmod(phi + kTau, kTau), -1);
        std::sort(rays_.begin(), rays_.end(),
                  [](const Ray& a, const Ray& b) { return a.phi < b.phi; });
    }

    static double seg_dist(const Eigen::Vector2d& z, const Eigen::Vector2d& a,
                           const Eigen::Vector2d& b) {
        const Eigen::Vector2d ab = b - a;
        const double len2 = ab.squaredNorm();
        double u = len2 > 0 ? (z - a).dot(ab) / len2 : 0.0;
        u = std::clamp(u, 0.0, 1.0);
        return (z - (a + u * ab)).norm();
    }

    Dist scan(const Eigen::Vector2d& z, int* outside_edge) {
        Dist d{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        const std::size_t n = rays_.size();
        nearest_edge_ = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const Ray& a = rays_[i];
            const Ray& b = rays_[(i + 1) % n];
            // inscribed polygon edge
            const double di = seg_dist(z, a.vertex, b.vertex);
            if (di < d.inner) {
                d.inner = di;
                nearest_edge_ = i;
            }
            // inside test: z on the center side of the edge
            const Eigen::Vector2d e = b.vertex - a.vertex;
            const double cz = e.x() * (z.y() - a.vertex.y()) - e.y() * (z.x() - a.vertex.x());
            const double cc =
                e.x() * (center_.y() - a.vertex.y()) - e.y() * (center_.x() - a.vertex.x());
            if (cz * cc < 0 && std::abs(cz) > 1e-15) {
                *outside_edge = static_cast<int>(i);
            }
            // supporting line at the vertex
            const double d_sup = (a.vertex - z).dot(a.normal);
            d.outer = std::min(d.outer, d_sup);
        }
        d.outer = std::max(d.outer, d.inner);
        return d;
    }

    void refine_near(const Eigen::Vector2d& z) {
        const std::size_t n = rays_.size();
        const Ray& a = rays_[nearest_edge_];
        const Ray& b = rays_[(nearest_edge_ + 1) % n];
        double lo = a.phi;
        double hi = b.phi;
        if (hi <= lo) hi += kTau;
        insert_sorted(0.5 * (lo + hi));
        (void)z;
    }

    const ConvexDomain& dom_;
    CPoint base_;
    CVec vhat_;
    Eigen::Vector2d center_;
    CPoint center_ambient_;
    std::vector<Ray> rays_;
    std::size_t nearest_edge_ = 0;
};

struct SegmentBounds {
    double lo = 0, hi = 0;
};

// Composite trapezoid with interval doubling on one straight segment.
SegmentBounds segment_length_bounds(const ConvexDomain& dom, const CPoint& p, const CPoint& q,
                                    const SandwichOptions& opts) {
    SegmentBounds out;
    const double len = (q - p).norm();
    if (len == 0) return out;
    const CVec vhat = unit(q - p);

    SliceSection slice(dom, p, vhat);
    slice.init(len);

    struct Sample {
        double f_lo = 0, f_hi = 0;
    };
    const auto eval_at = [&](double t) -> Sample {
        const SliceSection::Dist d = slice.query(slice.plane_coord(t * len), opts.slice_tol);
        if (d.inner <= 0)
            throw NumericalError("path_length_bounds: segment touches the boundary");
        return {len / (2.0 * d.outer), len / d.inner};
    };

    int m = opts.quad_init;
    std::vector<Sample> samples(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) samples[static_cast<std::size_t>(i)] = eval_at(double(i) / m);

    const auto trapz = [&](const std::vector<Sample>& s) -> SegmentBounds {
        SegmentBounds b;
        const double h = 1.0 / (static_cast<double>(s.size()) - 1.0);
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
            b.lo += 0.5 * h * (s[i].f_lo + s[i + 1].f_lo);
            b.hi += 0.5 * h * (s[i].f_hi + s[i + 1].f_hi);
        }
        return b;
    };

    SegmentBounds prev = trapz(samples);
    double d_lo = prev.lo, d_hi = prev.hi;
    while (m < opts.quad_cap) {
        m *= 2;
        std::vector<Sample> next(static_cast<std::size_t>(m) + 1);
        for (int i = 0; i <= m; ++i) {
            if (i % 2 == 0)
                next[static_cast<std::size_t>(i)] = samples[static_cast<std::size_t>(i / 2)];
            else
                next[static_cast<std::size_t>(i)] = eval_at(double(i) / m);
        }
        const SegmentBounds cur = trapz(next);
        d_lo = std::abs(cur.lo - prev.lo);
        d_hi = std::abs(cur.hi - prev.hi);
        samples = std::move(next);
        prev = cur;
        if (d_hi <= opts.quad_rel_tol * prev.hi && d_lo <= opts.quad_rel_tol * prev.lo) break;
    }
    // Richardson-style safety margin so quadrature error cannot flip the
    // certified direction of either bound.
    out.lo = std::max(0.0, prev.lo - d_lo / 3.0);
    out.hi = prev.hi + d_hi / 3.0;
    return out;
}

// First point on the inward normal ray from x with |r| = target (target
// deeper than |r(x)|); nullopt when the ray never gets that deep.
std::optional<CPoint> lift_inward(const ConvexDomain& dom, const CPoint& x, const CVec& normal,
                                  double target_abs) {
    const double rx = dom.r(x);
    if (-rx >= target_abs) return x;
    const CVec dir = -normal;
    const std::vector<double> p = dom.axis_poly(x, dir);

    // r is convex along the ray: locate its minimum first
    double s_hi = 0.05;
    const double cap = 4.0 * dom.bounding_radius();
    while (poly_eval_deriv(p, s_hi) < 0 && s_hi < cap) s_hi *= 2.0;
    double lo = 0, hi = s_hi;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (poly_eval_deriv(p, mid) < 0)
            lo = mid;
        else
            hi = mid;
    }
    const double s_min = 0.5 * (lo + hi);
    if (poly_eval(p, s_min) > -target_abs) return std::nullopt;

    // unique root of r = -target on [0, s_min]
    double a = 0, b = s_min;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (a + b);
        if (poly_eval(p, mid) > -target_abs)
            a = mid;
        else
            b = mid;
    }
    const double s = 0.5 * (a + b);
    return CPoint(x + s * dir);
}

double path_up(const ConvexDomain& dom, const Path& path, const SandwichOptions& opts) {
    double hi = 0;
    for (std::size_t i = 0; i + 1 < path.knots.size(); ++i)
        hi += segment_length_bounds(dom, path.knots[i], path.knots[i + 1], opts).hi;
    return hi;
}

SandwichOptions coarse_of(const SandwichOptions& opts) {
    SandwichOptions c = opts;
    c.quad_rel_tol = std::max(5e-3, opts.quad_rel_tol);
    c.quad_init = 4;
    c.slice_tol = std::max(1e-3, opts.slice_tol);
    return c;
}

Path build_lifted_path(const ConvexDomain& dom, const CPoint& x, const CPoint& y,
                       const CVec& nx, const CVec& ny, double rx, double ry, double level,
                       bool case_one) {
    Path path;
    if (case_one) {
        // lift only the shallower endpoint
        if (rx <= ry) {
            const auto xl = lift_inward(dom, x, nx, level);
            if (!xl) return Path{{x, y}};
            path.knots = {x, *xl, y};
        } else {
            const auto yl = lift_inward(dom, y, ny, level);
            if (!yl) return Path{{x, y}};
            path.knots = {x, *yl, y};
        }
    } else {
        const auto xl = lift_inward(dom, x, nx, level);
        const auto yl = lift_inward(dom, y, ny, level);
        if (!xl || !yl) return Path{{x, y}};
        path.knots = {x, *xl, *yl, y};
    }
    // drop coincident consecutive knots
    Path cleaned;
    for (const CPoint& k : path.knots)
        if (cleaned.knots.empty() || (cleaned.knots.back() - k).norm() > 0) cleaned.knots.push_back(k);
    return cleaned;
}

}  // namespace

BoundPair infinitesimal_bounds(const ConvexDomain& dom, const CPoint& z, const CVec& v) {
    if (v.norm() <= 0) throw ArgumentError("infinitesimal_bounds: zero vector");
    const double d = directional_boundary_distance(dom, z, v);
    const double nv = v.norm();
    return {nv / (2.0 * d), nv / d};
}

BoundPair path_length_bounds(const ConvexDomain& dom, const Path& path,
                             const SandwichOptions& opts) {
    BoundPair out;
    for (std::size_t i = 0; i + 1 < path.knots.size(); ++i) {
        if (dom.r(path.knots[i]) >= 0 || dom.r(path.knots[i + 1]) >= 0)
            throw ArgumentError("path_length_bounds: knot is not interior");
        const SegmentBounds b = segment_length_bounds(dom, path.knots[i], path.knots[i + 1], opts);
        out.lo += b.lo;
        out.hi += b.hi;
    }
    return out;
}

namespace {

Path almost_geodesic_with_m(const ConvexDomain& dom, const CPoint& x, const CPoint& y,
                            double m, const SandwichOptions& opts) {
    const double rx = std::abs(dom.r(x));
    const double ry = std::abs(dom.r(y));
    const CVec nx = boundary_distance(dom, x).normal;
    const CVec ny = boundary_distance(dom, y).normal;
    const bool case_one = m <= std::max(rx, ry);
    const double base_level = case_one ? std::max(rx, ry) : m;

    Path best = build_lifted_path(dom, x, y, nx, ny, rx, ry, base_level, case_one);
    if (!opts.height_search || best.knots.size() <= 2) return best;

    const SandwichOptions coarse = coarse_of(opts);
    double best_len = path_up(dom, best, coarse);
    // log-scale scan of the lift level around the construction height
    for (double f : {1.4, 2.0, 2.8, 4.0, 5.7, 8.0}) {
        const Path cand = build_lifted_path(dom, x, y, nx, ny, rx, ry, f * base_level, case_one);
        if (cand.knots.size() <= 2) continue;
        const double len = path_up(dom, cand, coarse);
        if (len < best_len) {
            best_len = len;
            best = cand;
        }
    }
    return best;
}

}  // namespace

Path almost_geodesic(const ConvexDomain& dom, const CPoint& x, const CPoint& y,
                     const SandwichOptions& opts) {
    if ((x - y).norm() == 0) return Path{{x}};
    return almost_geodesic_with_m(dom, x, y, pseudo_distance_inf(dom, x, y), opts);
}

namespace {

Path knot_refine(const ConvexDomain& dom, Path path, const SandwichOptions& opts) {
    if (path.knots.size() < 2) return path;
    // subdivide the longest segments so the descent has knots to move
    while (path.knots.size() < 8) {
        std::size_t longest = 0;
        double maxlen = -1;
        for (std::size_t i = 0; i + 1 < path.knots.size(); ++i) {
            const double l = (path.knots[i + 1] - path.knots[i]).norm();
            if (l > maxlen) {
                maxlen = l;
                longest = i;
            }
        }
        if (maxlen <= 0) break;
        const CPoint mid = 0.5 * (path.knots[longest] + path.knots[longest + 1]);
        path.knots.insert(path.knots.begin() + static_cast<std::ptrdiff_t>(longest) + 1, mid);
    }

    const SandwichOptions coarse = coarse_of(opts);
    const auto local_len = [&](const Path& p, std::size_t i) {
        return segment_length_bounds(dom, p.knots[i - 1], p.knots[i], coarse).hi +
               segment_length_bounds(dom, p.knots[i], p.knots[i + 1], coarse).hi;
    };

    int iterations = 0;
    for (int pass = 0; pass < opts.refine_passes && iterations < 50; ++pass) {
        bool any = false;
        for (std::size_t i = 1; i + 1 < path.knots.size() && iterations < 50; ++i) {
            ++iterations;
            if (dom.r(path.knots[i]) >= 0) continue;
            double base = local_len(path, i);
            const CVec nrm = boundary_distance(dom, path.knots[i]).normal;
            const CVec chord = unit(path.knots[i + 1] - path.knots[i - 1]);
            const double scale0 = 0.25 * std::min((path.knots[i + 1] - path.knots[i]).norm(),
                                                  (path.knots[i] - path.knots[i - 1]).norm());
            for (const CVec& dir : {nrm, chord}) {
                double scale = scale0;
                for (int step = 0; step < 6 && scale > 1e-10; ++step) {
                    bool moved = false;
                    for (double sgn : {-1.0, 1.0}) {
                        const CPoint saved = path.knots[i];
                        const CPoint cand = saved + sgn * scale * dir;
                        if (dom.r(cand) >= -1e-14) continue;
                        path.knots[i] = cand;
                        const double len = local_len(path, i);
                        if (len < base * (1.0 - 1e-10)) {
                            base = len;
                            moved = true;
                            any = true;
                            break;
                        }
                        path.knots[i] = saved;
                    }
                    if (!moved) scale *= 0.5;
                }
            }
        }
        if (!any) break;
    }
    return path;
}

}  // namespace

namespace {

bool lex_before(const CPoint& a, const CPoint& b) {
    const RVec ra = to_real(a), rb = to_real(b);
    for (Eigen::Index i = 0; i < ra.size(); ++i) {
        if (ra[i] < rb[i]) return true;
        if (ra[i] > rb[i]) return false;
    }
    return false;
}

}  // namespace

DistanceSandwich distance_sandwich(const ConvexDomain& dom, const CPoint& x, const CPoint& y,
                                   const SandwichOptions& opts,
                                   const std::vector<Path>* extra_paths) {
    DistanceSandwich out;
    if ((x - y).norm() == 0) {
        out.witness.knots = {x};
        return out;
    }
    const BoundaryData bx = boundary_distance(dom, x);
    const BoundaryData by = boundary_distance(dom, y);
    const CVec v = x - y;
    const double sect = std::min(directional_boundary_distance(dom, x, v),
                                 directional_boundary_distance(dom, y, v));
    out.components.est3 = 0.5 * std::log1p(v.norm() / sect);
    out.components.est4 = 0.5 * std::abs(std::log(bx.delta / by.delta));
    out.components.est2_diag =
        0.5 * std::log1p(v.norm() / bx.delta) + 0.5 * std::log1p(v.norm() / by.delta);
    out.k_lo = std::max({out.components.est3, out.components.est4, 0.0});

    // M and g exist only inside the chart; the certified bounds do not
    // need them, so far pairs still get a valid interval from the straight
    // and refined paths.
    bool in_chart = true;
    try {
        out.m = pseudo_distance_inf(dom, x, y);
        out.g = g_from_parts(out.m, bx.delta, by.delta);
    } catch (const OutOfChartError&) {
        in_chart = false;
        out.m = std::nan("");
        out.g = std::nan("");
    }

    // The path family is built on a canonical orientation so the interval
    // does not depend on the argument order (M itself is only
    // quasi-symmetric).
    const bool flip = lex_before(y, x);
    const CPoint& a = flip ? y : x;
    const CPoint& b = flip ? x : y;

    std::vector<Path> candidates;
    candidates.push_back(Path{{a, b}});
    if (in_chart) {
        const double m_path = flip ? pseudo_distance_inf(dom, y, x) : out.m;
        out.case_tag = m_path <= std::max(std::abs(dom.r(a)), std::abs(dom.r(b))) ? 1 : 2;
        candidates.push_back(almost_geodesic_with_m(dom, a, b, m_path, opts));
    } else {
        out.case_tag = 0;
    }
    if (opts.knot_refine) candidates.push_back(knot_refine(dom, candidates.back(), opts));
    if (extra_paths)
        for (const Path& p : *extra_paths) candidates.push_back(p);

    out.k_up = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const double hi = path_up(dom, candidates[c], opts);
        if (c == 0) out.components.straight = hi;
        if (c == 1 && in_chart) out.components.almost_geodesic = hi;
        if (hi < out.k_up) {
            out.k_up = hi;
            out.witness = candidates[c];
        }
    }
    return out;
}

double polydisk_separation(const ConvexDomain& dom, const CPoint& x, double c, int samples,
                           std::uint64_t seed) {
    if (c < 1) throw ArgumentError("polydisk_separation: c must be >= 1");
    const double rx = std::abs(dom.r(x));
    const MinimalFrame frame = build_minimal_frame(dom, x, c * rx);
    const int n = dom.dim();

    const BoundaryData bx = boundary_distance(dom, x);
    double worst = std::numeric_limits<double>::infinity();
    int accepted = 0;
    for (int i = 0; i < samples || accepted == 0; ++i) {
        if (i > 8 * samples) break;
        Rng rng(seed, 211, static_cast<std::uint64_t>(i));
        const int face = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
        CPoint y = x;
        for (int j = 0; j < n; ++j) {
            const double rho = j == face ? 1.0 : rng.uniform();
            const double phi = rng.uniform(0.0, kTau);
            y += rho * frame.tau[static_cast<std::size_t>(j)] *
                 (std::complex<double>(std::cos(phi), std::sin(phi))) * frame.basis[static_cast<std::size_t>(j)];
        }
        if (dom.r(y) >= 0) continue;
        ++accepted;
        const BoundaryData by = boundary_distance(dom, y);
        const CVec v = x - y;
        const double sect = std::min(directional_boundary_distance(dom, x, v),
                                     directional_boundary_distance(dom, y, v));
        const double est3 = 0.5 * std::log1p(v.norm() / sect);
        const double est4 = 0.5 * std::abs(std::log(bx.delta / by.delta));
        worst = std::min(worst, std::max(est3, est4));
    }
    if (!std::isfinite(worst))
        throw NumericalError("polydisk_separation: no shell sample landed inside the domain");
    return worst;
}

}  // namespace kobalab
