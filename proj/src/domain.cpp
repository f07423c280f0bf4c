#include "kobalab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kobalab/errors.hpp"
#include "kobalab/poly.hpp"
#include "kobalab/rng.hpp"

namespace kobalab {

namespace {

using json = nlohmann::json;

// p(t) *= (a + b t + c t^2)
void mul_quadratic(std::vector<double>& p, double a, double b, double c) {
    std::vector<double> out(p.size() + 2, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] += p[i] * a;
        out[i + 1] += p[i] * b;
        out[i + 2] += p[i] * c;
    }
    p = std::move(out);
}

// p(t) *= (a + b t)^k
void mul_binomial_power(std::vector<double>& p, double a, double b, int k) {
    for (int i = 0; i < k; ++i) {
        std::vector<double> out(p.size() + 1, 0.0);
        for (std::size_t j = 0; j < p.size(); ++j) {
            out[j] += p[j] * a;
            out[j + 1] += p[j] * b;
        }
        p = std::move(out);
    }
}

}  // namespace

// --- DomainSpec -------------------------------------------------------------

DomainSpec DomainSpec::ball(int n) {
    DomainSpec s;
    s.family = DomainFamily::Ball;
    s.dim = n;
    s.type_bound = 2;
    s.eps_max = 0.45;
    return s;
}

DomainSpec DomainSpec::ellipsoid(std::vector<int> m) {
    DomainSpec s;
    s.family = DomainFamily::GeneralizedEllipsoid;
    s.dim = static_cast<int>(m.size());
    s.exponents = std::move(m);
    int mx = 1;
    for (int e : s.exponents) mx = std::max(mx, e);
    s.type_bound = 2 * mx;
    s.eps_max = 0.45;
    return s;
}

DomainSpec DomainSpec::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("domain spec is not valid JSON: ") + e.what());
    }
    DomainSpec s;
    const std::string family = j.value("family", "");
    if (!j.contains("dimension") || !j["dimension"].is_number_integer())
        throw ConfigError("domain spec: missing integer 'dimension'");
    s.dim = j["dimension"].get<int>();
    if (s.dim < 2) throw ConfigError("domain spec: dimension must be >= 2");

    if (family == "ball") {
        s.family = DomainFamily::Ball;
        s.type_bound = j.value("type_bound", 2);
    } else if (family == "generalized_ellipsoid") {
        s.family = DomainFamily::GeneralizedEllipsoid;
        if (!j.contains("exponents")) throw ConfigError("generalized_ellipsoid: missing 'exponents'");
        s.exponents = j["exponents"].get<std::vector<int>>();
        if (static_cast<int>(s.exponents.size()) != s.dim)
            throw ConfigError("generalized_ellipsoid: exponents size must equal dimension");
        for (int m : s.exponents)
            if (m < 1) throw ConfigError("generalized_ellipsoid: exponents must be positive");
        int mx = 1;
        for (int m : s.exponents) mx = std::max(mx, m);
        s.type_bound = j.value("type_bound", 2 * mx);
        if (s.type_bound != 2 * mx)
            throw ConfigError("generalized_ellipsoid: type_bound must equal 2*max(exponents)");
    } else if (family == "polynomial") {
        s.family = DomainFamily::Polynomial;
        if (!j.contains("poly_terms")) throw ConfigError("polynomial: missing 'poly_terms'");
        for (const auto& t : j["poly_terms"]) {
            MonomialTerm term;
            term.coeff = t.at("coeff").get<double>();
            term.powers = t.at("powers").get<std::vector<int>>();
            if (static_cast<int>(term.powers.size()) != 2 * s.dim)
                throw ConfigError("polynomial: each powers list must have 2*dimension entries");
            for (int p : term.powers)
                if (p < 0) throw ConfigError("polynomial: powers must be nonnegative");
            s.terms.push_back(std::move(term));
        }
        if (!j.contains("type_bound")) throw ConfigError("polynomial: missing 'type_bound'");
        s.type_bound = j["type_bound"].get<int>();
    } else {
        throw ConfigError("unsupported domain family '" + family + "'");
    }
    if (s.type_bound < 2) throw ConfigError("type_bound must be >= 2");
    s.h_max = j.value("h_max", 0.1);
    if (j.contains("eps_max")) s.eps_max = j["eps_max"].get<double>();
    if (s.h_max <= 0 || s.eps_max <= 0) throw ConfigError("h_max and eps_max must be positive");
    return s;
}

DomainSpec DomainSpec::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read domain spec file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string DomainSpec::family_name() const {
    switch (family) {
        case DomainFamily::Ball: return "ball";
        case DomainFamily::GeneralizedEllipsoid: return "generalized_ellipsoid";
        case DomainFamily::Polynomial: return "polynomial";
    }
    return "?";
}

std::string DomainSpec::label() const {
    std::string s = family_name();
    if (family == DomainFamily::GeneralizedEllipsoid) {
        s += "_m";
        for (int m : exponents) s += std::to_string(m);
    }
    s += "_n" + std::to_string(dim);
    return s;
}

// --- ConvexDomain evaluation -------------------------------------------------

ConvexDomain::ConvexDomain(DomainSpec spec) : spec_(std::move(spec)) {
    switch (spec_.family) {
        case DomainFamily::Ball:
            bounding_radius_ = 1.0;
            break;
        case DomainFamily::GeneralizedEllipsoid:
            // each |z_j| <= 1
            bounding_radius_ = std::sqrt(static_cast<double>(spec_.dim));
            break;
        case DomainFamily::Polynomial: {
            // grow a radius until r > 0 on a probe sphere
            double rad = 1.0;
            bool ok = false;
            for (int k = 0; k < 24 && !ok; ++k) {
                ok = true;
                Rng rng(7, 7, static_cast<std::uint64_t>(k));
                for (int i = 0; i < 128; ++i) {
                    RVec u = rng.sphere(2 * spec_.dim);
                    if (r(to_complex(RVec(rad * u))) <= 0) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) rad *= 1.5;
            }
            if (!ok) throw ConfigError("polynomial domain looks unbounded (probe radius exhausted)");
            bounding_radius_ = rad;
            break;
        }
    }
}

double ConvexDomain::r(const CPoint& z) const {
    switch (spec_.family) {
        case DomainFamily::Ball:
            return z.squaredNorm() - 1.0;
        case DomainFamily::GeneralizedEllipsoid: {
            double v = -1.0;
            for (int j = 0; j < spec_.dim; ++j)
                v += std::pow(std::norm(z[j]), spec_.exponents[j]);
            return v;
        }
        case DomainFamily::Polynomial: {
            const RVec x = to_real(z);
            double v = 0;
            for (const auto& t : spec_.terms) {
                double m = t.coeff;
                for (int i = 0; i < 2 * spec_.dim; ++i)
                    for (int p = 0; p < t.powers[i]; ++p) m *= x[i];
                v += m;
            }
            return v;
        }
    }
    return 0;
}

REval ConvexDomain::eval(const CPoint& z, bool with_hessian) const {
    const int n = spec_.dim;
    REval out;
    out.grad = CVec::Zero(n);
    if (with_hessian) out.hess = RMat::Zero(2 * n, 2 * n);
    switch (spec_.family) {
        case DomainFamily::Ball: {
            out.value = z.squaredNorm() - 1.0;
            out.grad = 2.0 * z;
            if (with_hessian) out.hess = 2.0 * RMat::Identity(2 * n, 2 * n);
            break;
        }
        case DomainFamily::GeneralizedEllipsoid: {
            out.value = -1.0;
            for (int j = 0; j < n; ++j) {
                const int m = spec_.exponents[j];
                const double s = std::norm(z[j]);
                out.value += std::pow(s, m);
                const double sm1 = m >= 1 ? std::pow(s, m - 1) : 0.0;
                out.grad[j] = 2.0 * m * sm1 * z[j];
                if (with_hessian) {
                    const double sm2 = m >= 2 ? std::pow(s, m - 2) : 0.0;
                    const double x = z[j].real(), y = z[j].imag();
                    const double d = 2.0 * m * sm1;
                    const double q = 4.0 * m * (m - 1) * sm2;
                    out.hess(2 * j, 2 * j) = d + q * x * x;
                    out.hess(2 * j + 1, 2 * j + 1) = d + q * y * y;
                    out.hess(2 * j, 2 * j + 1) = q * x * y;
                    out.hess(2 * j + 1, 2 * j) = q * x * y;
                }
            }
            break;
        }
        case DomainFamily::Polynomial: {
            const RVec x = to_real(z);
            RVec g = RVec::Zero(2 * n);
            for (const auto& t : spec_.terms) {
                // value
                double m = t.coeff;
                for (int i = 0; i < 2 * n; ++i)
                    for (int p = 0; p < t.powers[i]; ++p) m *= x[i];
                out.value += m;
                // first derivatives, term-wise
                for (int i = 0; i < 2 * n; ++i) {
                    if (t.powers[i] == 0) continue;
                    double d = t.coeff * t.powers[i];
                    for (int k = 0; k < 2 * n; ++k) {
                        const int p = t.powers[k] - (k == i ? 1 : 0);
                        for (int q = 0; q < p; ++q) d *= x[k];
                    }
                    g[i] += d;
                }
                if (with_hessian) {
                    for (int i = 0; i < 2 * n; ++i) {
                        if (t.powers[i] == 0) continue;
                        for (int j2 = i; j2 < 2 * n; ++j2) {
                            const int pj = t.powers[j2] - (j2 == i ? 1 : 0);
                            if (pj <= 0 && j2 == i) continue;
                            if (t.powers[j2] == 0) continue;
                            double d = t.coeff * t.powers[i] * (j2 == i ? t.powers[i] - 1 : t.powers[j2]);
                            if (d == 0) continue;
                            for (int k = 0; k < 2 * n; ++k) {
                                int p = t.powers[k];
                                if (k == i) --p;
                                if (k == j2) --p;
                                for (int q = 0; q < p; ++q) d *= x[k];
                            }
                            out.hess(i, j2) += d;
                            if (j2 != i) out.hess(j2, i) += d;
                        }
                    }
                }
            }
            for (int j = 0; j < n; ++j)
                out.grad[j] = std::complex<double>(g[2 * j], g[2 * j + 1]);
            break;
        }
    }
    return out;
}

std::vector<double> ConvexDomain::axis_poly(const CPoint& z, const CVec& dir) const {
    const int n = spec_.dim;
    switch (spec_.family) {
        case DomainFamily::Ball: {
            std::vector<double> p(3, 0.0);
            p[0] = z.squaredNorm() - 1.0;
            p[1] = 2.0 * hdot(dir, z).real();
            p[2] = dir.squaredNorm();
            return p;
        }
        case DomainFamily::GeneralizedEllipsoid: {
            int deg = 0;
            for (int j = 0; j < n; ++j) deg = std::max(deg, 2 * spec_.exponents[j]);
            std::vector<double> acc(deg + 1, 0.0);
            acc[0] = -1.0;
            for (int j = 0; j < n; ++j) {
                const double a = std::norm(z[j]);
                const double b = 2.0 * (dir[j] * std::conj(z[j])).real();
                const double c = std::norm(dir[j]);
                std::vector<double> p{1.0};
                for (int k = 0; k < spec_.exponents[j]; ++k) mul_quadratic(p, a, b, c);
                for (std::size_t k = 0; k < p.size(); ++k) acc[k] += p[k];
            }
            return acc;
        }
        case DomainFamily::Polynomial: {
            const RVec x = to_real(z);
            const RVec u = to_real(dir);
            std::vector<double> acc{0.0};
            for (const auto& t : spec_.terms) {
                std::vector<double> p{t.coeff};
                for (int i = 0; i < 2 * n; ++i)
                    if (t.powers[i] > 0) mul_binomial_power(p, x[i], u[i], t.powers[i]);
                if (p.size() > acc.size()) acc.resize(p.size(), 0.0);
                for (std::size_t k = 0; k < p.size(); ++k) acc[k] += p[k];
            }
            return acc;
        }
    }
    return {};
}

// --- ray roots ----------------------------------------------------------------

double ray_level_root(const ConvexDomain& dom, const CPoint& x, const CVec& dir,
                      double level) {
    const CVec d = unit(dir);
    const std::vector<double> p = dom.axis_poly(x, d);
    const double p0 = poly_eval(p, 0.0);
    if (p0 >= level)
        throw ArgumentError("ray_level_root: start point is not below the target level");

    // bracket [lo, hi] with p(hi) >= level
    const double t_cap = 2.0 * dom.bounding_radius() + x.norm() + 1.0;
    double lo = 0.0;
    double hi = 1e-3 * t_cap;
    int guard = 0;
    while (poly_eval(p, hi) < level) {
        lo = hi;
        hi *= 2.0;
        if (hi > 4.0 * t_cap || ++guard > 200)
            throw ArgumentError("ray_level_root: level value is not reached inside the bounding box");
    }

    // bisection to a coarse bracket, then Newton polish on the exact polynomial
    for (int i = 0; i < 16; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (poly_eval(p, mid) < level)
            lo = mid;
        else
            hi = mid;
    }
    double t = hi;
    for (int i = 0; i < 60; ++i) {
        const double f = poly_eval(p, t) - level;
        const double df = poly_eval_deriv(p, t);
        if (df <= 0) break;
        const double step = f / df;
        const double tn = t - step;
        if (tn < lo || tn > hi) break;
        t = tn;
        if (std::abs(step) <= 1e-13 * (1.0 + t)) break;
    }
    return t;
}

double ray_level_root_warm(const ConvexDomain& dom, const CPoint& x, const CVec& dir,
                           double level, double warm) {
    if (warm > 0) {
        const CVec d = unit(dir);
        const std::vector<double> p = dom.axis_poly(x, d);
        double t = warm;
        double lo = 0, hi = -1;
        for (int i = 0; i < 40; ++i) {
            const double f = poly_eval(p, t) - level;
            if (f < 0)
                lo = std::max(lo, t);
            else
                hi = hi < 0 ? t : std::min(hi, t);
            const double df = poly_eval_deriv(p, t);
            double tn = df > 0 ? t - f / df : -1.0;
            if (!(tn > lo && (hi < 0 || tn < hi))) {
                if (hi < 0) break;
                tn = 0.5 * (lo + hi);
            }
            if (std::abs(tn - t) <= 1e-14 * (1.0 + t)) return tn;
            t = tn;
        }
    }
    return ray_level_root(dom, x, dir, level);
}

// --- projections ----------------------------------------------------------------

namespace {

// Real orthonormal frame spanning the given complex subspace (ambient space
// when the basis is empty).
std::vector<RVec> real_frame(int n, const std::vector<CVec>& complex_basis) {
    std::vector<RVec> cols;
    if (complex_basis.empty()) {
        for (int i = 0; i < 2 * n; ++i) {
            RVec e = RVec::Zero(2 * n);
            e[i] = 1.0;
            cols.push_back(e);
        }
        return cols;
    }
    for (const CVec& w : complex_basis) {
        cols.push_back(to_real(w));
        CVec iw = std::complex<double>(0, 1) * w;
        cols.push_back(to_real(iw));
    }
    return cols;
}

struct SliceEval {
    double value;
    RVec grad;    // d-dim gradient in slice coordinates
    RMat hess;    // d x d
};

SliceEval slice_eval(const ConvexDomain& dom, const CPoint& x0, const std::vector<RVec>& B,
                     const RVec& s, bool with_hess) {
    const int d = static_cast<int>(B.size());
    RVec amb = to_real(x0);
    for (int i = 0; i < d; ++i) amb += s[i] * B[i];
    const REval ev = dom.eval(to_complex(amb), with_hess);
    SliceEval out;
    out.value = ev.value;
    const RVec g = to_real(ev.grad);
    out.grad = RVec(d);
    for (int i = 0; i < d; ++i) out.grad[i] = g.dot(B[i]);
    if (with_hess) {
        out.hess = RMat(d, d);
        for (int i = 0; i < d; ++i) {
            const RVec hb = ev.hess * B[i];
            for (int j = 0; j < d; ++j) out.hess(i, j) = B[j].dot(hb);
        }
    }
    return out;
}

CVec lift_to_ambient(const CPoint& x0, const std::vector<RVec>& B, const RVec& s) {
    RVec amb = to_real(x0);
    for (int i = 0; i < static_cast<int>(B.size()); ++i) amb += s[i] * B[i];
    return to_complex(amb);
}

}  // namespace

namespace {

// One ray root within the slice, along slice direction u.
double slice_ray_root(const ConvexDomain& dom, const CPoint& x, const std::vector<RVec>& B,
                      const RVec& u, double level, double warm) {
    RVec amb_dir = RVec::Zero(2 * static_cast<int>(x.size()));
    for (int i = 0; i < static_cast<int>(B.size()); ++i) amb_dir += u[i] * B[i];
    return ray_level_root_warm(dom, x, to_complex(amb_dir), level, warm);
}

// Normal-map iteration: follow the ray to the level set, then re-aim along
// the gradient at the hit point. For convex level regions the hit distance
// never increases, so the iteration descends into a local basin; multiple
// seeds guard the global minimum.
struct NormalMapResult {
    RVec direction;
    double distance = 0;
};

NormalMapResult normal_map_descent(const ConvexDomain& dom, const CPoint& x,
                                   const std::vector<RVec>& B, RVec u, double level,
                                   double warm, int max_steps) {
    const int d = static_cast<int>(B.size());
    double t = slice_ray_root(dom, x, B, u, level, warm);
    for (int step = 0; step < max_steps; ++step) {
        RVec s = t * u;
        const SliceEval ev = slice_eval(dom, x, B, s, false);
        const double gn = ev.grad.norm();
        if (gn <= 1e-14) break;
        RVec u_next = ev.grad / gn;
        if ((u_next - u).norm() <= 1e-13) break;
        const double t_next = slice_ray_root(dom, x, B, u_next, level, t);
        if (t_next >= t * (1.0 - 1e-14)) {
            if (t_next < t) {
                u = u_next;
                t = t_next;
            }
            break;
        }
        u = u_next;
        t = t_next;
        (void)d;
    }
    return {u, t};
}

}  // namespace

LevelProjection project_to_level(const ConvexDomain& dom, const CPoint& x, double level,
                                 const std::vector<CVec>& complex_basis) {
    const int n = dom.dim();
    const std::vector<RVec> B = real_frame(n, complex_basis);
    const int d = static_cast<int>(B.size());

    const SliceEval at0 = slice_eval(dom, x, B, RVec::Zero(d), false);
    if (at0.value >= level)
        throw ArgumentError("project_to_level: point is not below the target level");

    LevelProjection result;
    const double gnorm0 = at0.grad.norm();

    // Seed set: the gradient ray plus slice axes plus a deterministic random
    // sprinkle; a short descent from each, then the best basin is followed
    // to convergence. A single gradient seed can land on the wrong face of
    // domains with nearly flat boundary pieces.
    std::vector<RVec> seeds;
    if (gnorm0 > 1e-10) seeds.push_back(RVec(at0.grad / gnorm0));
    for (int i = 0; i < d; ++i) {
        RVec e = RVec::Zero(d);
        e[i] = 1.0;
        seeds.push_back(e);
        seeds.push_back(RVec(-e));
    }
    for (int i = 0; i < 8; ++i) {
        Rng rng(19, 23, static_cast<std::uint64_t>(i));
        seeds.push_back(rng.sphere(d));
    }

    NormalMapResult best;
    best.distance = std::numeric_limits<double>::infinity();
    double warm = -1;
    for (const RVec& seed : seeds) {
        const NormalMapResult probe = normal_map_descent(dom, x, B, seed, level, warm, 4);
        warm = probe.distance;
        if (probe.distance < best.distance) best = probe;
    }
    if (std::isfinite(best.distance)) {
        best = normal_map_descent(dom, x, B, best.direction, level, best.distance, 80);
        const double march_t = best.distance;

        RVec s = march_t * best.direction;
        SliceEval ev = slice_eval(dom, x, B, s, true);
        double lambda = ev.grad.squaredNorm() > 0 ? s.dot(ev.grad) / ev.grad.squaredNorm() : 0.0;

        // Newton on F = (s - lambda*grad, value - level)
        bool ok = false;
        for (int it = 0; it < 60; ++it) {
            RVec f1 = s - lambda * ev.grad;
            const double f2 = ev.value - level;
            const double fn = std::sqrt(f1.squaredNorm() + f2 * f2);
            if (fn < 1e-13 * (1.0 + s.norm()) + 1e-15) {
                ok = true;
                break;
            }
            RMat J(d + 1, d + 1);
            J.topLeftCorner(d, d) = RMat::Identity(d, d) - lambda * ev.hess;
            J.block(0, d, d, 1) = -ev.grad;
            J.block(d, 0, 1, d) = ev.grad.transpose();
            J(d, d) = 0;
            RVec rhs(d + 1);
            rhs.head(d) = -f1;
            rhs[d] = -f2;
            const RVec delta = J.fullPivLu().solve(rhs);
            double step = 1.0;
            for (int bt = 0; bt < 25; ++bt) {
                const RVec s_try = s + step * delta.head(d);
                const double l_try = lambda + step * delta[d];
                SliceEval ev_try = slice_eval(dom, x, B, s_try, true);
                const RVec f1t = s_try - l_try * ev_try.grad;
                const double f2t = ev_try.value - level;
                if (std::sqrt(f1t.squaredNorm() + f2t * f2t) < fn || step < 1e-6) {
                    s = s_try;
                    lambda = l_try;
                    ev = ev_try;
                    break;
                }
                step *= 0.5;
            }
        }
        // Accept only a genuine nearest point: positive multiplier and no
        // farther than the best descent distance.
        if (ok && lambda > 0 && s.norm() <= march_t * (1.0 + 1e-9)) {
            result.foot = lift_to_ambient(x, B, s);
            result.distance = s.norm();
            result.newton_ok = true;
            return result;
        }
        // Newton did not certify; the converged descent is still a valid
        // (slightly less polished) projection.
        RVec sd = march_t * best.direction;
        result.foot = lift_to_ambient(x, B, sd);
        result.distance = march_t;
        result.newton_ok = false;
        return result;
    }

    // Fallback: deterministic direction sampling with local refinement.
    double fb_best = std::numeric_limits<double>::infinity();
    RVec best_u = RVec::Zero(d);
    const int n_dirs = 128 * std::max(1, d / 2);
    for (int i = 0; i < n_dirs; ++i) {
        Rng rng(11, 13, static_cast<std::uint64_t>(i));
        const RVec u = rng.sphere(d);
        try {
            const double t = slice_ray_root(dom, x, B, u, level, -1);
            if (t < fb_best) {
                fb_best = t;
                best_u = u;
            }
        } catch (const ArgumentError&) {
            // ray does not reach the level; skip
        }
    }
    if (!std::isfinite(fb_best))
        throw NumericalError("project_to_level: no direction reaches the level set");

    // pattern refinement on the sphere chart around the best ray
    RVec u = best_u;
    double scale = 0.5;
    for (int sweep = 0; sweep < 200 && scale > 1e-9; ++sweep) {
        bool improved = false;
        for (int axis = 0; axis < d; ++axis) {
            for (double sgn : {1.0, -1.0}) {
                RVec cand = u;
                cand[axis] += sgn * scale;
                cand.normalize();
                try {
                    const double t = slice_ray_root(dom, x, B, cand, level, fb_best);
                    if (t < fb_best) {
                        fb_best = t;
                        u = cand;
                        improved = true;
                    }
                } catch (const ArgumentError&) {
                }
            }
        }
        if (!improved) scale *= 0.5;
    }
    RVec s(d);
    for (int i = 0; i < d; ++i) s[i] = fb_best * u[i];
    result.foot = lift_to_ambient(x, B, s);
    result.distance = fb_best;
    result.newton_ok = false;
    return result;
}

BoundaryData boundary_distance(const ConvexDomain& dom, const CPoint& x) {
    if (dom.r(x) >= 0) throw ArgumentError("boundary_distance: point is not interior");
    const LevelProjection proj = project_to_level(dom, x, 0.0);
    BoundaryData bd;
    bd.foot = proj.foot;
    bd.delta = proj.distance;
    const REval ev = dom.eval(proj.foot, false);
    const double gn = ev.grad.norm();
    if (gn <= 0) throw NumericalError("boundary_distance: vanishing gradient at the foot");
    bd.normal = ev.grad / gn;
    bd.tube_radius = dom.tube_radius();
    return bd;
}

// --- directional distances -------------------------------------------------------

namespace {

double phase_root(const ConvexDomain& dom, const CPoint& x, const CVec& vhat, double level,
                  double theta, double warm) {
    const std::complex<double> zeta(std::cos(theta), std::sin(theta));
    return ray_level_root_warm(dom, x, zeta * vhat, level, warm);
}

}  // namespace

double directional_level_distance(const ConvexDomain& dom, const CPoint& x, double level,
                                  const CVec& v) {
    if (v.norm() <= 0) throw ArgumentError("directional distance: zero direction");
    const CVec vhat = unit(v);
    constexpr int kPhases = 128;
    const double step = 2.0 * M_PI / kPhases;

    double best = std::numeric_limits<double>::infinity();
    int best_i = 0;
    double warm = -1;
    for (int i = 0; i < kPhases; ++i) {
        const double t = phase_root(dom, x, vhat, level, i * step, warm);
        warm = t;
        if (t < best) {
            best = t;
            best_i = i;
        }
    }

    // Golden-section refinement of the best bracket to 1e-12 phase tolerance.
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = (best_i - 1) * step, b = (best_i + 1) * step;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = phase_root(dom, x, vhat, level, x1, best);
    double f2 = phase_root(dom, x, vhat, level, x2, best);
    while (b - a > 1e-12) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = phase_root(dom, x, vhat, level, x1, std::min(f1, f2));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = phase_root(dom, x, vhat, level, x2, std::min(f1, f2));
        }
        best = std::min({best, f1, f2});
    }
    return best;
}

double directional_boundary_distance(const ConvexDomain& dom, const CPoint& x,
                                     const CVec& v) {
    if (dom.r(x) >= 0) throw ArgumentError("directional_boundary_distance: point not interior");
    return directional_level_distance(dom, x, 0.0, v);
}

double level_set_distance(const ConvexDomain& dom, const CPoint& q, double eps,
                          const CVec& v) {
    if (eps <= 0) throw ArgumentError("level_set_distance: eps must be positive");
    if (eps > dom.spec().eps_max)
        throw ArgumentError("level_set_distance: eps exceeds the configured eps_max");
    const double rq = dom.r(q);
    if (rq >= 0) throw ArgumentError("level_set_distance: base point not interior");
    return ray_level_root(dom, q, v, rq + eps);
}

// --- tube radius & validation ------------------------------------------------------

double ConvexDomain::tube_radius() const {
    std::call_once(tube_once_, [this] {
        const int n = spec_.dim;
        const CPoint origin = CPoint::Zero(n);
        // deterministic probe feet: project rays from the origin
        std::vector<CPoint> feet;
        for (int i = 0; i < 16; ++i) {
            Rng rng(3, 5, static_cast<std::uint64_t>(i));
            const RVec u = rng.sphere(2 * n);
            try {
                const double t = ray_level_root(*this, origin, to_complex(u), 0.0);
                feet.push_back(to_complex(RVec(t * u)));
            } catch (const std::exception&) {
            }
        }
        double good = 0;
        for (int k = 1; k <= 16; ++k) {
            const double h = std::ldexp(1.0, -k);
            bool all_ok = true;
            for (const CPoint& p : feet) {
                const REval ev = eval(p, false);
                const CVec nrm = ev.grad / ev.grad.norm();
                const CPoint x = p - h * nrm;
                if (r(x) >= 0) {
                    all_ok = false;
                    break;
                }
                try {
                    const LevelProjection proj = project_to_level(*this, x, 0.0);
                    if (!proj.newton_ok || std::abs(proj.distance - h) > 1e-6 * h + 1e-12) {
                        all_ok = false;
                        break;
                    }
                } catch (const std::exception&) {
                    all_ok = false;
                    break;
                }
            }
            if (all_ok) {
                good = h;
                break;
            }
        }
        tube_radius_ = good > 0 ? good : std::ldexp(1.0, -16);
    });
    return tube_radius_;
}

std::vector<std::string> ConvexDomain::validate(int samples) const {
    std::vector<std::string> issues;
    const int n = spec_.dim;
    const CPoint origin = CPoint::Zero(n);
    if (r(origin) >= 0) issues.push_back("defining function is not negative at the origin anchor");

    // boundedness probe
    bool bounded = true;
    for (int i = 0; i < samples; ++i) {
        Rng rng(1, 2, static_cast<std::uint64_t>(i));
        const RVec u = rng.sphere(2 * n);
        if (r(to_complex(RVec(1.5 * bounding_radius_ * u))) <= 0) {
            bounded = false;
            break;
        }
    }
    if (!bounded) issues.push_back("domain escapes the declared bounding radius");

    // probe rays from the anchor: every direction must cross the boundary,
    // carry a nonvanishing gradient there, and the Hessian must be PSD at
    // interior points along the ray
    bool flagged_cross = false, flagged_grad = false, flagged_convex = false;
    for (int i = 0; i < samples; ++i) {
        Rng rng(1, 3, static_cast<std::uint64_t>(i));
        const RVec u = rng.sphere(2 * n);
        double t = 0;
        try {
            t = ray_level_root(*this, origin, to_complex(u), 0.0);
        } catch (const std::exception&) {
            if (!flagged_cross) {
                issues.push_back("no boundary crossing along a sampled ray (domain unbounded?)");
                flagged_cross = true;
            }
            continue;
        }
        const REval bev = eval(to_complex(RVec(t * u)), false);
        if (bev.grad.norm() < 1e-12 && !flagged_grad) {
            issues.push_back("vanishing gradient at a boundary sample");
            flagged_grad = true;
        }
        const double s = std::pow(rng.uniform(), 1.0 / (2 * n));
        const CPoint z = to_complex(RVec(s * t * u));
        if (r(z) >= 0) continue;
        const REval ev = eval(z, true);
        Eigen::SelfAdjointEigenSolver<RMat> es(ev.hess);
        const double lmin = es.eigenvalues().minCoeff();
        const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        if (lmin < -1e-9 * scale && !flagged_convex) {
            issues.push_back("convexity spot check failed (negative Hessian eigenvalue)");
            flagged_convex = true;
        }
    }

    if (spec_.family == DomainFamily::GeneralizedEllipsoid) {
        int mx = 1;
        for (int m : spec_.exponents) mx = std::max(mx, m);
        if (spec_.type_bound != 2 * mx)
            issues.push_back("type_bound does not equal 2*max(exponents)");
    }
    return issues;
}

}  // namespace kobalab
