#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kobalab/domain.hpp"
#include "kobalab/errors.hpp"
#include "kobalab/sampling.hpp"
#include "kobalab/stats.hpp"
#include "oracles.hpp"

using namespace kobalab;
using oracle::make_point2;

namespace {

ConvexDomain ball2() { return ConvexDomain(DomainSpec::ball(2)); }
ConvexDomain ell12() { return ConvexDomain(DomainSpec::ellipsoid({1, 2})); }

CPoint random_interior(const ConvexDomain& dom, Rng& rng) {
    const int d = 2 * dom.dim();
    for (;;) {
        const RVec u = rng.sphere(d);
        const double s = std::pow(rng.uniform(), 1.0 / d);
        const CPoint z = to_complex(RVec(dom.bounding_radius() * s * u));
        if (dom.r(z) < -1e-6) return z;
    }
}

}  // namespace

TEST_CASE("defining function values and derivatives at reference points") {
    const ConvexDomain ball = ball2();
    const CPoint z = make_point2(0.99, 0, 0, 0);
    const REval ev = ball.eval(z, true);
    CHECK(ev.value == doctest::Approx(-0.0199).epsilon(1e-12));
    CHECK(ev.grad[0].real() == doctest::Approx(1.98).epsilon(1e-12));
    CHECK(std::abs(ev.grad[1]) == doctest::Approx(0.0));

    const ConvexDomain ell = ell12();
    CHECK(ell.r(CPoint(CPoint::Zero(2))) == doctest::Approx(-1.0));
}

TEST_CASE("gradients and Hessians match central finite differences") {
    std::vector<DomainSpec> specs{DomainSpec::ball(2), DomainSpec::ellipsoid({1, 2}),
                                  DomainSpec::ellipsoid({1, 3})};
    // a convex polynomial domain: |z1|^2 + |z2|^2 + (Re z2)^4 - 0.8
    DomainSpec poly;
    poly.family = DomainFamily::Polynomial;
    poly.dim = 2;
    poly.type_bound = 4;
    poly.terms = {{1.0, {2, 0, 0, 0}}, {1.0, {0, 2, 0, 0}}, {1.0, {0, 0, 2, 0}},
                  {1.0, {0, 0, 0, 2}}, {1.0, {0, 0, 4, 0}}, {-0.8, {0, 0, 0, 0}}};
    specs.push_back(poly);

    for (const auto& spec : specs) {
        const ConvexDomain dom(spec);
        for (int i = 0; i < 16; ++i) {
            Rng rng(5, 55, static_cast<std::uint64_t>(i));
            const CPoint z = random_interior(dom, rng);
            const REval ev = dom.eval(z, true);
            const CVec fd = oracle::fd_gradient(dom, z);
            CHECK((ev.grad - fd).norm() <= 1e-6 * (1.0 + ev.grad.norm()));
            const RMat fdh = oracle::fd_hessian(dom, z);
            CHECK((ev.hess - fdh).norm() <= 1e-4 * (1.0 + ev.hess.norm()));
        }
    }
}

TEST_CASE("axis polynomial reproduces r along rays") {
    const ConvexDomain ell = ell12();
    Rng rng(6, 66, 3);
    const CPoint z = random_interior(ell, rng);
    const CVec dir = to_complex(rng.sphere(4));
    const auto p = ell.axis_poly(z, dir);
    for (double t : {0.0, 0.03, 0.17, 0.5}) {
        double horner = 0;
        for (std::size_t i = p.size(); i-- > 0;) horner = horner * t + p[i];
        CHECK(horner == doctest::Approx(ell.r(z + t * dir)).epsilon(1e-12));
    }
}

TEST_CASE("boundary gradient nonzero on a boundary grid") {
    for (const ConvexDomain& dom : {ball2(), ell12()}) {
        for (int i = 0; i < 32; ++i) {
            Rng rng(7, 77, static_cast<std::uint64_t>(i));
            const RVec u = rng.sphere(4);
            const double t = ray_level_root(dom, CPoint(CPoint::Zero(2)), to_complex(u), 0.0);
            const REval ev = dom.eval(to_complex(RVec(t * u)), false);
            CHECK(ev.grad.norm() > 1e-8);
        }
    }
}

TEST_CASE("boundary distance on reference configurations") {
    const ConvexDomain ball = ball2();
    const BoundaryData bd = boundary_distance(ball, make_point2(0.99, 0, 0, 0));
    CHECK(bd.delta == doctest::Approx(0.01).epsilon(1e-10));
    CHECK(bd.foot[0].real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(bd.normal[0].real() == doctest::Approx(1.0).epsilon(1e-10));

    const ConvexDomain ell = ell12();
    const BoundaryData be = boundary_distance(ell, make_point2(0.5, 0, 0, 0));
    CHECK(be.delta == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(be.foot[0].real() == doctest::Approx(1.0).epsilon(1e-10));

    // off-axis point: frozen value from the dense-sampling oracle
    const CPoint x = make_point2(0.3, 0, 0.3, 0);
    const BoundaryData bo = boundary_distance(ell, x);
    CHECK(bo.delta == doctest::Approx(0.6615322315654202).epsilon(1e-9));
    const double dense = oracle::dense_boundary_distance(ell, x, 4000);
    CHECK(bo.delta <= dense + 1e-9);
    CHECK(bo.delta >= dense - 1e-4);  // oracle refinement is coarser
}

TEST_CASE("boundary data invariants at tolerance") {
    for (const ConvexDomain& dom : {ball2(), ell12()}) {
        const bool distance_like = dom.spec().family == DomainFamily::Ball;
        for (int i = 0; i < 24; ++i) {
            Rng rng(8, 88, static_cast<std::uint64_t>(i));
            const BoundaryPatch patch = BoundaryPatch::pole(2, 0.3);
            const CPoint p = boundary_point(dom, patch, rng);
            const double h = rng.log_uniform(1e-5, 0.05);
            const CPoint x = fiber_point(dom, p, h);
            const BoundaryData bd = boundary_distance(dom, x);
            CHECK(std::abs((x - bd.foot).norm() - bd.delta) <= 1e-10 * (1 + bd.delta));
            CHECK(std::abs(dom.r(bd.foot)) <= 1e-10);
            // the displacement to the foot is exactly normal there (the
            // converged projection condition)
            const CVec step = unit(bd.foot - x);
            CHECK(hdot(step, bd.normal).real() > 0);
            CHECK((step - hdot(step, bd.normal) * bd.normal).norm() < 1e-8);
            // gradient at x aligns with the normal at the foot: exactly for
            // the ball (radial gradient), linearly in depth otherwise
            const CVec gx = unit(dom.eval(x, false).grad);
            const double sin_angle = (gx - hdot(gx, bd.normal) * bd.normal).norm();
            CHECK(sin_angle < (distance_like ? 1e-6 : 1e-6 + 2.0 * h));
        }
    }
}

TEST_CASE("directional boundary distance: reference values and bisection oracle") {
    const ConvexDomain ball = ball2();
    const CPoint x = make_point2(0.99, 0, 0, 0);
    CVec v(2);
    v << 0.0, 1.0;
    const double d_tangent = directional_boundary_distance(ball, x, v);
    CHECK(d_tangent == doctest::Approx(0.14106735979665885).epsilon(1e-10));
    CVec u(2);
    u << 1.0, 0.0;
    CHECK(directional_boundary_distance(ball, x, u) == doctest::Approx(0.01).epsilon(1e-10));

    // bisection oracle along the optimal phase agrees
    const double ref = oracle::bisect_ray(ball, x, v, 0.0);
    CHECK(d_tangent <= ref + 1e-10);
}

TEST_CASE("section distance dominates the boundary distance") {
    for (const ConvexDomain& dom : {ball2(), ell12()}) {
        for (int i = 0; i < 24; ++i) {
            Rng rng(9, 99, static_cast<std::uint64_t>(i));
            const CPoint z = random_interior(dom, rng);
            const CVec v = to_complex(rng.sphere(4));
            const double dv = directional_boundary_distance(dom, z, v);
            const double d0 = boundary_distance(dom, z).delta;
            CHECK(dv >= d0 - 1e-10);
        }
    }
}

TEST_CASE("level set distance: closed forms and monotonicity") {
    const ConvexDomain ball = ball2();
    const CPoint q = make_point2(0.99, 0, 0, 0);
    CVec tangent(2), radial(2);
    tangent << 0.0, 1.0;
    radial << 1.0, 0.0;
    CHECK(level_set_distance(ball, q, 0.0199, tangent) ==
          doctest::Approx(std::sqrt(0.0199)).epsilon(1e-10));
    CHECK(level_set_distance(ball, q, 0.0199, radial) == doctest::Approx(0.01).epsilon(1e-10));

    double prev = 0;
    for (double eps : {1e-6, 1e-4, 1e-3, 1e-2, 0.1}) {
        const double d = level_set_distance(ball, q, eps, tangent);
        CHECK(d > prev);
        prev = d;
    }
}

TEST_CASE("|r| is comparable to delta in the tube and the band does not widen") {
    for (const ConvexDomain& dom : {ball2(), ell12()}) {
        std::vector<double> log_h, log_ratio;
        for (int i = 0; i < 120; ++i) {
            Rng rng(10, 110, static_cast<std::uint64_t>(i));
            const BoundaryPatch patch = BoundaryPatch::pole(2, 0.3);
            const CPoint p = boundary_point(dom, patch, rng);
            const double h = rng.log_uniform(1e-6, 0.05);
            const CPoint x = fiber_point(dom, p, h);
            const double ratio = std::abs(dom.r(x)) / boundary_distance(dom, x).delta;
            CHECK(ratio > 0.1);
            CHECK(ratio < 10.0);
            log_h.push_back(std::log(1.0 / h));
            log_ratio.push_back(std::log(ratio));
        }
        const auto slope = ols_slope(log_h, log_ratio);
        REQUIRE(slope.has_value());
        CHECK(std::abs(*slope) < 0.05);
    }
}

TEST_CASE("error paths") {
    CHECK_THROWS_AS(DomainSpec::from_json_text("{\"family\":\"torus\",\"dimension\":2}"),
                    ConfigError);
    CHECK_THROWS_AS(DomainSpec::from_json_text("not json"), ConfigError);
    const ConvexDomain ball = ball2();
    CHECK_THROWS_AS(boundary_distance(ball, make_point2(2.0, 0, 0, 0)), ArgumentError);
    CVec v(2);
    v << 1.0, 0.0;
    // level far above anything reachable inside the bounding box
    CHECK_THROWS_AS(ray_level_root(ball, CPoint(CPoint::Zero(2)), v, 1e9), ArgumentError);
    CHECK_THROWS_AS(level_set_distance(ball, make_point2(0.5, 0, 0, 0), 10.0, v),
                    ArgumentError);
}

TEST_CASE("validate flags a non-convex polynomial spec") {
    DomainSpec bad;
    bad.family = DomainFamily::Polynomial;
    bad.dim = 2;
    bad.type_bound = 4;
    // saddle term Re(z1)^2 - Im(z1)^2 breaks convexity
    bad.terms = {{1.0, {2, 0, 0, 0}}, {-1.0, {0, 2, 0, 0}}, {1.0, {0, 0, 2, 0}},
                 {1.0, {0, 0, 0, 2}}, {1.0, {0, 0, 4, 0}}, {4.0, {0, 0, 0, 4}},
                 {-0.5, {0, 0, 0, 0}}};
    const ConvexDomain dom(bad);
    const auto issues = dom.validate();
    CHECK(!issues.empty());
}
