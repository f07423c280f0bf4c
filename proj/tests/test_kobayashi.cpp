#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kobalab/kobayashi.hpp"
#include "kobalab/pseudodistance.hpp"
#include "kobalab/samplers.hpp"
#include "oracles.hpp"

using namespace kobalab;
using oracle::make_point2;

namespace {

ConvexDomain ball2() { return ConvexDomain(DomainSpec::ball(2)); }
ConvexDomain ell12() { return ConvexDomain(DomainSpec::ellipsoid({1, 2})); }

}  // namespace

TEST_CASE("infinitesimal bounds: center of the ball, ratio and homogeneity") {
    const ConvexDomain ball = ball2();
    const CPoint z = CPoint::Zero(2);
    CVec v(2);
    v << 1.0, 0.0;
    const BoundPair b = infinitesimal_bounds(ball, z, v);
    CHECK(b.lo == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(b.hi == doctest::Approx(1.0).epsilon(1e-10));
    // the exact metric at the center is |v|, inside the bracket
    CHECK(b.lo <= 1.0);
    CHECK(1.0 <= b.hi);
    CHECK(b.hi / b.lo == doctest::Approx(2.0));

    const BoundPair b2 = infinitesimal_bounds(ball, z, CVec(2.0 * v));
    CHECK(b2.lo == doctest::Approx(2.0 * b.lo));
    CHECK(b2.hi == doctest::Approx(2.0 * b.hi));
}

TEST_CASE("path length bounds: degenerate, factor two, diameter segment") {
    const ConvexDomain ball = ball2();
    const Path degenerate{{make_point2(0.1, 0, 0, 0)}};
    const BoundPair zero = path_length_bounds(ball, degenerate);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi == 0.0);

    const Path radius{{CPoint(CPoint::Zero(2)), make_point2(0.5, 0, 0, 0)}};
    const BoundPair rb = path_length_bounds(ball, radius);
    CHECK(rb.hi / rb.lo == doctest::Approx(2.0).epsilon(1e-2));

    const Path diameter{{make_point2(-0.9, 0, 0, 0), make_point2(0.9, 0, 0, 0)}};
    const BoundPair db = path_length_bounds(ball, diameter);
    const double exact = 2.0 * std::atanh(0.9);
    CHECK(db.hi >= exact);
    CHECK(db.lo <= exact);
    // the straight integrand is 1/(1-|s|), integral 2 log 10
    CHECK(db.hi == doctest::Approx(2.0 * std::log(10.0)).epsilon(2e-3));
}

TEST_CASE("almost geodesic: degenerate input and case selection") {
    const ConvexDomain ball = ball2();
    const CPoint x = make_point2(0.99, 0, 0, 0);
    const Path same = almost_geodesic(ball, x, x);
    CHECK(same.knots.size() == 1);

    // the radial reference pair has M = 0.017901 > max(|r|) = 0.0199?  no:
    // |r(x)| = 0.0199 > M, so this is a case-1 (fiber-like) pair
    const CPoint y = make_point2(0.999, 0, 0, 0);
    const double m = pseudo_distance_inf(ball, x, y);
    CHECK(m < std::max(std::abs(ball.r(x)), std::abs(ball.r(y))));

    // a tangential pair at matched depth is case 2 and its lift reaches
    // the comparison level
    SandwichOptions opts;
    opts.height_search = false;
    const CPoint a = make_point2(0.9999, 0, 0, 0);
    const CPoint b = make_point2(0.9998, 0, 0.015, 0);
    const double mab = pseudo_distance_inf(ball, a, b);
    CHECK(mab > std::max(std::abs(ball.r(a)), std::abs(ball.r(b))));
    const Path lifted = almost_geodesic(ball, a, b, opts);
    REQUIRE(lifted.knots.size() == 4);
    CHECK(std::abs(ball.r(lifted.knots[1])) == doctest::Approx(mab).epsilon(1e-6));
    CHECK(std::abs(ball.r(lifted.knots[2])) == doctest::Approx(mab).epsilon(1e-6));

    // Both candidates are admissible; the reported upper bound is the
    // family minimum. Under the certified integrand |v|/delta the straight
    // chord usually wins even for boundary-hugging pairs (normal lifts pay
    // the full est1 factor), so only the min is asserted.
    const BoundPair straight = path_length_bounds(ball, Path{{a, b}});
    const BoundPair lifted_b = path_length_bounds(ball, lifted);
    const DistanceSandwich sw = distance_sandwich(ball, a, b);
    CHECK(sw.k_up <= std::min(straight.hi, lifted_b.hi) + 1e-9);
}

TEST_CASE("sandwich brackets the ball oracle") {
    const ConvexDomain ball = ball2();
    const CPoint x = make_point2(0.99, 0, 0, 0);
    const CPoint y = make_point2(0.999, 0, 0, 0);
    const DistanceSandwich s = distance_sandwich(ball, x, y);
    const double exact = oracle::ball_distance(x, y);
    CHECK(exact == doctest::Approx(1.1535487548879437).epsilon(1e-10));
    CHECK(s.k_lo <= exact + 1e-9);
    CHECK(exact <= s.k_up + 1e-9);
    CHECK(s.k_lo >= 0);
    CHECK(s.k_lo <= s.k_up);
    CHECK(s.g == doctest::Approx(2.1773699839818863).epsilon(1e-6));
    CHECK(s.case_tag == 1);

    for (int i = 0; i < 30; ++i) {
        Rng rng(41, 410, static_cast<std::uint64_t>(i));
        PairFamilyConfig cfg;
        cfg.h = rng.log_uniform(1e-5, 1e-1);
        const auto [a, b] = draw_pair(ball, cfg, rng);
        const DistanceSandwich sw = distance_sandwich(ball, a, b, SandwichOptions::bulk());
        const double k = oracle::ball_distance(a, b);
        CHECK(sw.k_lo <= k + 1e-9);
        CHECK(k <= sw.k_up + 1e-9);
    }
}

TEST_CASE("sandwich interval is symmetric in its arguments") {
    const ConvexDomain ell = ell12();
    for (int i = 0; i < 6; ++i) {
        Rng rng(42, 420, static_cast<std::uint64_t>(i));
        PairFamilyConfig cfg;
        cfg.h = rng.log_uniform(1e-4, 1e-2);
        const auto [a, b] = draw_pair(ell, cfg, rng);
        const DistanceSandwich s1 = distance_sandwich(ell, a, b, SandwichOptions::bulk());
        const DistanceSandwich s2 = distance_sandwich(ell, b, a, SandwichOptions::bulk());
        CHECK(s1.k_lo == doctest::Approx(s2.k_lo).epsilon(1e-8));
        CHECK(s1.k_up == doctest::Approx(s2.k_up).epsilon(1e-8));
    }
}

TEST_CASE("upper bounds decrease under domain inclusion on shared paths") {
    // the unit ball is contained in the m=(1,2) ellipsoid domain
    const ConvexDomain ball = ball2();
    const ConvexDomain ell = ell12();
    for (int i = 0; i < 8; ++i) {
        Rng rng(43, 430, static_cast<std::uint64_t>(i));
        PairFamilyConfig cfg;
        cfg.h = rng.log_uniform(1e-3, 1e-2);
        const auto [a, b] = draw_pair(ball, cfg, rng);
        const Path chord{{a, b}};
        CHECK(path_length_bounds(ell, chord).hi <= path_length_bounds(ball, chord).hi + 1e-9);
    }
}

TEST_CASE("upper bounds satisfy the triangle inequality via concatenation") {
    const ConvexDomain ball = ball2();
    Rng rng(44, 440, 0);
    PairFamilyConfig cfg;
    cfg.h = 1e-3;
    const auto [x, y] = draw_pair(ball, cfg, rng);
    const auto [x2, z] = draw_pair(ball, cfg, rng);
    (void)x2;
    const DistanceSandwich sxy = distance_sandwich(ball, x, y, SandwichOptions::bulk());
    const DistanceSandwich syz = distance_sandwich(ball, y, z, SandwichOptions::bulk());
    // concatenated witness admitted into the candidate family
    Path concat = sxy.witness;
    const Path& tail = syz.witness;
    // witness paths are canonically oriented; align them at y
    std::vector<CPoint> knots = concat.knots;
    if ((knots.back() - y).norm() > 1e-12) std::reverse(knots.begin(), knots.end());
    std::vector<CPoint> tail_knots = tail.knots;
    if ((tail_knots.front() - y).norm() > 1e-12)
        std::reverse(tail_knots.begin(), tail_knots.end());
    for (std::size_t i = 1; i < tail_knots.size(); ++i) knots.push_back(tail_knots[i]);
    concat.knots = knots;
    const std::vector<Path> extra{concat};
    const DistanceSandwich sxz =
        distance_sandwich(ball, x, z, SandwichOptions::bulk(), &extra);
    CHECK(sxz.k_up <= sxy.k_up + syz.k_up + 1e-4 + 1e-9);
}

TEST_CASE("polydisk shell separation is positive and stable in depth") {
    const ConvexDomain ball = ball2();
    double prev = -1;
    for (double h : {1e-2, 1e-3, 1e-4}) {
        const CPoint x = make_point2(1.0 - h, 0, 0, 0);
        const double sep = polydisk_separation(ball, x, 2.0, 128, 42);
        CHECK(sep > 0.05);
        if (prev > 0) CHECK(std::abs(std::log(sep / prev)) < std::log(1.6));
        prev = sep;
    }
    CHECK_THROWS_AS(polydisk_separation(ball, make_point2(0.99, 0, 0, 0), 0.5, 8, 1),
                    ArgumentError);
}
