#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "kobalab/geometry.hpp"

namespace kobalab {

enum class DomainFamily { Ball, GeneralizedEllipsoid, Polynomial };

// Monomial in the 2n interleaved real coordinates.
struct MonomialTerm {
    double coeff = 0;
    std::vector<int> powers;
};

struct DomainSpec {
    DomainFamily family = DomainFamily::Ball;
    int dim = 2;                      // complex dimension n
    std::vector<int> exponents;      // generalized ellipsoid: {r = sum |z_j|^(2 m_j) - 1}
    std::vector<MonomialTerm> terms;  // polynomial family
    int type_bound = 2;              // declared maximal line type L

    // chart configuration
    double h_max = 0.1;     // admissible sampling depth
    double eps_max = 0.45;  // largest level shift for polydisks / M

    static DomainSpec ball(int n);
    static DomainSpec ellipsoid(std::vector<int> m);
    static DomainSpec from_json_text(const std::string& text);
    static DomainSpec from_json_file(const std::string& path);
    std::string family_name() const;
    std::string label() const;
};

struct REval {
    double value = 0;
    CVec grad;   // g_j = dr/dx_j + i dr/dy_j in interleaved real coordinates
    RMat hess;   // 2n x 2n real Hessian (only when requested)
};

struct BoundaryData {
    CPoint foot;          // nearest boundary point pi(x)
    double delta = 0;     // delta_Omega(x)
    CVec normal;          // outward unit normal at the foot
    double tube_radius = 0;
};

// Defining-function evaluator plus cached per-domain quantities. All
// methods are const and safe for concurrent use.
class ConvexDomain {
  public:
    explicit ConvexDomain(DomainSpec spec);

    const DomainSpec& spec() const { return spec_; }
    int dim() const { return spec_.dim; }

    double r(const CPoint& z) const;
    REval eval(const CPoint& z, bool with_hessian = false) const;

    // Exact coefficients of the univariate restriction t -> r(z + t*dir),
    // where dir is read as the real direction with interleaved parts of a
    // complex vector. Exact for every supported family.
    std::vector<double> axis_poly(const CPoint& z, const CVec& dir) const;

    // Omega is contained in the ball of this radius about the origin.
    double bounding_radius() const { return bounding_radius_; }

    // Largest dyadic depth at which the Newton projection verifiably
    // converges from a deterministic probe set (the delta_0 of the tube).
    double tube_radius() const;

    // Spot checks of the declared invariants: boundedness, interior
    // anchor, convexity samples, type bound consistency. Returns a list of
    // violated checks (empty means pass).
    std::vector<std::string> validate(int samples = 64) const;

  private:
    DomainSpec spec_;
    double bounding_radius_ = 0;
    mutable std::once_flag tube_once_;
    mutable double tube_radius_ = 0;
};

// --- boundary quantities ---------------------------------------------------

// delta_Omega(x), pi(x) and the outward normal. Newton on the Lagrange
// system seeded by a gradient-ray march, dense direction sampling as a
// fallback. Throws NumericalError when both fail.
BoundaryData boundary_distance(const ConvexDomain& dom, const CPoint& x);

// Distance from x to the level set {r = level} restricted to the affine
// subspace x + span_R(columns of basis_real); basis columns must be
// orthonormal. Full ambient space when basis is empty.
struct LevelProjection {
    CPoint foot;
    double distance = 0;
    bool newton_ok = false;   // false when the dense fallback produced it
};
LevelProjection project_to_level(const ConvexDomain& dom, const CPoint& x, double level,
                                 const std::vector<CVec>& complex_basis = {});

// First positive root of r(x + t*dir) = level along a real ray; bracketed
// bisection tightened by Newton polish on the exact axis polynomial.
double ray_level_root(const ConvexDomain& dom, const CPoint& x, const CVec& dir,
                      double level);

// Same root with a warm initial guess from a nearby ray. Bracket-guarded
// Newton on the axis polynomial; falls back to the cold version.
double ray_level_root_warm(const ConvexDomain& dom, const CPoint& x, const CVec& dir,
                           double level, double warm);

// delta_Omega(x, v): minimum over the phase circle of the ray root to the
// boundary within the complex line x + C*v. 128-phase grid plus
// golden-section refinement.
double directional_boundary_distance(const ConvexDomain& dom, const CPoint& x,
                                     const CVec& v);

// Same minimization against the level set {r = level}.
double directional_level_distance(const ConvexDomain& dom, const CPoint& x, double level,
                                  const CVec& v);

// Distance from q to {r = r(q) + eps} along the single real ray direction v.
double level_set_distance(const ConvexDomain& dom, const CPoint& q, double eps,
                          const CVec& v);

}  // namespace kobalab
