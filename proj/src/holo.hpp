#pragma once

// Holomorphic 3-jets, a small expression language for locally injective maps,
// Schwarzian derivatives, and quadratic-differential bookkeeping.
//
// Jets are (f, f', f'', f''') at a point; everything downstream needs exactly
// this much: Schwarzians need three derivatives, density pushforwards need
// the nonlinearity f''/f' and its derivative.

#include <complex>
#include <functional>
#include <memory>
#include <string>

#include "errors.hpp"
#include "hyperbolic.hpp"

namespace epsteinlab {

// ---------------------------------------------------------------------------
// Jet arithmetic.

HoloJet3 jet_identity(cplx z);
HoloJet3 jet_constant(cplx c);
HoloJet3 jet_add(const HoloJet3& a, const HoloJet3& b);
HoloJet3 jet_scale(cplx s, const HoloJet3& a);
HoloJet3 jet_mul(const HoloJet3& a, const HoloJet3& b);

// Jet of outer . inner, where `outer` is the jet of the outer map taken at
// the point inner.f.
HoloJet3 jet_compose(const HoloJet3& outer, const HoloJet3& inner);

// ---------------------------------------------------------------------------
// Expressions.

class ExprNode;

// A holomorphic map on a declared domain. Univalence is a declaration made
// by whoever builds the expression (scenes declare it for their charts); it
// is recorded, not checked.
struct HoloExpr {
    std::shared_ptr<const ExprNode> root;
    bool declared_univalent = false;

    HoloJet3 jet(cplx z) const;
    cplx eval(cplx z) const { return jet(z).f; }
};

// Vocabulary:
//   identity
//   constant(c)           also: const(c)
//   affine(a, b)          z -> a z + b
//   mobius(a, b, c, d)    z -> (a z + b)/(c z + d)
//   power(n)              z -> z^n, integer n (n < 0 excludes 0)
//   rpow(alpha)           z -> z^alpha, principal branch, cut (-inf, 0]
//   exp, log              log is principal, cut (-inf, 0]
//   koebe                 z -> z/(1-z)^2
//   sum(f, g, ...)        left fold
//   product(f, g, ...)    left fold
//   compose(f, g, ...)    f . g . ..., rightmost applied first
HoloExpr parse_expr(const std::string& text);

// Constructors used directly by scenes and tests.
HoloExpr expr_identity();
HoloExpr expr_constant(cplx c);
HoloExpr expr_affine(cplx a, cplx b);
HoloExpr expr_mobius(const MoebiusMap& m);
HoloExpr expr_power(int n);
HoloExpr expr_rpow(double alpha);
HoloExpr expr_exp();
HoloExpr expr_log();
HoloExpr expr_koebe();
HoloExpr expr_sum(HoloExpr f, HoloExpr g);
HoloExpr expr_product(HoloExpr f, HoloExpr g);
HoloExpr expr_compose(HoloExpr outer, HoloExpr inner);

// ---------------------------------------------------------------------------
// Schwarzian derivative.

// S(f) = f'''/f' - (3/2)(f''/f')^2. Throws CriticalPointError where f' = 0.
cplx schwarzian(const HoloJet3& jet);
cplx schwarzian(const HoloExpr& e, cplx z);

// Residual of the cocycle rule S(f.g) = (S(f).g) g'^2 + S(g) at z.
double schwarzian_compose_check(const HoloExpr& f, const HoloExpr& g, cplx z);

// ---------------------------------------------------------------------------
// Quadratic differentials.

struct QuadDifferentialSample {
    cplx z;
    cplx value;
};

// Pullback phi~(z) = phi(g(z)) g'(z)^2 of a quadratic differential along g.
QuadDifferentialSample quad_pullback(const std::function<cplx(cplx)>& phi,
                                     const HoloExpr& g, cplx z);

// |phi| / rho for a metric-tensor density rho = e^{2u} (hyperbolic density of
// the unit disk at the origin: rho = 4). Invariant under pulling back both.
double pointwise_norm(cplx phi_value, double rho);

// Hyperbolic metric-tensor density of the unit disk, 4/(1-|z|^2)^2.
double disk_density(cplx z);

// ---------------------------------------------------------------------------
// Nehari scan.

struct GridSpec {
    int nr = 60;      // radial samples; r = 0 is always included
    int ntheta = 64;  // angular samples
    double rmax = 0.99;
};

struct NehariScanResult {
    double sup_norm = 0.0;
    cplx argmax{0.0};
    bool within_bound = false; // sup <= 3/2 + tolerance
};

// Scans |S(e)| / rho_disk over a polar grid in the unit disk. The expression
// must be declared univalent by the caller; a univalent map satisfies
// sup <= 3/2, which is what the flag reports.
NehariScanResult nehari_scan(const HoloExpr& e, const GridSpec& grid,
                             double tolerance = 1e-9);

} // namespace epsteinlab
