#pragma once

// Upper half-space model of hyperbolic 3-space. Points are (w, t) with w in C
// and t > 0; the ideal boundary is C together with the point at infinity.
// Moebius maps act on the boundary and extend to isometries of the interior.
//
// Conventions fixed here and relied on everywhere else:
//  * visual densities are measured against |dxi| on C; the value at infinity
//    is the renormalized one, lim |xi|^2 * v_x(xi) evaluated as 2t,
//  * a horosphere is a level set {v_x(base) = size}; for a finite base it is
//    the Euclidean sphere of radius 1/size tangent to C at the base, for the
//    base at infinity it is the horizontal plane t = size/2.

#include <complex>
#include <vector>

#include "errors.hpp"

namespace epsteinlab {

using cplx = std::complex<double>;

struct H3Point {
    cplx w;
    double t;

    H3Point(cplx w_, double t_) : w(w_), t(t_) {
        if (!(t > 0.0))
            throw BadArgument("H3Point: height must be positive");
    }
};

// Finite complex number or the point at infinity.
struct BoundaryPoint {
    cplx w{0.0, 0.0};
    bool infinite = false;

    BoundaryPoint() = default;
    BoundaryPoint(cplx w_) : w(w_) {}
    static BoundaryPoint infinity() {
        BoundaryPoint p;
        p.infinite = true;
        return p;
    }
};

// Holomorphic 3-jet of a map at a point: value and first three derivatives.
struct HoloJet3 {
    cplx f{0.0};
    cplx df{0.0};
    cplx d2f{0.0};
    cplx d3f{0.0};
};

// Fractional linear map z -> (az+b)/(cz+d), stored with ad - bc = 1.
class MoebiusMap {
public:
    MoebiusMap(cplx a, cplx b, cplx c, cplx d);

    static MoebiusMap identity() { return MoebiusMap(1.0, 0.0, 0.0, 1.0); }

    cplx a() const { return a_; }
    cplx b() const { return b_; }
    cplx c() const { return c_; }
    cplx d() const { return d_; }

    BoundaryPoint apply(const BoundaryPoint& z) const;
    cplx apply(cplx z) const; // throws DomainError at the pole

    // Derivative 1/(cz+d)^2 and full 3-jet at a finite non-pole point.
    cplx derivative(cplx z) const;
    HoloJet3 jet(cplx z) const;

    MoebiusMap inverse() const;
    friend MoebiusMap compose(const MoebiusMap& f, const MoebiusMap& g);

private:
    cplx a_, b_, c_, d_;
};

// Isometric extension of a Moebius map to the interior.
H3Point poincare_extend(const MoebiusMap& m, const H3Point& x);

double hyp_distance(const H3Point& x, const H3Point& y);

// Density of the visual metric of x at a boundary point, against |dxi|
// (renormalized at infinity, see header comment).
double visual_density(const H3Point& x, const BoundaryPoint& xi);

struct Horosphere {
    BoundaryPoint base;
    double size; // visual-density value on the level set

    Horosphere(BoundaryPoint base_, double size_) : base(base_), size(size_) {
        if (!(size > 0.0))
            throw BadArgument("Horosphere: size must be positive");
    }
};

// Horosphere encoding a conformal density value e^u at a finite point z.
Horosphere horosphere_of_metric(cplx z, double u);

// Signed residual of x against the level set: v_x(base) - size.
double horosphere_residual(const Horosphere& h, const H3Point& x);

// Euclidean shape of a horosphere with finite base: sphere centre (base, r)
// and radius r = 1/size. Throws BadArgument for the base at infinity.
struct SphereShape {
    cplx center_w;
    double center_t;
    double radius;
};
SphereShape horosphere_shape(const Horosphere& h);

// One point on the horosphere (the top of the sphere, or a point of the
// plane when the base is at infinity). Used to transport horospheres.
H3Point horosphere_witness(const Horosphere& h);

// Image of a horosphere under an isometry: horospheres map to horospheres,
// so the image is pinned down by the new base and one transported point.
Horosphere mobius_apply(const MoebiusMap& m, const Horosphere& h);

} // namespace epsteinlab
