#include "hyperbolic.hpp"

#include <cmath>

namespace epsteinlab {

namespace {

double sq(double x) { return x * x; }
double abs2(cplx z) { return std::norm(z); }

} // namespace

MoebiusMap::MoebiusMap(cplx a, cplx b, cplx c, cplx d) {
    const cplx det = a * d - b * c;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    if (!(scale > 0.0) || std::abs(det) < 1e-14 * sq(scale))
        throw BadArgument("MoebiusMap: coefficient matrix is singular");
    const cplx s = std::sqrt(det); // principal branch; sign is immaterial
    a_ = a / s;
    b_ = b / s;
    c_ = c / s;
    d_ = d / s;
}

BoundaryPoint MoebiusMap::apply(const BoundaryPoint& z) const {
    if (z.infinite) {
        if (std::abs(c_) == 0.0)
            return BoundaryPoint::infinity();
        return BoundaryPoint(a_ / c_);
    }
    const cplx den = c_ * z.w + d_;
    if (std::abs(den) == 0.0)
        return BoundaryPoint::infinity();
    return BoundaryPoint((a_ * z.w + b_) / den);
}

cplx MoebiusMap::apply(cplx z) const {
    const cplx den = c_ * z + d_;
    if (std::abs(den) < 1e-150)
        throw DomainError("MoebiusMap: evaluation at a pole");
    return (a_ * z + b_) / den;
}

cplx MoebiusMap::derivative(cplx z) const {
    const cplx den = c_ * z + d_;
    if (std::abs(den) < 1e-150)
        throw DomainError("MoebiusMap: derivative at a pole");
    return 1.0 / (den * den); // ad - bc = 1
}

HoloJet3 MoebiusMap::jet(cplx z) const {
    const cplx den = c_ * z + d_;
    if (std::abs(den) < 1e-150)
        throw DomainError("MoebiusMap: jet at a pole");
    HoloJet3 j;
    const cplx den2 = den * den;
    j.f = (a_ * z + b_) / den;
    j.df = 1.0 / den2;
    j.d2f = -2.0 * c_ / (den2 * den);
    j.d3f = 6.0 * c_ * c_ / (den2 * den2);
    return j;
}

MoebiusMap MoebiusMap::inverse() const {
    return MoebiusMap(d_, -b_, -c_, a_);
}

MoebiusMap compose(const MoebiusMap& f, const MoebiusMap& g) {
    return MoebiusMap(f.a_ * g.a_ + f.b_ * g.c_, f.a_ * g.b_ + f.b_ * g.d_,
                      f.c_ * g.a_ + f.d_ * g.c_, f.c_ * g.b_ + f.d_ * g.d_);
}

H3Point poincare_extend(const MoebiusMap& m, const H3Point& x) {
    // Standard extension formula for a normalized matrix: with D = cw + d,
    //   w' = ((aw+b) conj(D) + a conj(c) t^2) / (|D|^2 + |c|^2 t^2),
    //   t' = t / (|D|^2 + |c|^2 t^2).
    // The denominator is positive for t > 0, so the extension is total.
    const cplx D = m.c() * x.w + m.d();
    const double den = abs2(D) + abs2(m.c()) * sq(x.t);
    const cplx wp = ((m.a() * x.w + m.b()) * std::conj(D) +
                     m.a() * std::conj(m.c()) * sq(x.t)) /
                    den;
    return H3Point(wp, x.t / den);
}

double hyp_distance(const H3Point& x, const H3Point& y) {
    const double arg =
        1.0 + (abs2(x.w - y.w) + sq(x.t - y.t)) / (2.0 * x.t * y.t);
    return std::acosh(std::max(arg, 1.0));
}

double visual_density(const H3Point& x, const BoundaryPoint& xi) {
    if (xi.infinite)
        return 2.0 * x.t;
    return 2.0 * x.t / (abs2(xi.w - x.w) + sq(x.t));
}

Horosphere horosphere_of_metric(cplx z, double u) {
    return Horosphere(BoundaryPoint(z), std::exp(u));
}

double horosphere_residual(const Horosphere& h, const H3Point& x) {
    return visual_density(x, h.base) - h.size;
}

SphereShape horosphere_shape(const Horosphere& h) {
    if (h.base.infinite)
        throw BadArgument("horosphere_shape: base at infinity is a plane");
    const double r = 1.0 / h.size;
    return SphereShape{h.base.w, r, r};
}

H3Point horosphere_witness(const Horosphere& h) {
    if (h.base.infinite)
        return H3Point(0.0, h.size / 2.0);
    return H3Point(h.base.w, 2.0 / h.size);
}

Horosphere mobius_apply(const MoebiusMap& m, const Horosphere& h) {
    const BoundaryPoint new_base = m.apply(h.base);
    const H3Point on_sphere = poincare_extend(m, horosphere_witness(h));
    const double new_size = visual_density(on_sphere, new_base);
    return Horosphere(new_base, new_size);
}

} // namespace epsteinlab
