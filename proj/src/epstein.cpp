#include "epstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epsteinlab {

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Mat2 Mat2::identity() { return Mat2{1.0, 0.0, 0.0, 1.0}; }
Mat2 Mat2::diag(double x, double y) { return Mat2{x, 0.0, 0.0, y}; }
Mat2 Mat2::operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
Mat2 Mat2::operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
Mat2 Mat2::operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}
Mat2 Mat2::scaled(double s) const { return {s * a, s * b, s * c, s * d}; }
Mat2 Mat2::transpose() const { return {a, c, b, d}; }
double Mat2::det() const { return a * d - b * c; }
double Mat2::trace() const { return a + d; }
double Mat2::frobenius() const { return std::sqrt(a * a + b * b + c * c + d * d); }

Mat2 Mat2::inverse() const {
    const double dt = det();
    if (std::abs(dt) < 1e-300 * std::max(1.0, frobenius()))
        throw Error("Mat2: singular matrix");
    return Mat2{d / dt, -b / dt, -c / dt, a / dt};
}

std::array<double, 2> Mat2::eigenvalues() const {
    const double tr = trace();
    double disc = 0.25 * tr * tr - det();
    if (disc < 0.0) {
        if (disc < -1e-8 * std::max(1.0, tr * tr))
            throw Error("Mat2: complex eigenvalues");
        disc = 0.0;
    }
    const double s = std::sqrt(disc);
    return {0.5 * tr - s, 0.5 * tr + s};
}

// ---------------------------------------------------------------------------
// Envelope map.

H3Point epstein_point(const DensityJet& jet, cplx z) {
    const double E = std::exp(jet.u);
    const double D = E * E + 4.0 * std::norm(jet.u_z);
    return H3Point(z + 4.0 * std::conj(jet.u_z) / D, 2.0 * E / D);
}

EpsteinSample epstein_flow(const DensityJet& jet, cplx z, double t) {
    const DensityJet jt = scale_density(jet, std::exp(t));
    EpsteinSample s;
    s.z = z;
    s.t = t;
    s.x = epstein_point(jt, z);

    const cplx to_base = z - s.x.w;
    const double q = std::norm(to_base) + s.x.t * s.x.t;
    // Euclidean unit vector at x along the geodesic toward the boundary point
    // z, rescaled by the height to have hyperbolic norm one.
    const cplx nh = 2.0 * s.x.t * to_base / q;
    const double nv = (std::norm(to_base) - s.x.t * s.x.t) / q;
    s.normal = Vec3{s.x.t * nh.real(), s.x.t * nh.imag(), s.x.t * nv};

    const double eu = std::exp(jt.u);
    s.env_level = std::abs(visual_density(s.x, BoundaryPoint(z)) - eu) / eu;
    s.env_stationary = std::abs(-std::conj(to_base) / q - jt.u_z);
    return s;
}

// ---------------------------------------------------------------------------
// Analytic tangents.

Chart scene_chart(const DomainScene& scene) {
    // Capture a copy: the chart must outlive the scene expression it was
    // built from, and scenes are cheap to copy.
    return [scene](cplx zeta) { return scene.chart_sample(zeta); };
}

namespace {

struct SurfaceData {
    H3Point x{0.0, 1.0};
    Vec3 normal;
    Vec3 v1, v2;
    double density_factor = 0.0;
};

Vec3 to_vec3(cplx h, double v) { return Vec3{h.real(), h.imag(), v}; }

// Surface point, coordinate tangents, and normal from one chart sample.
// All quantities are closed form in the density 2-jet and the chart
// derivative; see the header comment for the Wirtinger formulas.
SurfaceData surface_data(const DomainScene::ChartSample& cs, double t) {
    const DensityJet& j = cs.jet;
    const double E = std::exp(j.u + t);
    const cplx P = j.u_z;
    const cplx Q = j.u_zz;
    const double R = j.u_zzbar;

    const double D = E * E + 4.0 * std::norm(P);
    const double T = 2.0 * E / D;
    const cplx W = cs.w + 4.0 * std::conj(P) / D;

    // Wirtinger derivatives of the jet fields at the domain point.
    const cplx dD = 2.0 * E * E * P + 4.0 * (Q * std::conj(P) + P * R);
    const cplx dbD = std::conj(dD);
    const cplx dW = 1.0 + 4.0 * (R * D - std::conj(P) * dD) / (D * D);
    const cplx dbW = 4.0 * (std::conj(Q) * D - std::conj(P) * dbD) / (D * D);
    const cplx dT = 2.0 * E * (P * D - dD) / (D * D);

    // Chain through the chart: d/dzeta picks dchart, d/dzetabar its conjugate.
    const cplx F1 = cs.dchart;
    const cplx zW = dW * F1;
    const cplx zbW = dbW * std::conj(F1);
    const cplx zT = dT * F1;

    SurfaceData out;
    out.x = H3Point(W, T);
    out.v1 = to_vec3(zW + zbW, 2.0 * (zT).real());
    out.v2 = to_vec3(cplx(0.0, 1.0) * (zW - zbW), -2.0 * (zT).imag());

    const cplx to_base = cs.w - W;
    const double q = std::norm(to_base) + T * T;
    const cplx nh = 2.0 * T * to_base / q;
    const double nv = (std::norm(to_base) - T * T) / q;
    out.normal = Vec3{T * nh.real(), T * nh.imag(), T * nv};

    out.density_factor = E * E * std::norm(F1);
    return out;
}

Mat2 first_form(const SurfaceData& s) {
    const double inv_t2 = 1.0 / (s.x.t * s.x.t);
    return Mat2{dot(s.v1, s.v1) * inv_t2, dot(s.v1, s.v2) * inv_t2,
                dot(s.v2, s.v1) * inv_t2, dot(s.v2, s.v2) * inv_t2};
}

// Covariant derivative of the normal field along tangent v at height t:
// Euclidean directional derivative dn plus the Christoffel correction of the
// metric t^{-2} (dx^2 + dy^2 + dt^2).
Vec3 covariant(const Vec3& dn, const Vec3& v, const Vec3& n, double t) {
    return Vec3{dn.x - (v.x * n.z + v.z * n.x) / t,
                dn.y - (v.y * n.z + v.z * n.y) / t,
                dn.z + (v.x * n.x + v.y * n.y - v.z * n.z) / t};
}

ShapeFrame frame_no_fallback(const Chart& chart, cplx zeta, double t, double h) {
    const DomainScene::ChartSample center = chart(zeta);
    const SurfaceData s = surface_data(center, t);

    ShapeFrame f;
    f.zeta = zeta;
    f.w = center.w;
    f.t = t;
    f.x = s.x;
    f.normal = s.normal;
    f.v1 = s.v1;
    f.v2 = s.v2;
    f.g = first_form(s);
    f.det_g = f.g.det();
    f.density_factor = s.density_factor;
    if (f.det_g < 1e-12)
        throw DegenerateError("fundamental_forms: degenerate immersion", f.det_g,
                              std::numeric_limits<double>::quiet_NaN());

    const SurfaceData sxp = surface_data(chart(zeta + h), t);
    const SurfaceData sxm = surface_data(chart(zeta - h), t);
    const SurfaceData syp = surface_data(chart(zeta + cplx(0.0, h)), t);
    const SurfaceData sym = surface_data(chart(zeta - cplx(0.0, h)), t);

    auto fd = [h](const Vec3& p, const Vec3& m) {
        return Vec3{(p.x - m.x) / (2.0 * h), (p.y - m.y) / (2.0 * h),
                    (p.z - m.z) / (2.0 * h)};
    };
    const Vec3 dn1 = covariant(fd(sxp.normal, sxm.normal), s.v1, s.normal, s.x.t);
    const Vec3 dn2 = covariant(fd(syp.normal, sym.normal), s.v2, s.normal, s.x.t);

    const double inv_t2 = 1.0 / (s.x.t * s.x.t);
    Mat2 ii{dot(dn1, s.v1) * inv_t2, dot(dn1, s.v2) * inv_t2,
            dot(dn2, s.v1) * inv_t2, dot(dn2, s.v2) * inv_t2};
    ii = ii.transpose().scaled(0.5) + ii.scaled(0.5);
    f.ii = ii;
    f.shape = f.g.inverse() * f.ii;
    const Mat2 id = Mat2::identity();
    f.shape_inf = (id + f.shape).inverse() * (id - f.shape);
    return f;
}

} // namespace

ShapeFrame fundamental_forms(const Chart& chart, cplx zeta, double t, double h) {
    try {
        return frame_no_fallback(chart, zeta, t, h);
    } catch (const DegenerateError& e) {
        // Recover the offending infinity-operator eigenvalue from a nearby
        // nondegenerate time: Bhat scales by e^{-2 dt} along the flow, and
        // the immersion degenerates exactly where Bhat has eigenvalue -1.
        double offending = std::numeric_limits<double>::quiet_NaN();
        for (const double ds : {-0.35, 0.35, -0.7, 0.7}) {
            const double s = t + ds;
            if (s < -2.0)
                continue;
            try {
                const ShapeFrame fs = frame_no_fallback(chart, zeta, s, h);
                const auto eig = fs.shape_inf.scaled(std::exp(2.0 * ds)).eigenvalues();
                offending = (std::abs(eig[0] + 1.0) < std::abs(eig[1] + 1.0))
                                ? eig[0]
                                : eig[1];
                break;
            } catch (const Error&) {
                continue;
            }
        }
        throw DegenerateError(std::string(e.what()) + " at t = " + std::to_string(t),
                              e.det_g, offending);
    }
}

// ---------------------------------------------------------------------------
// Identity suite.

namespace {

double rel_dev(const Mat2& got, const Mat2& want) {
    return (got - want).frobenius() / std::max(1.0, want.frobenius());
}

// Brioschi curvature of the analytic metric field m(zeta) at zeta, centred
// differences with step h2.
double brioschi(const std::function<Mat2(cplx)>& m, cplx zeta, double h2) {
    const Mat2 g0 = m(zeta);
    const Mat2 gxp = m(zeta + h2), gxm = m(zeta - h2);
    const Mat2 gyp = m(zeta + cplx(0.0, h2)), gym = m(zeta - cplx(0.0, h2));
    const Mat2 gpp = m(zeta + cplx(h2, h2)), gpm = m(zeta + cplx(h2, -h2));
    const Mat2 gmp = m(zeta + cplx(-h2, h2)), gmm = m(zeta + cplx(-h2, -h2));

    const double E = g0.a, F = g0.b, G = g0.d;
    const double E_x = (gxp.a - gxm.a) / (2.0 * h2);
    const double E_y = (gyp.a - gym.a) / (2.0 * h2);
    const double G_x = (gxp.d - gxm.d) / (2.0 * h2);
    const double G_y = (gyp.d - gym.d) / (2.0 * h2);
    const double F_x = (gxp.b - gxm.b) / (2.0 * h2);
    const double F_y = (gyp.b - gym.b) / (2.0 * h2);
    const double E_yy = (gyp.a - 2.0 * g0.a + gym.a) / (h2 * h2);
    const double G_xx = (gxp.d - 2.0 * g0.d + gxm.d) / (h2 * h2);
    const double F_xy = (gpp.b - gpm.b - gmp.b + gmm.b) / (4.0 * h2 * h2);

    auto det3 = [](double m11, double m12, double m13, double m21, double m22,
                   double m23, double m31, double m32, double m33) {
        return m11 * (m22 * m33 - m23 * m32) - m12 * (m21 * m33 - m23 * m31) +
               m13 * (m21 * m32 - m22 * m31);
    };
    const double d1 = det3(-0.5 * E_yy + F_xy - 0.5 * G_xx, 0.5 * E_x, F_x - 0.5 * E_y,
                           F_y - 0.5 * G_x, E, F,
                           0.5 * G_y, F, G);
    const double d2 = det3(0.0, 0.5 * E_y, 0.5 * G_x,
                           0.5 * E_y, E, F,
                           0.5 * G_x, F, G);
    const double den = E * G - F * F;
    return (d1 - d2) / (den * den);
}

} // namespace

IdentityResiduals identity_suite(const Chart& chart, cplx zeta, double s, double t) {
    const ShapeFrame fs = fundamental_forms(chart, zeta, s);
    const ShapeFrame ft = fundamental_forms(chart, zeta, t);
    const Mat2 id = Mat2::identity();
    const double dt = t - s;

    IdentityResiduals out;

    // Conformal metric at infinity in this chart is a multiple of the
    // identity; its conjugation by (I + B) reproduces the induced metric.
    const Mat2 ghat_t = Mat2::diag(ft.density_factor, ft.density_factor);
    const Mat2 ipb = id + ft.shape;
    out.res_metric_conjugation =
        rel_dev(ipb.transpose() * ft.g * ipb, ghat_t);

    // Flow map on shape operators.
    {
        const double ch = std::cosh(dt), sh = std::sinh(dt);
        const Mat2 denom = id.scaled(ch) + fs.shape.scaled(sh);
        const double fr = denom.frobenius();
        if (std::abs(denom.det()) < 1e-10 * std::max(1.0, fr * fr)) {
            const auto eig = fs.shape.eigenvalues();
            const double target = -1.0 / std::tanh(dt);
            const double off = (std::abs(eig[0] - target) < std::abs(eig[1] - target))
                                   ? eig[0]
                                   : eig[1];
            throw DegenerateError("identity_suite: flow map singular between s and t",
                                  denom.det(), off);
        }
        const Mat2 moved = denom.inverse() * (id.scaled(sh) + fs.shape.scaled(ch));
        out.res_flow_moebius = rel_dev(ft.shape, moved);
    }

    // Reconstruction of the induced metric from the metric at infinity.
    const Mat2 ipbh = id + ft.shape_inf;
    out.res_metric_reconstruction =
        rel_dev(ipbh.transpose().scaled(0.25) * ghat_t * ipbh, ft.g);

    // Scaling of the infinity-side operator along the flow.
    out.res_inf_scaling =
        rel_dev(ft.shape_inf, fs.shape_inf.scaled(std::exp(-2.0 * dt)));

    // Area forms.
    const double area_t = std::sqrt(std::max(ft.det_g, 0.0));
    const double area_from_inf =
        0.25 * std::abs((id + ft.shape_inf).det()) * ft.density_factor;
    out.res_area_ratio = std::abs(area_t - area_from_inf) / std::max(1.0, area_t);

    // Gauss equation: intrinsic curvature equals det B - 1.
    {
        auto metric_field = [&](cplx q) {
            const DomainScene::ChartSample cs = chart(q);
            return first_form(surface_data(cs, t));
        };
        // One Richardson step on the centred h^2 truncation: near-degenerate
        // frames amplify the raw stencil error past the gauss tolerance.
        const double kh = brioschi(metric_field, zeta, 1e-3);
        const double kh2 = brioschi(metric_field, zeta, 5e-4);
        const double K = (4.0 * kh2 - kh) / 3.0;
        out.res_gauss = std::abs(K - (ft.shape.det() - 1.0));
    }

    out.res_flow_distance = std::abs(hyp_distance(fs.x, ft.x) - std::abs(dt));
    out.eig = ft.shape.eigenvalues();
    return out;
}

double convexity_threshold(const Chart& chart, cplx zeta, double t_max) {
    const double step = 0.05;
    auto min_eig = [&](double t) -> double {
        // Degenerate frames count as not convex.
        try {
            const ShapeFrame f = fundamental_forms(chart, zeta, t);
            return f.shape.eigenvalues()[0];
        } catch (const Error&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
    double prev = 0.0;
    double prev_val = min_eig(0.0);
    if (prev_val >= 0.0)
        return 0.0;
    for (double t = step; t <= t_max + 1e-12; t += step) {
        const double val = min_eig(t);
        if (val >= 0.0) {
            if (!std::isfinite(prev_val))
                throw NonConvergedError(
                    "convexity_threshold: degenerate frame adjacent to the root");
            double lo = prev, hi = t;
            for (int i = 0; i < 60; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (min_eig(mid) >= 0.0)
                    hi = mid;
                else
                    lo = mid;
            }
            return 0.5 * (lo + hi);
        }
        prev = t;
        prev_val = val;
    }
    throw NonConvergedError("convexity_threshold: not reached before t_max");
}

// ---------------------------------------------------------------------------
// Schwarzian comparison.

ShapeCheck schwarzian_shape_check(const DomainScene& scene, cplx zeta, double t) {
    if (scene.kind() != SceneKind::ImageDomain)
        throw UnsupportedError("schwarzian_shape_check: needs an image-domain scene");
    ShapeCheck out;
    out.n = pointwise_norm(schwarzian(scene.expr(), zeta), disk_density(zeta));

    const ShapeFrame f = fundamental_forms(scene_chart(scene), zeta, t);
    out.eig_numeric = f.shape.eigenvalues();
    out.eig_inf_numeric = f.shape_inf.eigenvalues();

    const double n = out.n;
    const double decay = std::exp(-2.0 * t);
    out.eig_inf_formula = {decay * (1.0 - 2.0 * n), decay * (1.0 + 2.0 * n)};
    std::sort(out.eig_inf_formula.begin(), out.eig_inf_formula.end());
    // Map back through b = (1 - bhat)/(1 + bhat); at t = 0 this reduces to
    // -n/(n+1) and n/(1-n).
    auto from_inf = [](double bh) { return (1.0 - bh) / (1.0 + bh); };
    out.eig_formula = {from_inf(out.eig_inf_formula[0]), from_inf(out.eig_inf_formula[1])};
    std::sort(out.eig_formula.begin(), out.eig_formula.end());

    double res = 0.0;
    for (int i = 0; i < 2; ++i) {
        res = std::max(res, std::abs(out.eig_numeric[i] - out.eig_formula[i]) /
                                (1.0 + std::abs(out.eig_formula[i])));
        res = std::max(res, std::abs(out.eig_inf_numeric[i] - out.eig_inf_formula[i]) /
                                (1.0 + std::abs(out.eig_inf_formula[i])));
    }
    out.residual = res;
    return out;
}

// ---------------------------------------------------------------------------
// Dome checks.

DomeProbe dome_check(const DomainScene& scene, cplx z, double snap_tol) {
    if (scene.kind() != SceneKind::DiskUnion && scene.kind() != SceneKind::RoundDisk)
        throw BadArgument("dome_check: needs an explicit disk scene");
    DomeProbe probe;
    probe.z = z;
    probe.disk = projective_density(scene, z);

    int matched = -1;
    for (size_t i = 0; i < scene.disks().size(); ++i) {
        const RoundDisk& d = scene.disks()[i];
        if (std::abs(d.c - probe.disk.c) <= snap_tol * (1.0 + std::abs(d.c)) &&
            std::abs(d.r - probe.disk.r) <= snap_tol * (1.0 + d.r)) {
            matched = static_cast<int>(i);
            break;
        }
    }
    if (matched < 0)
        throw ExcludedRegionError(
            "dome_check: supporting disk is not a scene disk; the probe sits "
            "in the bending region");
    probe.matched = matched;

    // Epstein point of the computed projective density (the jet of the found
    // supporting disk), measured against the scene disk's hemisphere.
    const DensityJet jet = hyperbolic_density_disk(probe.disk.c, probe.disk.r, z);
    probe.x = epstein_point(jet, z);
    const RoundDisk& sd = scene.disks()[matched];
    const double dx = std::abs(probe.x.w - sd.c);
    probe.hemisphere_residual =
        std::abs(std::sqrt(dx * dx + probe.x.t * probe.x.t) - sd.r);
    return probe;
}

double dome_dihedral(const RoundDisk& d1, const RoundDisk& d2) {
    const cplx dvec = d2.c - d1.c;
    const double d = std::abs(dvec);
    if (d <= std::abs(d1.r - d2.r) || d >= d1.r + d2.r)
        throw DomainError("dome_dihedral: hemispheres do not cross");
    const cplx u = dvec / d;
    const double a = (d1.r * d1.r - d2.r * d2.r + d * d) / (2.0 * d);
    const double h2 = d1.r * d1.r - a * a;
    const double h = std::sqrt(std::max(h2, 0.0));
    // Top of the intersection circle of the two hemispheres.
    const cplx mid = d1.c + a * u;
    const Vec3 X{mid.real(), mid.imag(), h};
    const Vec3 n1{(X.x - d1.c.real()) / d1.r, (X.y - d1.c.imag()) / d1.r, X.z / d1.r};
    const Vec3 n2{(X.x - d2.c.real()) / d2.r, (X.y - d2.c.imag()) / d2.r, X.z / d2.r};
    return std::acos(std::clamp(dot(n1, n2), -1.0, 1.0));
}

} // namespace epsteinlab
