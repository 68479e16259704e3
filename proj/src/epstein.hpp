#pragma once

// Surfaces swept out by conformal densities: the envelope of the horosphere
// family {base z, size e^{u(z)}} has the closed form
//   tau = 2 e^u / (e^{2u} + 4|u_z|^2),  w = z + 4 conj(u_z) / (e^{2u} + 4|u_z|^2),
// and flowing the density u -> u + t moves the surface unit speed along its
// normal toward the boundary.
//
// First derivatives of the surface map are closed form in the density 2-jet;
// only the shape operator needs one level of centred finite differences
// (step 1e-4), applied to the analytic normal field.

#include <array>
#include <functional>

#include "density.hpp"
#include "errors.hpp"
#include "hyperbolic.hpp"

namespace epsteinlab {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};
double dot(const Vec3& a, const Vec3& b);

struct Mat2 {
    // row-major: [a b; c d]
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    static Mat2 identity();
    static Mat2 diag(double x, double y);
    Mat2 operator+(const Mat2& o) const;
    Mat2 operator-(const Mat2& o) const;
    Mat2 operator*(const Mat2& o) const;
    Mat2 scaled(double s) const;
    Mat2 transpose() const;
    Mat2 inverse() const; // throws on singular input
    double det() const;
    double trace() const;
    double frobenius() const;
    // Real eigenvalues, ascending. Small negative discriminants are clamped;
    // genuinely complex spectra throw.
    std::array<double, 2> eigenvalues() const;
};

// Envelope point of the horosphere family at z.
H3Point epstein_point(const DensityJet& jet, cplx z);

struct EpsteinSample {
    cplx z;               // base point of the tangent horosphere
    double t = 0.0;       // flow time
    H3Point x{0.0, 1.0};
    Vec3 normal;          // hyperbolic-unit normal, pointing toward z
    double env_level = 0.0;      // |v_x(z) - e^{u+t}| / e^{u+t}
    double env_stationary = 0.0; // envelope stationarity residual
};

// Surface point at flow time t together with the normal and the residuals of
// the defining envelope system (level condition and its stationarity in z).
EpsteinSample epstein_flow(const DensityJet& jet, cplx z, double t);

// ---------------------------------------------------------------------------
// Frames.

using Chart = std::function<DomainScene::ChartSample(cplx)>;
Chart scene_chart(const DomainScene& scene);

struct ShapeFrame {
    cplx zeta;            // chart parameter
    cplx w;               // domain point the density jet lives at
    double t = 0.0;
    H3Point x{0.0, 1.0};
    Vec3 normal;
    Vec3 v1, v2;          // Euclidean components of the coordinate tangents
    Mat2 g;               // first fundamental form
    Mat2 ii;              // second fundamental form, symmetrized
    Mat2 shape;           // B = g^{-1} II
    Mat2 shape_inf;       // Bhat = (I+B)^{-1}(I-B)
    double det_g = 0.0;
    double density_factor = 0.0; // e^{2(u+t)} |chart'|^2: metric at infinity
};

inline constexpr double kFdStep = 1e-4;

// First and second fundamental forms at chart parameter zeta, flow time t.
// Throws DegenerateError when the immersion degenerates (det g < 1e-12),
// carrying det g and the infinity-operator eigenvalue responsible when it
// can be recovered from a nearby time.
ShapeFrame fundamental_forms(const Chart& chart, cplx zeta, double t,
                             double h = kFdStep);

struct IdentityResiduals {
    double res_metric_conjugation = 0.0; // ghat vs (I+B)^T g (I+B)
    double res_flow_moebius = 0.0;       // B_t from B_s through the flow map
    double res_metric_reconstruction = 0.0; // g vs (1/4)(I+Bhat)^T ghat (I+Bhat)
    double res_inf_scaling = 0.0;        // Bhat_t vs e^{-2(t-s)} Bhat_s
    double res_area_ratio = 0.0;         // sqrt(det g) vs (1/4)|det(I+Bhat)| ghat-area
    double res_gauss = 0.0;              // Brioschi K vs det B - 1
    double res_flow_distance = 0.0;      // d(x_s, x_t) vs |t-s|
    std::array<double, 2> eig{0.0, 0.0}; // eigenvalues of B_t
};

// Evaluates the frame identities linking the surfaces at times s and t in a
// fixed chart. Residuals are Frobenius deviations scaled by max(1, |rhs|).
IdentityResiduals identity_suite(const Chart& chart, cplx zeta, double s, double t);

// Smallest flow time at which both shape eigenvalues are nonnegative,
// located by scan plus bisection on [0, t_max].
double convexity_threshold(const Chart& chart, cplx zeta, double t_max = 2.0);

// ---------------------------------------------------------------------------
// Shape operator against the Schwarzian.

struct ShapeCheck {
    double n = 0.0; // hyperbolic pointwise norm of the Schwarzian at zeta
    std::array<double, 2> eig_numeric{0.0, 0.0};
    std::array<double, 2> eig_formula{0.0, 0.0};    // -n/(n+1), n/(1-n)
    std::array<double, 2> eig_inf_numeric{0.0, 0.0};
    std::array<double, 2> eig_inf_formula{0.0, 0.0}; // e^{-2t}(1 -+ 2n)
    double residual = 0.0; // worst relative eigenvalue deviation
};

// Compares the numerical shape operator of an image-domain scene at flow
// time t with the closed-form eigenvalues driven by the Schwarzian norm.
ShapeCheck schwarzian_shape_check(const DomainScene& scene, cplx zeta,
                                  double t = 0.0);

// ---------------------------------------------------------------------------
// Dome checks.

struct DomeProbe {
    cplx z;
    SupportingDisk disk;    // disk found by the projective search
    int matched = -1;       // index of the scene disk it snaps to
    H3Point x{0.0, 1.0};    // Epstein point of the projective density at z
    double hemisphere_residual = 0.0; // distance of x from the scene hemisphere
};

// Probes one point of a disk-union scene: requires the supporting disk to be
// one of the scene disks (within snap_tol), then measures how far the
// Epstein point of the projective metric sits from that disk's hemisphere.
// Probes in the bending region throw ExcludedRegionError.
DomeProbe dome_check(const DomainScene& scene, cplx z, double snap_tol = 1e-3);

// Angle between the hemispheres over two overlapping disks, measured between
// outward normals along their intersection circle.
double dome_dihedral(const RoundDisk& d1, const RoundDisk& d2);

} // namespace epsteinlab
