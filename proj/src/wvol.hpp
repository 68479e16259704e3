#pragma once

// Renormalized-volume calculus for the flowed surface families, reduced to
// closed forms in the descriptor data (chi, L, phi_inf, phi_two):
//   * areas of the constant-curvature family and of the grafted family,
//   * the b-functional (area-renormalized volume differences),
//   * upper and lower W-bounds and the inequality chain that squeezes the
//     L2-norm of the Schwarzian against the bending length.
//
// WValue keeps the flow gauge separate from the base value so the scaling law
// W -> W + t pi |chi| is additive to the last bit.

#include <string>
#include <vector>

#include "errors.hpp"

namespace epsteinlab {

// Summary data of a projective structure: Euler characteristic, bending
// length L, sup-norm and L2-norm of the Schwarzian at infinity.
struct ProjectiveDescriptor {
    int chi;
    double L;
    double phi_inf;
    double phi_two;

    ProjectiveDescriptor(int chi_, double L_, double phi_inf_, double phi_two_);
};

std::vector<ProjectiveDescriptor> descriptors_from_json_text(const std::string& text);
std::vector<ProjectiveDescriptor> load_descriptors(const std::string& path);

// ---------------------------------------------------------------------------
// W-values.

struct WValue {
    double base = 0.0;    // value at gauge time zero
    double t_gauge = 0.0; // accumulated flow time
    int chi = -2;

    WValue(double base_, int chi_);
    double value() const;
};

// Flow scaling W(N_t) = W(N) + t pi |chi|: adds to the gauge, leaving the
// base untouched, so composing scalings is exact.
WValue w_scale(const WValue& w, double dt);

// Difference w1 - w0 of two W-values over the same surface (same chi),
// antisymmetric to the last bit.
double w_relative(const WValue& w0, const WValue& w1);

// ---------------------------------------------------------------------------
// Areas.

// b = (1/2) area_inf - area_surface - pi chi.
double b_functional(double area_inf, double area_surface, int chi);

// Area of the t-flow surface for the hyperbolic metric with Schwarzian data:
//   -2 pi chi cosh^2 t - e^{-2t} phi_two^2.
// Requires t at or above the embeddedness threshold (1/2) log(1 + 2 phi_inf).
double area_epstein_hyperbolic(int chi, double phi_two, double t,
                               double phi_inf = 0.0);

struct ProjectiveAreas {
    double area_infinity; // at gauge zero: 2 pi |chi| + L
    double area_epstein;  // at time t: 2 pi |chi| cosh^2 t + L sinh t cosh t
};
ProjectiveAreas area_projective(int chi, double L, double t);

struct GraftingCylinder {
    double circumference; // ell cosh t
    double width;         // theta sinh t
    double area;          // ell theta sinh t cosh t
};
GraftingCylinder grafting_cylinder(double ell, double theta, double t);

// Total curvature check for the grafted family: the flat cylinder contributes
// nothing and the complement has curvature tanh^2 t - 1, so the integral must
// come out at 2 pi chi. Returns the absolute deviation.
double gauss_bonnet_residual(int chi, double L, double t);

// ---------------------------------------------------------------------------
// Bounds.

struct UpperBound {
    double sharp;  // (1/2) log(1 + L/(2 pi |chi|)) pi |chi|
    double coarse; // L/4
};
UpperBound w_upper(const ProjectiveDescriptor& d);

// (1/2) e^{-2T} phi_two^2 - (1/4) L cosh 2T with e^{2T} = 1 + 2 phi_inf.
double w_lower(const ProjectiveDescriptor& d);

double main_bound(const ProjectiveDescriptor& d); // (1 + phi_inf) sqrt(L)
double corollary_line(double L);                  // (5/2) sqrt(L)
double anderson_bound(const ProjectiveDescriptor& d); // 4 pi |chi| phi_inf

struct ChainReport {
    double w_lower_value = 0.0;
    double w_upper_sharp = 0.0;
    double w_upper_coarse = 0.0;
    double max_phi_two = 0.0;   // largest phi_two with w_lower <= L/4
    double main_bound_value = 0.0;
    double closure_residual = 0.0; // |max_phi_two - main_bound|
    double anderson_value = 0.0;
    bool admissible = false;  // w_lower <= w_upper.coarse
    bool closure_ok = false;  // the chain collapses onto the main bound
    bool within_main = false; // phi_two <= main bound
    bool anderson_ok = false; // L <= anderson bound
    bool nehari_ok = false;   // phi_inf <= 3/2
};

// Runs the inequality chain on one descriptor. Flags are computed, never
// assumed; a descriptor violating a bound is reported, not rejected.
ChainReport chain_verify(const ProjectiveDescriptor& d);

} // namespace epsteinlab
