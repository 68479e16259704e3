#pragma once

// Conformal densities e^{2u}|dz|^2 carried as 2-jets of u, the domain scenes
// they live on, and the projective (maximal round disk) metric.
//
// A DensityJet holds u and its Wirtinger derivatives at one point; u_zzbar is
// real for real u. Curvature of the density is K = -4 e^{-2u} u_zzbar.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "holo.hpp"
#include "hyperbolic.hpp"

namespace epsteinlab {

struct DensityJet {
    double u = 0.0;
    cplx u_z{0.0};
    cplx u_zz{0.0};
    double u_zzbar = 0.0;
};

double density_curvature(const DensityJet& jet);

// Hyperbolic density of the round disk |z - c| < r:
//   e^u = 2r/s with s = r^2 - |z-c|^2.
DensityJet hyperbolic_density_disk(cplx c, double r, cplx z);

// Hyperbolic density 1/delta of the half-plane {Re(conj(n) z) < d}, where n
// is the outward unit normal and delta the distance to the boundary line.
DensityJet hyperbolic_density_halfplane(cplx normal, double offset, cplx z);

// u -> u + log(lambda): scales the metric tensor by lambda^2.
DensityJet scale_density(const DensityJet& jet, double lambda);

// Jet of the transported density v at w = f(z), defined by
//   v(f(z)) = u(z) - log|f'(z)|.
// Needs the 3-jet of f; throws CriticalPointError where f' = 0.
DensityJet density_pushforward(const DensityJet& u_at_z, const HoloJet3& f_at_z);

// ---------------------------------------------------------------------------
// Scenes.

struct RoundDisk {
    cplx c{0.0};
    double r = 1.0;
};

enum class SceneKind { RoundDisk, HalfPlane, DiskUnion, ImageDomain };

// Conformal uniformization of the union of two overlapping round disks:
// a Moebius map sends the lens corners to 0/infinity, turning the union into
// a sector, which a power map straightens onto a half-plane.
struct LuneUniformizer {
    MoebiusMap corner_map;  // z -> (z - p1)/(z - p2)
    cplx p1{0.0}, p2{0.0};  // circle intersection points
    double start = 0.0;     // sector = {start < arg < start + width}
    double width = 0.0;
    HoloExpr forward;       // unit disk -> union, univalent

    // Parameter of z in the unit disk. Throws DomainError outside the union.
    cplx param_of(cplx z) const;
};

class DomainScene {
public:
    static DomainScene round_disk(cplx c, double r);
    static DomainScene half_plane(cplx normal, double offset);
    static DomainScene disk_union(std::vector<RoundDisk> disks);
    static DomainScene image_domain(HoloExpr expr, std::string expr_text);

    static DomainScene from_json_text(const std::string& text);
    static DomainScene load(const std::string& path);

    SceneKind kind() const { return kind_; }
    const std::vector<RoundDisk>& disks() const { return disks_; }
    const HoloExpr& expr() const { return expr_; }
    const std::string& expr_text() const { return expr_text_; }
    cplx half_plane_normal() const { return normal_; }
    double half_plane_offset() const { return offset_; }

    // True membership test for explicit geometry; image domains only answer
    // for parameter points (|zeta| < 1 by convention of the callers).
    bool contains(cplx z) const;

    // Largest disk centred at c that stays inside the scene. Closed form for
    // disks and half-planes; for unions it is the exact distance from c to
    // the union boundary (arc feet and corner points). Returns 0 outside.
    double max_inscribed_radius(cplx c) const;

    // Closed disk D(c, r) inside the domain, up to a 1e-9 tolerance on the
    // radius? Exact geometry for every explicit scene kind.
    bool disk_fits(cplx c, double r) const;

    // Intrinsic hyperbolic density jet. For explicit scenes the argument is
    // the domain point; for image domains it is the disk parameter zeta and
    // the jet lives at expr(zeta).
    DensityJet hyperbolic_density(cplx z) const;

    // Location of the point the density jet lives at (identity except for
    // image domains) plus the chart derivative there.
    struct ChartSample {
        cplx w;        // point in the domain
        cplx dchart;   // derivative of the chart map (1 for explicit scenes)
        DensityJet jet;
    };
    ChartSample chart_sample(cplx z) const;

    const LuneUniformizer& uniformizer() const;

private:
    SceneKind kind_ = SceneKind::RoundDisk;
    std::vector<RoundDisk> disks_;
    cplx normal_{0.0, -1.0};
    double offset_ = 0.0;
    HoloExpr expr_;
    std::string expr_text_;
    mutable std::optional<LuneUniformizer> lune_;
};

// ---------------------------------------------------------------------------
// Projective metric.

struct SupportingDisk {
    cplx c{0.0};
    double r = 0.0;
    double density = 0.0; // hyperbolic density of the disk at the query point
};

// Density of the projective metric at z: infimum of round-disk densities over
// disks through z contained in the scene, together with the minimizing disk.
// Two-stage search: coarse centre grid, then compass refinement. Ties go to
// the smaller |centre|, then the smaller radius.
SupportingDisk projective_density(const DomainScene& scene, cplx z);

struct MetricComparison {
    double rho_hyp = 0.0;   // conformal factors e^u against |dz|
    double rho_proj = 0.0;
    double ratio = 0.0;     // rho_proj / rho_hyp, >= 1 with equality iff round
    SupportingDisk disk;
};

// Compares intrinsic hyperbolic and projective densities at a point (domain
// point for explicit scenes, disk parameter for image domains).
MetricComparison metric_compare(const DomainScene& scene, cplx z);

} // namespace epsteinlab
