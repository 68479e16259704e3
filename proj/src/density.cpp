#include "density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace epsteinlab {

namespace {

// Angle of q measured in [0, 2*pi).
double arg2pi(cplx q) {
    double a = std::atan2(q.imag(), q.real());
    if (a < 0.0) a += 2.0 * M_PI;
    return a;
}

} // namespace

double density_curvature(const DensityJet& jet) {
    return -4.0 * std::exp(-2.0 * jet.u) * jet.u_zzbar;
}

DensityJet hyperbolic_density_disk(cplx c, double r, cplx z) {
    if (!(r > 0.0))
        throw BadArgument("hyperbolic_density_disk: radius must be positive");
    const cplx zeta = z - c;
    const double s = r * r - std::norm(zeta);
    if (!(s > 0.0))
        throw DomainError("hyperbolic_density_disk: point outside the disk");
    DensityJet jet;
    jet.u = std::log(2.0 * r / s);
    jet.u_z = std::conj(zeta) / s;
    jet.u_zz = std::conj(zeta) * std::conj(zeta) / (s * s);
    jet.u_zzbar = r * r / (s * s);
    return jet;
}

DensityJet hyperbolic_density_halfplane(cplx normal, double offset, cplx z) {
    const double nn = std::abs(normal);
    if (!(nn > 0.0))
        throw BadArgument("hyperbolic_density_halfplane: zero normal");
    const cplx n = normal / nn;
    const double delta = offset - (std::conj(n) * z).real();
    if (!(delta > 0.0))
        throw DomainError("hyperbolic_density_halfplane: point outside the half-plane");
    DensityJet jet;
    jet.u = -std::log(delta);
    jet.u_z = std::conj(n) / (2.0 * delta);
    jet.u_zz = jet.u_z * jet.u_z;
    jet.u_zzbar = 1.0 / (4.0 * delta * delta);
    return jet;
}

DensityJet scale_density(const DensityJet& jet, double lambda) {
    if (!(lambda > 0.0))
        throw BadArgument("scale_density: scale must be positive");
    DensityJet out = jet;
    out.u += std::log(lambda);
    return out;
}

DensityJet density_pushforward(const DensityJet& u_at_z, const HoloJet3& f_at_z) {
    // v(f(z)) = u(z) - log|f'(z)|. Differentiating through the chart:
    //   v_w    = (u_z - A/2) / f'              with A = f''/f',
    //   v_ww   = (u_zz - A_z/2 - v_w f'') / f'^2, A_z = f'''/f' - A^2,
    //   v_wwb  = u_zzb / |f'|^2.
    const double scale = 1.0 + std::abs(f_at_z.d2f) + std::abs(f_at_z.d3f);
    if (std::abs(f_at_z.df) < 1e-13 * scale)
        throw CriticalPointError("density_pushforward: vanishing derivative");
    const cplx fp = f_at_z.df;
    const cplx A = f_at_z.d2f / fp;
    const cplx A_z = f_at_z.d3f / fp - A * A;
    DensityJet out;
    out.u = u_at_z.u - std::log(std::abs(fp));
    out.u_z = (u_at_z.u_z - 0.5 * A) / fp;
    out.u_zz = (u_at_z.u_zz - 0.5 * A_z - out.u_z * f_at_z.d2f) / (fp * fp);
    out.u_zzbar = u_at_z.u_zzbar / std::norm(fp);
    return out;
}

// ---------------------------------------------------------------------------
// Lune uniformizer.

namespace {

LuneUniformizer build_lune(const RoundDisk& d1, const RoundDisk& d2) {
    const cplx dvec = d2.c - d1.c;
    const double d = std::abs(dvec);
    const double eps = 1e-12 * (d1.r + d2.r);
    if (d <= std::abs(d1.r - d2.r) + eps)
        throw DomainError("disk union: one disk contains the other");
    if (d >= d1.r + d2.r - eps)
        throw DomainError("disk union: disks do not overlap");
    const cplx u = dvec / d;
    const double a = (d1.r * d1.r - d2.r * d2.r + d * d) / (2.0 * d);
    const double h = std::sqrt(std::max(d1.r * d1.r - a * a, 0.0));

    LuneUniformizer lune{MoebiusMap::identity(), 0.0, 0.0, 0.0, 0.0, HoloExpr{}};
    lune.p1 = d1.c + a * u + cplx(0.0, 1.0) * h * u;
    lune.p2 = d1.c + a * u - cplx(0.0, 1.0) * h * u;
    lune.corner_map = MoebiusMap(1.0, -lune.p1, 1.0, -lune.p2);

    // Boundary arcs become rays from the origin; the union becomes the sector
    // between them that contains the image of an interior point.
    const cplx s1 = d1.c - d1.r * u;
    const cplx s2 = d2.c + d2.r * u;
    const double a1 = std::arg(lune.corner_map.apply(s1));
    const double a2 = std::arg(lune.corner_map.apply(s2));
    double w12 = a2 - a1;
    w12 -= 2.0 * M_PI * std::floor(w12 / (2.0 * M_PI));
    double t0 = std::arg(lune.corner_map.apply(d1.c)) - a1;
    t0 -= 2.0 * M_PI * std::floor(t0 / (2.0 * M_PI));
    if (t0 < w12) {
        lune.start = a1;
        lune.width = w12;
    } else {
        lune.start = a2;
        lune.width = 2.0 * M_PI - w12;
    }

    // forward: disk -> upper half-plane -> sector of angle `width` -> rotate
    // into place -> pull corners back to p1/p2.
    const HoloExpr cayley =
        expr_mobius(MoebiusMap(cplx(0.0, 1.0), cplx(0.0, 1.0), -1.0, 1.0));
    const HoloExpr straighten = expr_rpow(lune.width / M_PI);
    const HoloExpr rotate = expr_affine(std::polar(1.0, lune.start), 0.0);
    const HoloExpr back = expr_mobius(lune.corner_map.inverse());
    HoloExpr fwd = expr_compose(
        back, expr_compose(rotate, expr_compose(straighten, cayley)));
    fwd.declared_univalent = true;
    lune.forward = fwd;
    return lune;
}

} // namespace

cplx LuneUniformizer::param_of(cplx z) const {
    const cplx mz = corner_map.apply(z);
    const cplx q = std::polar(1.0, -start) * mz;
    const double ang = arg2pi(q);
    if (!(ang > 0.0) || !(ang < width) || !(std::abs(q) > 0.0))
        throw DomainError("disk union: point outside the union");
    const cplx logq(std::log(std::abs(q)), ang);
    const cplx p = std::exp((M_PI / width) * logq);
    return (p - cplx(0.0, 1.0)) / (p + cplx(0.0, 1.0));
}

// ---------------------------------------------------------------------------
// Scenes.

DomainScene DomainScene::round_disk(cplx c, double r) {
    if (!(r > 0.0))
        throw BadArgument("round_disk: radius must be positive");
    DomainScene s;
    s.kind_ = SceneKind::RoundDisk;
    s.disks_ = {RoundDisk{c, r}};
    return s;
}

DomainScene DomainScene::half_plane(cplx normal, double offset) {
    const double nn = std::abs(normal);
    if (!(nn > 0.0))
        throw BadArgument("half_plane: zero normal");
    DomainScene s;
    s.kind_ = SceneKind::HalfPlane;
    s.normal_ = normal / nn;
    s.offset_ = offset;
    return s;
}

DomainScene DomainScene::disk_union(std::vector<RoundDisk> disks) {
    if (disks.empty())
        throw BadArgument("disk_union: need at least one disk");
    for (const auto& d : disks)
        if (!(d.r > 0.0))
            throw BadArgument("disk_union: radius must be positive");
    DomainScene s;
    s.kind_ = disks.size() == 1 ? SceneKind::RoundDisk : SceneKind::DiskUnion;
    s.disks_ = std::move(disks);
    return s;
}

DomainScene DomainScene::image_domain(HoloExpr expr, std::string expr_text) {
    DomainScene s;
    s.kind_ = SceneKind::ImageDomain;
    s.expr_ = std::move(expr);
    s.expr_.declared_univalent = true;
    s.expr_text_ = std::move(expr_text);
    return s;
}

DomainScene DomainScene::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scene JSON: ") + e.what());
    }
    try {
        if (j.contains("domain"))
            j = j.at("domain");
        const std::string type = j.at("type").get<std::string>();
        auto as_cplx = [](const nlohmann::json& v) {
            return cplx(v.at(0).get<double>(), v.at(1).get<double>());
        };
        if (type == "round-disk") {
            return round_disk(as_cplx(j.at("c")), j.at("r").get<double>());
        } else if (type == "half-plane") {
            return half_plane(as_cplx(j.at("normal")), j.at("offset").get<double>());
        } else if (type == "disk-union") {
            std::vector<RoundDisk> disks;
            for (const auto& dj : j.at("disks"))
                disks.push_back(RoundDisk{as_cplx(dj.at("c")), dj.at("r").get<double>()});
            return disk_union(std::move(disks));
        } else if (type == "image-domain") {
            const std::string text_expr = j.at("expr").get<std::string>();
            return image_domain(parse_expr(text_expr), text_expr);
        }
        throw ParseError("scene JSON: unknown type '" + type + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scene JSON: ") + e.what());
    } catch (const BadArgument& e) {
        // Validation failures inside the factories are parse errors when the
        // values came from a document.
        throw ParseError(std::string("scene JSON: ") + e.what());
    }
}

DomainScene DomainScene::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("scene: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

bool DomainScene::contains(cplx z) const {
    switch (kind_) {
    case SceneKind::RoundDisk:
        return std::abs(z - disks_[0].c) < disks_[0].r;
    case SceneKind::HalfPlane:
        return (std::conj(normal_) * z).real() < offset_;
    case SceneKind::DiskUnion:
        return std::any_of(disks_.begin(), disks_.end(), [&](const RoundDisk& d) {
            return std::abs(z - d.c) < d.r;
        });
    case SceneKind::ImageDomain:
        return std::abs(z) < 1.0; // parameter-space convention
    }
    return false;
}

namespace {

// Distance from a point of a disk union to the union's boundary, exact up to
// rounding. The boundary consists of the arcs of each circle lying outside
// every other open disk; the nearest boundary point to c is either the radial
// foot on such an arc or one of the arc endpoints (circle-circle corners), so
// the minimum over visible feet and visible corners is the distance itself.
// Sampling is deliberately avoided: an optimizer probing this function would
// exploit any discretization gap near the corners.
double union_boundary_distance(const std::vector<RoundDisk>& disks, cplx c) {
    constexpr double eps = 1e-12;
    const size_t n = disks.size();
    const auto hidden = [&](cplx p, size_t s1, size_t s2) {
        for (size_t k = 0; k < n; ++k) {
            if (k == s1 || k == s2)
                continue;
            if (std::abs(p - disks[k].c) < disks[k].r - eps)
                return true;
        }
        return false;
    };
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i) {
        const cplx v = c - disks[i].c;
        const double d = std::abs(v);
        if (d > eps) {
            const cplx foot = disks[i].c + disks[i].r * (v / d);
            if (!hidden(foot, i, i))
                best = std::min(best, std::abs(disks[i].r - d));
        } else {
            // c sits at the circle's centre: all circle points are
            // equidistant, so the circle contributes its full radius unless
            // some single other disk swallows it whole.
            bool swallowed = false;
            for (size_t k = 0; k < n && !swallowed; ++k)
                swallowed = k != i && std::abs(disks[i].c - disks[k].c) +
                                              disks[i].r <
                                          disks[k].r - eps;
            if (!swallowed)
                best = std::min(best, disks[i].r);
        }
        for (size_t j = i + 1; j < n; ++j) {
            const cplx axis_v = disks[j].c - disks[i].c;
            const double dd = std::abs(axis_v);
            const double ri = disks[i].r, rj = disks[j].r;
            if (dd < eps || dd > ri + rj || dd < std::abs(ri - rj))
                continue; // concentric, disjoint, or nested: no corners
            const double a = (dd * dd + ri * ri - rj * rj) / (2.0 * dd);
            const double h = std::sqrt(std::max(0.0, ri * ri - a * a));
            const cplx axis = axis_v / dd;
            const cplx mid = disks[i].c + a * axis;
            const cplx perp(-axis.imag(), axis.real());
            for (const double sgn : {1.0, -1.0}) {
                const cplx q = mid + sgn * h * perp;
                if (!hidden(q, i, j))
                    best = std::min(best, std::abs(c - q));
                if (h < eps)
                    break; // tangency: one corner only
            }
        }
    }
    return std::isfinite(best) ? best : 0.0;
}

} // namespace

bool DomainScene::disk_fits(cplx c, double r) const {
    if (!(r > 0.0))
        return false;
    const double tol = 1e-9;
    switch (kind_) {
    case SceneKind::RoundDisk:
        return std::abs(c - disks_[0].c) + r <= disks_[0].r + tol;
    case SceneKind::HalfPlane:
        return (std::conj(normal_) * c).real() + r <= offset_ + tol;
    case SceneKind::DiskUnion:
        if (!contains(c))
            return false;
        return r <= union_boundary_distance(disks_, c) + tol;
    case SceneKind::ImageDomain:
        throw UnsupportedError(
            "disk_fits: image-domain geometry is only known through its chart");
    }
    return false;
}

double DomainScene::max_inscribed_radius(cplx c) const {
    switch (kind_) {
    case SceneKind::RoundDisk:
        return std::max(0.0, disks_[0].r - std::abs(c - disks_[0].c));
    case SceneKind::HalfPlane:
        return std::max(0.0, offset_ - (std::conj(normal_) * c).real());
    case SceneKind::DiskUnion:
        if (!contains(c))
            return 0.0;
        return union_boundary_distance(disks_, c);
    case SceneKind::ImageDomain:
        throw UnsupportedError(
            "max_inscribed_radius: image-domain geometry is only known "
            "through its chart");
    }
    throw Error("max_inscribed_radius: unreachable");
}

DensityJet DomainScene::hyperbolic_density(cplx z) const {
    return chart_sample(z).jet;
}

DomainScene::ChartSample DomainScene::chart_sample(cplx z) const {
    switch (kind_) {
    case SceneKind::RoundDisk:
        return ChartSample{z, 1.0, hyperbolic_density_disk(disks_[0].c, disks_[0].r, z)};
    case SceneKind::HalfPlane:
        return ChartSample{z, 1.0, hyperbolic_density_halfplane(normal_, offset_, z)};
    case SceneKind::DiskUnion: {
        if (disks_.size() != 2)
            throw UnsupportedError(
                "hyperbolic density of a union needs exactly two disks");
        const LuneUniformizer& lune = uniformizer();
        const cplx zeta = lune.param_of(z);
        const HoloJet3 fj = lune.forward.jet(zeta);
        const DensityJet base = hyperbolic_density_disk(0.0, 1.0, zeta);
        return ChartSample{z, 1.0, density_pushforward(base, fj)};
    }
    case SceneKind::ImageDomain: {
        if (!(std::abs(z) < 1.0))
            throw DomainError("image-domain: parameter outside the unit disk");
        const HoloJet3 fj = expr_.jet(z);
        const DensityJet base = hyperbolic_density_disk(0.0, 1.0, z);
        return ChartSample{fj.f, fj.df, density_pushforward(base, fj)};
    }
    }
    throw Error("chart_sample: unreachable");
}

const LuneUniformizer& DomainScene::uniformizer() const {
    if (kind_ != SceneKind::DiskUnion || disks_.size() != 2)
        throw UnsupportedError("uniformizer: only two-disk unions have one");
    if (!lune_)
        lune_ = build_lune(disks_[0], disks_[1]);
    return *lune_;
}

// ---------------------------------------------------------------------------
// Projective metric.

namespace {

double disk_density_at(cplx c, double r, cplx z) {
    const double s = r * r - std::norm(z - c);
    if (!(s > 0.0))
        return std::numeric_limits<double>::infinity();
    return 2.0 * r / s;
}

struct Candidate {
    cplx c{0.0};
    double r = 0.0;
    double density = std::numeric_limits<double>::infinity();
};

// density first; exact ties prefer small |centre|, then small radius. The
// comparisons are exact on purpose: a fuzzy tie band is not a strict weak
// order and lets the compass search below crawl indefinitely.
bool better(const Candidate& a, const Candidate& b) {
    if (a.density != b.density)
        return a.density < b.density;
    const double ca = std::abs(a.c), cb = std::abs(b.c);
    if (ca != cb)
        return ca < cb;
    return a.r < b.r;
}

Candidate evaluate_center(const DomainScene& scene, cplx z, cplx c) {
    Candidate cand;
    cand.c = c;
    cand.r = scene.max_inscribed_radius(c);
    if (cand.r > 0.0)
        cand.density = disk_density_at(c, cand.r, z);
    return cand;
}

SupportingDisk search_supporting_disk(const DomainScene& scene, cplx z) {
    // Stage 1: coarse grid over the scene's bounding box plus seeded centres.
    double xlo = z.real(), xhi = z.real(), ylo = z.imag(), yhi = z.imag();
    for (const auto& d : scene.disks()) {
        xlo = std::min(xlo, d.c.real() - d.r);
        xhi = std::max(xhi, d.c.real() + d.r);
        ylo = std::min(ylo, d.c.imag() - d.r);
        yhi = std::max(yhi, d.c.imag() + d.r);
    }
    Candidate best;
    auto consider = [&](cplx c) {
        const Candidate cand = evaluate_center(scene, z, c);
        if (better(cand, best))
            best = cand;
    };
    const int n = 21;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            consider(cplx(xlo + (xhi - xlo) * i / (n - 1),
                          ylo + (yhi - ylo) * j / (n - 1)));
    for (const auto& d : scene.disks())
        consider(d.c);
    consider(z);
    if (!std::isfinite(best.density))
        throw DomainError("projective_density: no inscribed disk through the point");

    // Stage 2: compass refinement of the centre. The iteration cap is a
    // safety net; the strict ordering above makes each acceptance a real
    // decrease, so the search normally stops long before it.
    double step = std::max(xhi - xlo, yhi - ylo) / double(n - 1);
    if (!(step > 0.0))
        step = 0.1;
    const double scale = 1.0 + std::abs(best.c);
    for (int iter = 0; iter < 100000 && step > 1e-11 * scale; ++iter) {
        bool improved = false;
        static const cplx dirs[8] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                     {1, 1},  {1, -1}, {-1, 1}, {-1, -1}};
        for (const cplx& d : dirs) {
            const Candidate cand = evaluate_center(scene, z, best.c + step * d);
            if (better(cand, best)) {
                best = cand;
                improved = true;
            }
        }
        if (!improved)
            step *= 0.5;
    }
    return SupportingDisk{best.c, best.r, best.density};
}

} // namespace

SupportingDisk projective_density(const DomainScene& scene, cplx z) {
    switch (scene.kind()) {
    case SceneKind::RoundDisk: {
        // Any disk inside a round disk has a larger density at interior
        // points, so the scene disk itself is the supporting disk.
        const RoundDisk& d = scene.disks()[0];
        const double rho = disk_density_at(d.c, d.r, z);
        if (!std::isfinite(rho))
            throw DomainError("projective_density: point outside the disk");
        return SupportingDisk{d.c, d.r, rho};
    }
    case SceneKind::HalfPlane: {
        // The half-plane is itself a round disk through infinity; report it
        // with an infinite radius and the boundary foot point as centre.
        const cplx n = scene.half_plane_normal();
        const double delta = scene.half_plane_offset() - (std::conj(n) * z).real();
        if (!(delta > 0.0))
            throw DomainError("projective_density: point outside the half-plane");
        return SupportingDisk{z + delta * n, std::numeric_limits<double>::infinity(),
                              1.0 / delta};
    }
    case SceneKind::DiskUnion: {
        if (!scene.contains(z))
            throw DomainError("projective_density: point outside the union");
        return search_supporting_disk(scene, z);
    }
    case SceneKind::ImageDomain:
        throw UnsupportedError(
            "projective_density: image domains carry no explicit geometry; "
            "use an explicit scene");
    }
    throw Error("projective_density: unreachable");
}

MetricComparison metric_compare(const DomainScene& scene, cplx z) {
    const DomainScene::ChartSample cs = scene.chart_sample(z);
    MetricComparison out;
    out.rho_hyp = std::exp(cs.jet.u);
    out.disk = projective_density(scene, cs.w);
    out.rho_proj = out.disk.density;
    out.ratio = out.rho_proj / out.rho_hyp;
    return out;
}

} // namespace epsteinlab
