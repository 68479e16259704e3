#include "harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "epstein.hpp"
#include "wvol.hpp"

namespace epsteinlab {

namespace {

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Atomic-ish CSV write: stage to a sibling temp file, then rename over.
void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot write " + tmp);
        out << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error("cannot move " + tmp + " into place");
}

} // namespace

// ---------------------------------------------------------------------------
// Tolerances and reports.

ToleranceSet ToleranceSet::defaults() {
    ToleranceSet t;
    t.values = {
        {"closed_form", 1e-9}, // residuals of closed-form identities
        {"finite_diff", 1e-5}, // residuals limited by the FD shape operator
        {"gauss", 1e-4},       // intrinsic curvature via second differences
        {"dome", 1e-6},        // hemisphere and dihedral deviations
    };
    return t;
}

double ToleranceSet::get(const std::string& name) const {
    const auto it = values.find(name);
    if (it == values.end())
        throw BadArgument("unknown tolerance '" + name + "'");
    return it->second;
}

void ToleranceSet::set(const std::string& name, double v) {
    if (!(v > 0.0))
        throw BadArgument("tolerance '" + name + "' must be positive");
    values[name] = v; // overrides may also introduce new names
}

bool Report::all_pass() const {
    if (checks.empty())
        return false;
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckRecord& c) { return c.pass; });
}

std::string Report::to_json_text() const {
    nlohmann::json j;
    j["command"] = command;
    j["seed"] = seed;
    j["tolerances"] = tolerances.values;
    j["degenerate_samples"] = degenerate_samples;
    j["all_pass"] = all_pass();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json cj;
        cj["name"] = c.name;
        cj["value"] = c.value;
        cj["tol"] = c.tol;
        cj["pass"] = c.pass;
        if (!c.note.empty())
            cj["note"] = c.note;
        j["checks"].push_back(cj);
    }
    j["outputs"] = outputs;
    return j.dump(2);
}

std::string Report::text() const {
    std::ostringstream os;
    os << "command: " << command << "\n";
    os << "seed: " << seed << "\n";
    os << "tolerances:";
    for (const auto& [k, v] : tolerances.values)
        os << " " << k << "=" << g17(v);
    os << "\n";
    int passed = 0;
    for (const auto& c : checks) {
        os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << "  value=" << g17(c.value)
           << "  tol=" << g17(c.tol);
        if (!c.note.empty())
            os << "  (" << c.note << ")";
        os << "\n";
        if (c.pass)
            ++passed;
    }
    for (const auto& o : outputs)
        os << "wrote: " << o << "\n";
    os << "summary: " << passed << "/" << checks.size() << " checks passed, "
       << degenerate_samples << " degenerate samples\n";
    if (checks.empty())
        os << "summary: no checks ran; this counts as failure\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Config.

RunConfig RunConfig::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config JSON: ") + e.what());
    }
    RunConfig c;
    try {
        c.command = j.at("command").get<std::string>();
        if (j.contains("scene")) {
            if (j["scene"].is_string())
                c.scene_path = j["scene"].get<std::string>();
            else
                c.scene_json = j["scene"].dump();
        }
        if (j.contains("descriptors")) {
            if (j["descriptors"].is_string())
                c.descriptors_path = j["descriptors"].get<std::string>();
            else
                c.descriptors_json = j["descriptors"].dump();
        }
        if (j.contains("grid"))
            c.grid = j["grid"].get<int>();
        if (j.contains("seed"))
            c.seed = j["seed"].get<unsigned long long>();
        if (j.contains("times"))
            c.times = j["times"].get<std::vector<double>>();
        if (j.contains("tol"))
            for (const auto& [k, v] : j["tol"].items())
                c.tol_overrides[k] = v.get<double>();
        if (j.contains("out"))
            c.out = j["out"].get<std::string>();
        if (j.contains("chi"))
            c.chi = j["chi"].get<int>();
        auto range3 = [&](const char* key, double* dst) {
            if (!j.contains(key))
                return;
            const auto& r = j[key];
            dst[0] = r.at(0).get<double>();
            dst[1] = r.at(1).get<double>();
            dst[2] = r.at(2).get<double>();
        };
        range3("lrange", c.lrange);
        range3("prange", c.prange);
        if (j.contains("points"))
            for (const auto& p : j["points"])
                c.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config JSON: ") + e.what());
    }
    if (c.grid < 1)
        throw BadArgument("config: grid must be at least 1");
    if (c.times.empty())
        throw BadArgument("config: times must be nonempty");
    return c;
}

// ---------------------------------------------------------------------------
// Samplers.

namespace {

DomainScene load_scene(const RunConfig& cfg) {
    if (!cfg.scene_json.empty())
        return DomainScene::from_json_text(cfg.scene_json);
    if (!cfg.scene_path.empty())
        return DomainScene::load(cfg.scene_path);
    throw BadArgument("command '" + cfg.command + "' needs a scene");
}

std::vector<ProjectiveDescriptor> load_descs(const RunConfig& cfg) {
    if (!cfg.descriptors_json.empty())
        return descriptors_from_json_text(cfg.descriptors_json);
    if (!cfg.descriptors_path.empty())
        return load_descriptors(cfg.descriptors_path);
    throw BadArgument("command '" + cfg.command + "' needs descriptors");
}

// Seeded interior samples, kept away from scene boundaries so the frames stay
// quantitatively nondegenerate.
std::vector<cplx> sample_points(const DomainScene& scene, int count,
                                unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<cplx> out;
    auto push_disk_like = [&](cplx c, double r, double shrink) {
        while (static_cast<int>(out.size()) < count) {
            const double rad = r * shrink * std::sqrt(unit(rng));
            const double ang = 2.0 * M_PI * unit(rng);
            out.push_back(c + std::polar(rad, ang));
        }
    };
    switch (scene.kind()) {
    case SceneKind::RoundDisk:
        push_disk_like(scene.disks()[0].c, scene.disks()[0].r, 0.8);
        break;
    case SceneKind::ImageDomain:
        push_disk_like(0.0, 1.0, 0.6);
        break;
    case SceneKind::HalfPlane: {
        const cplx n = scene.half_plane_normal();
        const double d = scene.half_plane_offset();
        while (static_cast<int>(out.size()) < count) {
            const double depth = 0.2 + 2.0 * unit(rng);
            const double side = 4.0 * unit(rng) - 2.0;
            out.push_back(n * (d - depth) + cplx(0.0, 1.0) * n * side);
        }
        break;
    }
    case SceneKind::DiskUnion: {
        double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
        for (const auto& dsk : scene.disks()) {
            xlo = std::min(xlo, dsk.c.real() - dsk.r);
            xhi = std::max(xhi, dsk.c.real() + dsk.r);
            ylo = std::min(ylo, dsk.c.imag() - dsk.r);
            yhi = std::max(yhi, dsk.c.imag() + dsk.r);
        }
        int guard = 0;
        while (static_cast<int>(out.size()) < count && guard++ < 100000) {
            const cplx z(xlo + (xhi - xlo) * unit(rng), ylo + (yhi - ylo) * unit(rng));
            if (!scene.contains(z))
                continue;
            // Stay clearly inside: the intrinsic density blows up at the rim.
            try {
                if (std::exp(scene.hyperbolic_density(z).u) > 25.0)
                    continue;
            } catch (const Error&) {
                continue;
            }
            out.push_back(z);
        }
        if (static_cast<int>(out.size()) < count)
            throw NonConvergedError("sample_points: rejection sampling starved");
        break;
    }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Commands.

void add_check(Report& rep, const std::string& name, double value,
               const std::string& tol_name, const std::string& note = "") {
    CheckRecord c;
    c.name = name;
    c.value = value;
    c.tol = rep.tolerances.get(tol_name);
    c.pass = std::isfinite(value) && value <= c.tol;
    c.note = note;
    rep.checks.push_back(c);
}

void run_verify_identities(const RunConfig& cfg, Report& rep) {
    const DomainScene scene = load_scene(cfg);
    const Chart chart = scene_chart(scene);
    const std::vector<cplx> pts = sample_points(scene, cfg.grid, cfg.seed);
    const double s = cfg.times.front();

    std::ostringstream csv;
    csv << "z_re,z_im,t,eig1,eig2,residual_3,residual_4,residual_6,residual_7,"
           "area_ratio_residual,gauss_residual\n";

    IdentityResiduals worst;
    double worst_flow = 0.0;
    int rows = 0;
    int near_degenerate = 0;
    for (const cplx& z : pts) {
        // Classify quantitatively degenerate samples first and skip them:
        // identities hold there too, but the FD frame loses its accuracy.
        bool usable = true;
        for (const double t : cfg.times) {
            try {
                const ShapeFrame f = fundamental_forms(chart, z, t);
                if (f.shape.frobenius() > 50.0)
                    usable = false;
            } catch (const Error&) {
                usable = false;
            }
            if (!usable)
                break;
        }
        if (!usable) {
            ++near_degenerate;
            continue;
        }
        for (const double t : cfg.times) {
            IdentityResiduals r;
            try {
                r = identity_suite(chart, z, s, t);
            } catch (const DegenerateError&) {
                ++near_degenerate;
                continue;
            }
            ++rows;
            worst.res_metric_conjugation =
                std::max(worst.res_metric_conjugation, r.res_metric_conjugation);
            worst.res_flow_moebius = std::max(worst.res_flow_moebius, r.res_flow_moebius);
            worst.res_metric_reconstruction =
                std::max(worst.res_metric_reconstruction, r.res_metric_reconstruction);
            worst.res_inf_scaling = std::max(worst.res_inf_scaling, r.res_inf_scaling);
            worst.res_area_ratio = std::max(worst.res_area_ratio, r.res_area_ratio);
            worst.res_gauss = std::max(worst.res_gauss, r.res_gauss);
            worst_flow = std::max(worst_flow, r.res_flow_distance);
            csv << g17(z.real()) << ',' << g17(z.imag()) << ',' << g17(t) << ','
                << g17(r.eig[0]) << ',' << g17(r.eig[1]) << ','
                << g17(r.res_metric_conjugation) << ',' << g17(r.res_flow_moebius)
                << ',' << g17(r.res_metric_reconstruction) << ','
                << g17(r.res_inf_scaling) << ',' << g17(r.res_area_ratio) << ','
                << g17(r.res_gauss) << "\n";
        }
    }
    rep.degenerate_samples = near_degenerate;

    const std::string note = std::to_string(rows) + " rows";
    if (rows == 0) {
        rep.checks.push_back(CheckRecord{"identity_rows", 0.0, 1.0, false,
                                         "no nondegenerate samples"});
    } else {
        add_check(rep, "max_residual_3", worst.res_metric_conjugation, "finite_diff", note);
        add_check(rep, "max_residual_4", worst.res_flow_moebius, "finite_diff", note);
        add_check(rep, "max_residual_6", worst.res_metric_reconstruction, "finite_diff",
                  note);
        add_check(rep, "max_residual_7", worst.res_inf_scaling, "finite_diff", note);
        add_check(rep, "max_area_ratio_residual", worst.res_area_ratio, "finite_diff",
                  note);
        add_check(rep, "max_gauss_residual", worst.res_gauss, "gauss", note);
        add_check(rep, "max_flow_distance_residual", worst_flow, "closed_form", note);
    }
    if (!cfg.out.empty()) {
        write_file_atomic(cfg.out, csv.str());
        rep.outputs.push_back(cfg.out);
    }
}

void run_epstein_sample(const RunConfig& cfg, Report& rep) {
    const DomainScene scene = load_scene(cfg);
    const std::vector<cplx> pts = sample_points(scene, cfg.grid, cfg.seed);

    std::ostringstream csv;
    csv << "z_re,z_im,t,x_re,x_im,x_h,n_1,n_2,n_3,env_level,env_stationary\n";
    double worst_level = 0.0, worst_stat = 0.0, worst_unit = 0.0;
    for (const cplx& zeta : pts) {
        const DomainScene::ChartSample cs = scene.chart_sample(zeta);
        for (const double t : cfg.times) {
            const EpsteinSample smp = epstein_flow(cs.jet, cs.w, t);
            worst_level = std::max(worst_level, smp.env_level);
            worst_stat = std::max(worst_stat, smp.env_stationary);
            const double unit_res =
                std::abs(dot(smp.normal, smp.normal) / (smp.x.t * smp.x.t) - 1.0);
            worst_unit = std::max(worst_unit, unit_res);
            csv << g17(smp.z.real()) << ',' << g17(smp.z.imag()) << ',' << g17(t)
                << ',' << g17(smp.x.w.real()) << ',' << g17(smp.x.w.imag()) << ','
                << g17(smp.x.t) << ',' << g17(smp.normal.x) << ','
                << g17(smp.normal.y) << ',' << g17(smp.normal.z) << ','
                << g17(smp.env_level) << ',' << g17(smp.env_stationary) << "\n";
        }
    }
    add_check(rep, "max_env_level_residual", worst_level, "closed_form");
    add_check(rep, "max_env_stationary_residual", worst_stat, "closed_form");
    add_check(rep, "max_normal_unit_residual", worst_unit, "closed_form");
    if (!cfg.out.empty()) {
        write_file_atomic(cfg.out, csv.str());
        rep.outputs.push_back(cfg.out);
    }
}

std::vector<cplx> default_dome_probes(const DomainScene& scene) {
    // Points well inside one disk and away from the other: there the
    // supporting disk is the scene disk itself.
    std::vector<cplx> probes;
    const auto& ds = scene.disks();
    for (size_t i = 0; i < ds.size(); ++i) {
        cplx away(0.0);
        for (size_t k = 0; k < ds.size(); ++k)
            if (k != i)
                away += ds[i].c - ds[k].c;
        const double an = std::abs(away);
        away = (an > 0.0) ? away / an : cplx(1.0, 0.0);
        const cplx perp = away * cplx(0.0, 1.0);
        probes.push_back(ds[i].c + 0.45 * ds[i].r * away);
        probes.push_back(ds[i].c + ds[i].r * (0.35 * away + 0.2 * perp));
        probes.push_back(ds[i].c + ds[i].r * (0.35 * away - 0.2 * perp));
    }
    return probes;
}

void run_dome(const RunConfig& cfg, Report& rep) {
    const DomainScene scene = load_scene(cfg);
    if (scene.kind() != SceneKind::DiskUnion)
        throw BadArgument("dome: scene must be a disk union");
    std::vector<cplx> probes = cfg.points.empty() ? default_dome_probes(scene)
                                                  : cfg.points;

    std::ostringstream csv;
    csv << "z_re,z_im,disk_c_re,disk_c_im,disk_r,density,matched_disk,"
           "hemisphere_residual\n";
    double worst_hemi = 0.0;
    std::vector<RoundDisk> found(scene.disks().size(),
                                 RoundDisk{cplx(0.0), -1.0});
    bool excluded_hit = false;
    std::string excluded_note;
    for (const cplx& z : probes) {
        DomeProbe probe;
        try {
            probe = dome_check(scene, z);
        } catch (const ExcludedRegionError& e) {
            excluded_hit = true;
            excluded_note = e.what();
            continue;
        }
        worst_hemi = std::max(worst_hemi, probe.hemisphere_residual);
        if (found[probe.matched].r < 0.0)
            found[probe.matched] = RoundDisk{probe.disk.c, probe.disk.r};
        csv << g17(z.real()) << ',' << g17(z.imag()) << ',' << g17(probe.disk.c.real())
            << ',' << g17(probe.disk.c.imag()) << ',' << g17(probe.disk.r) << ','
            << g17(probe.disk.density) << ',' << probe.matched << ','
            << g17(probe.hemisphere_residual) << "\n";
    }
    add_check(rep, "max_hemisphere_residual", worst_hemi, "dome");
    if (excluded_hit)
        rep.checks.push_back(
            CheckRecord{"probes_outside_bending_region", 1.0, 0.0, false, excluded_note});

    // Dihedral between the first two recovered hemispheres, against the exact
    // scene geometry.
    if (scene.disks().size() >= 2) {
        if (found[0].r > 0.0 && found[1].r > 0.0) {
            const double measured = dome_dihedral(found[0], found[1]);
            const double expected = dome_dihedral(scene.disks()[0], scene.disks()[1]);
            add_check(rep, "dihedral_residual", std::abs(measured - expected), "dome",
                      "measured=" + g17(measured) + " expected=" + g17(expected));
        } else {
            rep.checks.push_back(CheckRecord{"dihedral_residual", 0.0, 0.0, false,
                                             "probes did not cover both disks"});
        }
    }
    if (!cfg.out.empty()) {
        write_file_atomic(cfg.out, csv.str());
        rep.outputs.push_back(cfg.out);
    }
}

void run_bounds(const RunConfig& cfg, Report& rep) {
    const std::vector<ProjectiveDescriptor> descs = load_descs(cfg);
    if (descs.empty())
        throw BadArgument("bounds: descriptor list is empty");

    std::ostringstream csv;
    csv << "chi,L,phi_inf,phi_two,w_upper_sharp,w_upper_coarse,w_lower,main_bound,"
           "corollary_line,anderson_bound,max_phi_two,admissible,closure_ok,"
           "within_main,anderson_ok,nehari_ok\n";
    double worst_closure = 0.0;
    double worst_order = 0.0; // sharp must not exceed coarse
    for (const auto& d : descs) {
        const ChainReport r = chain_verify(d);
        worst_closure = std::max(worst_closure, r.closure_residual);
        worst_order = std::max(worst_order, r.w_upper_sharp - r.w_upper_coarse);
        csv << d.chi << ',' << g17(d.L) << ',' << g17(d.phi_inf) << ','
            << g17(d.phi_two) << ',' << g17(r.w_upper_sharp) << ','
            << g17(r.w_upper_coarse) << ',' << g17(r.w_lower_value) << ','
            << g17(r.main_bound_value) << ',' << g17(corollary_line(d.L)) << ','
            << g17(r.anderson_value) << ',' << g17(r.max_phi_two) << ','
            << int(r.admissible) << ',' << int(r.closure_ok) << ','
            << int(r.within_main) << ',' << int(r.anderson_ok) << ','
            << int(r.nehari_ok) << "\n";
    }
    add_check(rep, "max_chain_closure_residual", worst_closure, "closed_form");
    add_check(rep, "max_upper_bound_order_violation", std::max(worst_order, 0.0),
              "closed_form", "sharp bound must stay below L/4");
    if (!cfg.out.empty()) {
        write_file_atomic(cfg.out, csv.str());
        rep.outputs.push_back(cfg.out);
    }
}

void run_sweep(const RunConfig& cfg, Report& rep) {
    const int nl = static_cast<int>(cfg.lrange[2]);
    const int np = static_cast<int>(cfg.prange[2]);
    if (nl < 2 || np < 2)
        throw BadArgument("sweep: ranges need at least two samples");

    std::ostringstream csv;
    csv << "L,phi_inf,main_bound,corollary_line,anderson_bound,w_upper_sharp,"
           "w_upper_coarse,w_lower,admissible,closure_ok,nehari_ok\n";
    std::vector<std::vector<double>> mb(nl, std::vector<double>(np, 0.0));
    double worst_closure = 0.0;
    bool all_admissible = true;
    for (int i = 0; i < nl; ++i) {
        const double L = cfg.lrange[0] + (cfg.lrange[1] - cfg.lrange[0]) * i / (nl - 1);
        for (int k = 0; k < np; ++k) {
            const double p =
                cfg.prange[0] + (cfg.prange[1] - cfg.prange[0]) * k / (np - 1);
            // Extremal descriptor: the L2-norm sits exactly on the main bound.
            ProjectiveDescriptor d(cfg.chi, L, p,
                                   (1.0 + p) * std::sqrt(std::max(L, 0.0)));
            const ChainReport r = chain_verify(d);
            mb[i][k] = r.main_bound_value;
            worst_closure = std::max(worst_closure, r.closure_residual);
            all_admissible = all_admissible && r.admissible;
            csv << g17(L) << ',' << g17(p) << ',' << g17(r.main_bound_value) << ','
                << g17(corollary_line(L)) << ',' << g17(r.anderson_value) << ','
                << g17(r.w_upper_sharp) << ',' << g17(r.w_upper_coarse) << ','
                << g17(r.w_lower_value) << ',' << int(r.admissible) << ','
                << int(r.closure_ok) << ',' << int(r.nehari_ok) << "\n";
        }
    }
    double worst_monotone = 0.0; // how far the bound drops along growing L or phi
    for (int i = 0; i < nl; ++i)
        for (int k = 0; k < np; ++k) {
            if (i > 0)
                worst_monotone = std::max(worst_monotone, mb[i - 1][k] - mb[i][k]);
            if (k > 0)
                worst_monotone = std::max(worst_monotone, mb[i][k - 1] - mb[i][k]);
        }
    add_check(rep, "max_chain_closure_residual", worst_closure, "closed_form");
    add_check(rep, "main_bound_monotonicity_violation", worst_monotone, "closed_form");
    rep.checks.push_back(CheckRecord{"extremal_descriptors_admissible",
                                     all_admissible ? 0.0 : 1.0, 0.5, all_admissible,
                                     ""});
    if (!cfg.out.empty()) {
        write_file_atomic(cfg.out, csv.str());
        rep.outputs.push_back(cfg.out);
    }
}

} // namespace

Report run(const RunConfig& config) {
    Report rep;
    rep.command = config.command;
    rep.seed = config.seed;
    rep.tolerances = ToleranceSet::defaults();
    for (const auto& [k, v] : config.tol_overrides)
        rep.tolerances.set(k, v);

    if (config.command == "verify-identities")
        run_verify_identities(config, rep);
    else if (config.command == "epstein-sample")
        run_epstein_sample(config, rep);
    else if (config.command == "dome")
        run_dome(config, rep);
    else if (config.command == "bounds")
        run_bounds(config, rep);
    else if (config.command == "sweep")
        run_sweep(config, rep);
    else
        throw BadArgument("unknown command '" + config.command + "'");
    return rep;
}

} // namespace epsteinlab
