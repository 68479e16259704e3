// C shim over the core: opaque handles, status codes, thread-local error
// text. Every entry point funnels through guard(), which maps the exception
// hierarchy onto el_status values.

#include "epsteinlab.h"

#include <cstring>
#include <exception>
#include <string>

#include "density.hpp"
#include "epstein.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "holo.hpp"
#include "wvol.hpp"

using namespace epsteinlab;

struct el_expr {
    HoloExpr expr;
};

struct el_scene {
    DomainScene scene;
};

namespace {

thread_local std::string t_last_error;

template <typename Fn>
el_status guard(Fn&& fn) {
    try {
        fn();
        t_last_error.clear();
        return EL_OK;
    } catch (const BadArgument& e) {
        t_last_error = e.what();
        return EL_ERR_BAD_ARG;
    } catch (const ParseError& e) {
        t_last_error = e.what();
        return EL_ERR_PARSE;
    } catch (const CriticalPointError& e) {
        t_last_error = e.what();
        return EL_ERR_CRITICAL_POINT;
    } catch (const DegenerateError& e) {
        t_last_error = e.what();
        return EL_ERR_DEGENERATE;
    } catch (const ExcludedRegionError& e) {
        t_last_error = e.what();
        return EL_ERR_EXCLUDED_REGION;
    } catch (const NonConvergedError& e) {
        t_last_error = e.what();
        return EL_ERR_NONCONVERGED;
    } catch (const UnsupportedError& e) {
        t_last_error = e.what();
        return EL_ERR_UNSUPPORTED;
    } catch (const GaugeError& e) {
        t_last_error = e.what();
        return EL_ERR_GAUGE;
    } catch (const DomainError& e) {
        t_last_error = e.what();
        return EL_ERR_DOMAIN;
    } catch (const Error& e) {
        t_last_error = e.what();
        return EL_ERR_INTERNAL;
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return EL_ERR_INTERNAL;
    } catch (...) {
        t_last_error = "unknown error";
        return EL_ERR_INTERNAL;
    }
}

el_status need(bool ok, const char* msg) {
    if (ok)
        return EL_OK;
    t_last_error = msg;
    return EL_ERR_BAD_ARG;
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char* el_status_name(el_status s) {
    switch (s) {
    case EL_OK: return "EL_OK";
    case EL_ERR_BAD_ARG: return "EL_ERR_BAD_ARG";
    case EL_ERR_PARSE: return "EL_ERR_PARSE";
    case EL_ERR_DOMAIN: return "EL_ERR_DOMAIN";
    case EL_ERR_CRITICAL_POINT: return "EL_ERR_CRITICAL_POINT";
    case EL_ERR_DEGENERATE: return "EL_ERR_DEGENERATE";
    case EL_ERR_UNSUPPORTED: return "EL_ERR_UNSUPPORTED";
    case EL_ERR_NONCONVERGED: return "EL_ERR_NONCONVERGED";
    case EL_ERR_EXCLUDED_REGION: return "EL_ERR_EXCLUDED_REGION";
    case EL_ERR_GAUGE: return "EL_ERR_GAUGE";
    case EL_ERR_IO: return "EL_ERR_IO";
    case EL_ERR_INTERNAL: return "EL_ERR_INTERNAL";
    }
    return "EL_ERR_INTERNAL";
}

const char* el_last_error(void) { return t_last_error.c_str(); }

void el_string_free(char* s) { delete[] s; }

/* ---------------------------------------------------------------------- */

el_status el_expr_parse(const char* text, el_expr** out) {
    if (el_status s = need(text && out, "el_expr_parse: null argument"); s != EL_OK)
        return s;
    return guard([&] { *out = new el_expr{parse_expr(text)}; });
}

void el_expr_free(el_expr* e) { delete e; }

el_status el_expr_jet(const el_expr* e, double z_re, double z_im, double out[8]) {
    if (el_status s = need(e && out, "el_expr_jet: null argument"); s != EL_OK)
        return s;
    return guard([&] {
        const HoloJet3 j = e->expr.jet(cplx(z_re, z_im));
        out[0] = j.f.real();
        out[1] = j.f.imag();
        out[2] = j.df.real();
        out[3] = j.df.imag();
        out[4] = j.d2f.real();
        out[5] = j.d2f.imag();
        out[6] = j.d3f.real();
        out[7] = j.d3f.imag();
    });
}

el_status el_expr_schwarzian(const el_expr* e, double z_re, double z_im,
                             double out[2]) {
    if (el_status s = need(e && out, "el_expr_schwarzian: null argument");
        s != EL_OK)
        return s;
    return guard([&] {
        const cplx v = schwarzian(e->expr, cplx(z_re, z_im));
        out[0] = v.real();
        out[1] = v.imag();
    });
}

el_status el_expr_nehari_scan(const el_expr* e, int nr, int ntheta, double rmax,
                              double* sup, double argmax[2], int* within_bound) {
    if (el_status s = need(e && sup && argmax && within_bound,
                           "el_expr_nehari_scan: null argument");
        s != EL_OK)
        return s;
    return guard([&] {
        GridSpec grid;
        grid.nr = nr;
        grid.ntheta = ntheta;
        grid.rmax = rmax;
        const NehariScanResult scan = nehari_scan(e->expr, grid);
        *sup = scan.sup_norm;
        argmax[0] = scan.argmax.real();
        argmax[1] = scan.argmax.imag();
        *within_bound = scan.within_bound ? 1 : 0;
    });
}

/* ---------------------------------------------------------------------- */

el_status el_scene_parse(const char* json_text, el_scene** out) {
    if (el_status s = need(json_text && out, "el_scene_parse: null argument");
        s != EL_OK)
        return s;
    return guard([&] { *out = new el_scene{DomainScene::from_json_text(json_text)}; });
}

el_status el_scene_load(const char* path, el_scene** out) {
    if (el_status s = need(path && out, "el_scene_load: null argument"); s != EL_OK)
        return s;
    return guard([&] { *out = new el_scene{DomainScene::load(path)}; });
}

void el_scene_free(el_scene* s) { delete s; }

el_status el_scene_density(const el_scene* s, double z_re, double z_im,
                           double out[6]) {
    if (el_status st = need(s && out, "el_scene_density: null argument");
        st != EL_OK)
        return st;
    return guard([&] {
        const DensityJet j = s->scene.hyperbolic_density(cplx(z_re, z_im));
        out[0] = j.u;
        out[1] = j.u_z.real();
        out[2] = j.u_z.imag();
        out[3] = j.u_zz.real();
        out[4] = j.u_zz.imag();
        out[5] = j.u_zzbar;
    });
}

el_status el_scene_projective(const el_scene* s, double z_re, double z_im,
                              double out[4]) {
    if (el_status st = need(s && out, "el_scene_projective: null argument");
        st != EL_OK)
        return st;
    return guard([&] {
        const SupportingDisk d = projective_density(s->scene, cplx(z_re, z_im));
        out[0] = d.c.real();
        out[1] = d.c.imag();
        out[2] = d.r;
        out[3] = d.density;
    });
}

el_status el_scene_metric_compare(const el_scene* s, double z_re, double z_im,
                                  double out[3]) {
    if (el_status st = need(s && out, "el_scene_metric_compare: null argument");
        st != EL_OK)
        return st;
    return guard([&] {
        const MetricComparison m = metric_compare(s->scene, cplx(z_re, z_im));
        out[0] = m.rho_hyp;
        out[1] = m.rho_proj;
        out[2] = m.ratio;
    });
}

el_status el_scene_epstein(const el_scene* s, double z_re, double z_im, double t,
                           double out[3]) {
    if (el_status st = need(s && out, "el_scene_epstein: null argument");
        st != EL_OK)
        return st;
    return guard([&] {
        const auto cs = s->scene.chart_sample(cplx(z_re, z_im));
        const EpsteinSample smp = epstein_flow(cs.jet, cs.w, t);
        out[0] = smp.x.w.real();
        out[1] = smp.x.w.imag();
        out[2] = smp.x.t;
    });
}

el_status el_scene_shape(const el_scene* s, double z_re, double z_im, double t,
                         double out[2]) {
    if (el_status st = need(s && out, "el_scene_shape: null argument");
        st != EL_OK)
        return st;
    return guard([&] {
        const ShapeFrame f =
            fundamental_forms(scene_chart(s->scene), cplx(z_re, z_im), t);
        const auto eig = f.shape.eigenvalues();
        out[0] = eig[0];
        out[1] = eig[1];
    });
}

el_status el_scene_identity_residuals(const el_scene* s, double z_re,
                                      double z_im, double s_time, double t_time,
                                      double out[8]) {
    if (el_status st = need(s && out, "el_scene_identity_residuals: null argument");
        st != EL_OK)
        return st;
    return guard([&] {
        const IdentityResiduals r =
            identity_suite(scene_chart(s->scene), cplx(z_re, z_im), s_time, t_time);
        out[0] = r.res_metric_conjugation;
        out[1] = r.res_flow_moebius;
        out[2] = r.res_metric_reconstruction;
        out[3] = r.res_inf_scaling;
        out[4] = r.res_area_ratio;
        out[5] = r.res_gauss;
        out[6] = r.res_flow_distance;
        out[7] = r.eig[0];
    });
}

el_status el_scene_dome_probe(const el_scene* s, double z_re, double z_im,
                              double out[8]) {
    if (el_status st = need(s && out, "el_scene_dome_probe: null argument");
        st != EL_OK)
        return st;
    return guard([&] {
        const DomeProbe p = dome_check(s->scene, cplx(z_re, z_im));
        out[0] = p.disk.c.real();
        out[1] = p.disk.c.imag();
        out[2] = p.disk.r;
        out[3] = p.disk.density;
        out[4] = static_cast<double>(p.matched);
        out[5] = p.x.w.real();
        out[6] = p.x.w.imag();
        out[7] = p.hemisphere_residual;
    });
}

/* ---------------------------------------------------------------------- */

el_status el_wvol_upper(int chi, double L, double* sharp, double* coarse) {
    if (el_status st = need(sharp && coarse, "el_wvol_upper: null argument");
        st != EL_OK)
        return st;
    return guard([&] {
        const UpperBound u = w_upper(ProjectiveDescriptor(chi, L, 0.0, 0.0));
        *sharp = u.sharp;
        *coarse = u.coarse;
    });
}

el_status el_wvol_lower(int chi, double L, double phi_inf, double phi_two,
                        double* out) {
    if (el_status st = need(out != nullptr, "el_wvol_lower: null argument");
        st != EL_OK)
        return st;
    return guard(
        [&] { *out = w_lower(ProjectiveDescriptor(chi, L, phi_inf, phi_two)); });
}

el_status el_wvol_main_bound(int chi, double L, double phi_inf, double* out) {
    if (el_status st = need(out != nullptr, "el_wvol_main_bound: null argument");
        st != EL_OK)
        return st;
    return guard(
        [&] { *out = main_bound(ProjectiveDescriptor(chi, L, phi_inf, 0.0)); });
}

el_status el_wvol_anderson(int chi, double phi_inf, double* out) {
    if (el_status st = need(out != nullptr, "el_wvol_anderson: null argument");
        st != EL_OK)
        return st;
    return guard(
        [&] { *out = anderson_bound(ProjectiveDescriptor(chi, 0.0, phi_inf, 0.0)); });
}

el_status el_wvol_chain(int chi, double L, double phi_inf, double phi_two,
                        double values[7], int flags[5]) {
    if (el_status st = need(values && flags, "el_wvol_chain: null argument");
        st != EL_OK)
        return st;
    return guard([&] {
        const ChainReport r =
            chain_verify(ProjectiveDescriptor(chi, L, phi_inf, phi_two));
        values[0] = r.w_lower_value;
        values[1] = r.w_upper_sharp;
        values[2] = r.w_upper_coarse;
        values[3] = r.max_phi_two;
        values[4] = r.main_bound_value;
        values[5] = r.closure_residual;
        values[6] = r.anderson_value;
        flags[0] = r.admissible ? 1 : 0;
        flags[1] = r.closure_ok ? 1 : 0;
        flags[2] = r.within_main ? 1 : 0;
        flags[3] = r.anderson_ok ? 1 : 0;
        flags[4] = r.nehari_ok ? 1 : 0;
    });
}

/* ---------------------------------------------------------------------- */

el_status el_run_config_json(const char* config_json, char** report_json,
                             int* all_pass) {
    if (el_status st = need(config_json && report_json && all_pass,
                            "el_run_config_json: null argument");
        st != EL_OK)
        return st;
    return guard([&] {
        const Report rep = run(RunConfig::from_json_text(config_json));
        *report_json = dup_string(rep.to_json_text());
        *all_pass = rep.all_pass() ? 1 : 0;
    });
}

el_status el_run_config_text(const char* config_json, char** report_text,
                             int* all_pass) {
    if (el_status st = need(config_json && report_text && all_pass,
                            "el_run_config_text: null argument");
        st != EL_OK)
        return st;
    return guard([&] {
        const Report rep = run(RunConfig::from_json_text(config_json));
        *report_text = dup_string(rep.text());
        *all_pass = rep.all_pass() ? 1 : 0;
    });
}

} // extern "C"
