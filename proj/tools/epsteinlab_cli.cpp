// Command-line front end. Builds a JSON run configuration from flags and
// hands it to the shared library through the C interface; prints the report
// and exits 0 (all checks passed), 1 (a check failed), or 2 (error).

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "epsteinlab.h"

namespace {

struct CommonFlags {
    std::string scene;
    std::string descriptors;
    int grid = 8;
    unsigned long long seed = 1;
    std::vector<std::string> tol;
    std::string out;
    std::vector<double> times;
    bool json_report = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--scene", f.scene, "Scene JSON file");
    cmd->add_option("--descriptors", f.descriptors, "Descriptor JSON file");
    cmd->add_option("--grid", f.grid, "Sample count per run")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", f.seed, "Seed for reproducible sampling");
    cmd->add_option("--tol", f.tol,
                    "Tolerance override, name=value (repeatable)");
    cmd->add_option("--out", f.out, "CSV output file");
    cmd->add_option("--times", f.times, "Flow times (repeatable)");
    cmd->add_flag("--json", f.json_report, "Emit the report as JSON");
}

int fail_usage(const std::string& msg) {
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Numerical laboratory for Epstein surfaces, Schwarzian shape "
        "operators, projective metrics, and W-volume bounds"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* cmd;
        CommonFlags flags;
        std::vector<std::string> points;      // dome probes "re,im"
        int chi = -2;                          // sweep
        std::vector<double> lrange{0.0, 4.0, 9.0};
        std::vector<double> prange{0.0, 1.5, 7.0};
    };

    Sub verify, sample, dome, bounds, sweep;
    verify.cmd = app.add_subcommand(
        "verify-identities", "Check the flow-frame identities on a scene");
    sample.cmd = app.add_subcommand(
        "epstein-sample", "Tabulate flowed surface points and envelope residuals");
    dome.cmd = app.add_subcommand(
        "dome", "Probe hemispheres and dihedral angle of a disk-union scene");
    bounds.cmd = app.add_subcommand(
        "bounds", "Evaluate the W-volume bound chain on descriptors");
    sweep.cmd = app.add_subcommand(
        "sweep", "Grid the bound surfaces over (L, phi_inf)");

    for (Sub* s : {&verify, &sample, &dome, &bounds, &sweep})
        add_common(s->cmd, s->flags);
    dome.cmd->add_option("--point", dome.points,
                         "Probe point re,im (repeatable; default probes if none)");
    sweep.cmd->add_option("--chi", sweep.chi, "Euler characteristic (even, <= -2)");
    sweep.cmd->add_option("--lrange", sweep.lrange,
                          "Bending-length range: lo hi count")
        ->expected(3)
        ->delimiter(',');
    sweep.cmd->add_option("--prange", sweep.prange,
                          "Sup-norm range: lo hi count")
        ->expected(3)
        ->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    Sub* active = nullptr;
    std::string command;
    if (verify.cmd->parsed()) { active = &verify; command = "verify-identities"; }
    if (sample.cmd->parsed()) { active = &sample; command = "epstein-sample"; }
    if (dome.cmd->parsed()) { active = &dome; command = "dome"; }
    if (bounds.cmd->parsed()) { active = &bounds; command = "bounds"; }
    if (sweep.cmd->parsed()) { active = &sweep; command = "sweep"; }
    if (!active)
        return fail_usage("no subcommand selected");

    nlohmann::json cfg;
    cfg["command"] = command;
    const CommonFlags& f = active->flags;
    if (!f.scene.empty())
        cfg["scene"] = f.scene;
    if (!f.descriptors.empty())
        cfg["descriptors"] = f.descriptors;
    cfg["grid"] = f.grid;
    cfg["seed"] = f.seed;
    if (!f.times.empty())
        cfg["times"] = f.times;
    if (!f.out.empty())
        cfg["out"] = f.out;
    if (!f.tol.empty()) {
        nlohmann::json tol = nlohmann::json::object();
        for (const std::string& arg : f.tol) {
            const auto eq = arg.find('=');
            if (eq == std::string::npos || eq == 0)
                return fail_usage("--tol expects name=value, got '" + arg + "'");
            try {
                tol[arg.substr(0, eq)] = std::stod(arg.substr(eq + 1));
            } catch (const std::exception&) {
                return fail_usage("--tol value is not a number in '" + arg + "'");
            }
        }
        cfg["tol"] = tol;
    }
    if (active == &dome && !active->points.empty()) {
        nlohmann::json pts = nlohmann::json::array();
        for (const std::string& arg : active->points) {
            const auto comma = arg.find(',');
            if (comma == std::string::npos)
                return fail_usage("--point expects re,im, got '" + arg + "'");
            try {
                pts.push_back({std::stod(arg.substr(0, comma)),
                               std::stod(arg.substr(comma + 1))});
            } catch (const std::exception&) {
                return fail_usage("--point is not numeric in '" + arg + "'");
            }
        }
        cfg["points"] = pts;
    }
    if (active == &sweep) {
        cfg["chi"] = active->chi;
        cfg["lrange"] = active->lrange;
        cfg["prange"] = active->prange;
    }

    char* report = nullptr;
    int all_pass = 0;
    const std::string cfg_text = cfg.dump();
    const el_status st = f.json_report
        ? el_run_config_json(cfg_text.c_str(), &report, &all_pass)
        : el_run_config_text(cfg_text.c_str(), &report, &all_pass);
    if (st != EL_OK) {
        std::fprintf(stderr, "error [%s]: %s\n", el_status_name(st),
                     el_last_error());
        return 2;
    }
    std::fputs(report, stdout);
    if (!f.json_report)
        std::fputs("", stdout);
    else
        std::fputs("\n", stdout);
    el_string_free(report);
    return all_pass ? 0 : 1;
}
