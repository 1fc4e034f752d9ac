// shrinkerlab: command-line experiments on entire graphical self-shrinkers.
//
// Subcommands map onto the library modules: shoot/scan (1D rigidity),
// geometry (identity residuals), solve (Newton Dirichlet problem), flow
// (rescaled flow with sphere barriers), stability (weighted inequality),
// volume (growth bounds), verify-all (the full check suite).
//
// Exit codes: 0 all checks pass, 1 check or runtime failure, 2 usage error.

#include "shrinklab/flow.hpp"
#include "shrinklab/geometry.hpp"
#include "shrinklab/grid.hpp"
#include "shrinklab/newton.hpp"
#include "shrinklab/shooting.hpp"
#include "shrinklab/verify.hpp"
#include "shrinklab/weighted.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace shrinklab;

namespace {

struct CheckRow {
    std::string name;
    std::string tag;
    bool pass = false;
    double margin = 0.0;
};

struct Session {
    std::string command;
    fs::path out_dir{"out"};
    json config;  // effective option values, echoed into the summary
    std::vector<CheckRow> checks;

    void add_check(std::string name, std::string tag, bool pass, double margin) {
        checks.push_back({std::move(name), std::move(tag), pass, margin});
    }

    int emit() {
        fs::create_directories(out_dir);
        json summary;
        summary["command"] = command;
        summary["config"] = config;
        json arr = json::array();
        bool all_pass = true;
        for (const auto& c : checks) {
            json row;
            row["name"] = c.name;
            row["tag"] = c.tag;
            row["pass"] = c.pass;
            row["margin"] = c.margin;
            arr.push_back(row);
            if (!c.pass) all_pass = false;
        }
        summary["checks"] = arr;
        std::ofstream os(out_dir / "summary.json");
        if (!os) throw std::runtime_error("cannot write to output directory " + out_dir.string());
        os << summary.dump(2) << "\n";

        for (const auto& c : checks)
            std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  [" << c.tag
                      << "]  margin=" << c.margin << "\n";
        return all_pass ? 0 : 1;
    }
};

// Grid/profile options shared by the field-based subcommands.
struct FieldOptions {
    int dim = 2;
    double half_width = 1.2;
    int nodes = 81;
    std::string profile = "sphere_cap";
    std::vector<double> plane_a{0.0};
    double para_c = 1.0;
    double sin_a = 0.5, sin_b = 0.4, sin_k = 1.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--dim", dim, "base dimension n (1-3)");
        cmd->add_option("--half-width", half_width, "box half width L");
        cmd->add_option("--nodes", nodes, "odd node count per axis");
        cmd->add_option("--profile", profile,
                        "plane | sphere_cap | paraboloid | sinusoid");
        cmd->add_option("--plane-a", plane_a, "plane coefficients");
        cmd->add_option("--para-c", para_c, "paraboloid coefficient");
        cmd->add_option("--sin-a", sin_a, "sinusoid linear slope");
        cmd->add_option("--sin-b", sin_b, "sinusoid amplitude");
        cmd->add_option("--sin-k", sin_k, "sinusoid wavenumber");
    }

    GridSpec spec() const { return GridSpec::make(dim, half_width, nodes); }

    Profile make_profile() const {
        if (profile == "plane") return Profile::plane(plane_a);
        if (profile == "sphere_cap") return Profile::sphere_cap(dim);
        if (profile == "paraboloid") return Profile::paraboloid(para_c);
        if (profile == "sinusoid") return Profile::sinusoid(sin_a, sin_b, sin_k);
        throw std::invalid_argument("unknown profile: " + profile);
    }

    json echo() const {
        json j;
        j["dim"] = dim;
        j["half_width"] = half_width;
        j["nodes"] = nodes;
        j["profile"] = profile;
        return j;
    }
};

void dump_field(const Session& s, const ScalarField& f, const char* name = "field.csv") {
    fs::create_directories(s.out_dir);
    std::ofstream os(s.out_dir / name);
    write_field_csv(os, f);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shrinkerlab: numerical checks for entire graphical self-shrinkers"};
    app.require_subcommand(1);
    app.set_config("--config", "", "config file ([section] headers, key = value lines)");

    Session session;
    app.add_option("--out", session.out_dir, "output directory")->capture_default_str();

    int exit_code = 0;

    // shoot
    auto* shoot = app.add_subcommand("shoot", "integrate the 1D shrinker ODE from (a, b)");
    struct {
        double a = 0.0, b = 0.0, xmax = 8.0, reltol = 1e-9, abstol = 1e-9;
    } sh;
    shoot->add_option("--a", sh.a, "u(0)");
    shoot->add_option("--b", sh.b, "u'(0)");
    shoot->add_option("--xmax", sh.xmax, "integration horizon");
    shoot->add_option("--reltol", sh.reltol, "relative tolerance");
    shoot->add_option("--abstol", sh.abstol, "absolute tolerance");
    shoot->callback([&] {
        session.command = "shoot";
        session.config = {{"a", sh.a}, {"b", sh.b}, {"xmax", sh.xmax}};
        ShootingProblem p;
        p.a = sh.a;
        p.b = sh.b;
        p.x_max = sh.xmax;
        p.rel_tol = sh.reltol;
        p.abs_tol = sh.abstol;
        Trajectory t = integrate(p);
        fs::create_directories(session.out_dir);
        std::ofstream os(session.out_dir / "trajectory.csv");
        write_trajectory_csv(os, t);
        session.add_check("trajectory classified " + to_string(t.classification), "rigidity-1d",
                          true, t.line_deviation.value_or(0.0));
    });

    // scan
    auto* scan_cmd = app.add_subcommand("scan", "classify a grid of 1D initial data");
    struct {
        std::vector<double> a_values{0.0}, b_values{0.0};
        double xmax = 8.0;
    } sc;
    scan_cmd->add_option("--a-values", sc.a_values, "u(0) values");
    scan_cmd->add_option("--b-values", sc.b_values, "u'(0) values");
    scan_cmd->add_option("--xmax", sc.xmax, "integration horizon");
    scan_cmd->callback([&] {
        session.command = "scan";
        session.config = {{"xmax", sc.xmax}};
        auto cells = scan(sc.a_values, sc.b_values, sc.xmax);
        fs::create_directories(session.out_dir);
        std::ofstream os(session.out_dir / "scan.csv");
        write_scan_csv(os, cells);
        bool clean = true;
        for (const auto& c : cells)
            if (!c.error.empty()) clean = false;
        session.add_check("scan completed without integration failures", "rigidity-1d", clean,
                          static_cast<double>(cells.size()));
    });

    // geometry
    auto* geom_cmd = app.add_subcommand("geometry", "identity residual report for a profile");
    FieldOptions geom_opts;
    geom_opts.attach(geom_cmd);
    int geom_margin = 10;
    double residual_tol = 5e-3;
    geom_cmd->add_option("--margin", geom_margin, "interior mask margin in nodes");
    geom_cmd->add_option("--residual-tol", residual_tol, "sup residual threshold");
    geom_cmd->callback([&] {
        session.command = "geometry";
        session.config = geom_opts.echo();
        session.config["margin"] = geom_margin;
        const GridSpec spec = geom_opts.spec();
        const ScalarField u = discretize(geom_opts.make_profile(), spec);
        dump_field(session, u);
        IdentityReport rep = identity_report(u, geom_margin);
        json j;
        j["h"] = rep.h;
        j["margin_nodes"] = rep.margin_nodes;
        j["shrinker_sup"] = rep.shrinker.sup;
        j["shrinker_weighted_l2"] = rep.shrinker.weighted_l2;
        j["lf_minus_half_f_weighted_l2"] = rep.lf_minus_half_f.weighted_l2;
        j["lh_minus_h_weighted_l2"] = rep.lh_minus_h.weighted_l2;
        j["log_density_weighted_l2"] = rep.log_density.weighted_l2;
        session.config["identity_report"] = j;
        session.add_check("shrinker residual below threshold", "shrinker-equation",
                          rep.shrinker.sup <= residual_tol, residual_tol - rep.shrinker.sup);
    });

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "Newton solve of the Dirichlet problem");
    FieldOptions solve_opts;
    solve_opts.attach(solve_cmd);
    double solve_tol = 1e-10;
    int solve_max_iter = 50;
    solve_cmd->add_option("--tol", solve_tol, "residual sup-norm target");
    solve_cmd->add_option("--max-iter", solve_max_iter, "Newton iteration cap");
    solve_cmd->callback([&] {
        session.command = "solve";
        session.config = solve_opts.echo();
        const GridSpec spec = solve_opts.spec();
        NewtonConfig cfg;
        cfg.tol = solve_tol;
        cfg.max_iter = solve_max_iter;
        SolveResult sr = solve(DirichletProblem::from_profile(spec, solve_opts.make_profile()), cfg);
        dump_field(session, sr.u);
        json j;
        j["iterations"] = sr.report.iterations;
        j["residual"] = sr.report.final_residual;
        j["converged"] = sr.report.converged;
        fs::create_directories(session.out_dir);
        std::ofstream os(session.out_dir / "solve_report.json");
        os << j.dump(2) << "\n";
        session.config["solve_report"] = j;
        session.add_check("Newton converged", "shrinker-equation", sr.report.converged,
                          solve_tol - sr.report.final_residual);
    });

    // flow
    auto* flow_cmd = app.add_subcommand("flow", "rescaled flow with shrinking-sphere barriers");
    FieldOptions flow_opts;
    flow_opts.dim = 1;
    flow_opts.half_width = 5.0;
    flow_opts.nodes = 201;
    flow_opts.profile = "sinusoid";
    flow_opts.attach(flow_cmd);
    struct {
        double R = 2.0, rho = -1.0, dt = -1.0, t_end = -1.0;
    } fl;
    flow_cmd->add_option("--R", fl.R, "scale parameter (R > 1)");
    flow_cmd->add_option("--rho", fl.rho, "barrier parameter (rho^2 > 2n+1)");
    flow_cmd->add_option("--dt", fl.dt, "time step (<= h^2/(2n))");
    flow_cmd->add_option("--t-end", fl.t_end, "final time (default R^2)");
    flow_cmd->callback([&] {
        session.command = "flow";
        session.config = flow_opts.echo();
        session.config["R"] = fl.R;
        const GridSpec spec = flow_opts.spec();
        FlowConfig cfg;
        if (fl.dt > 0.0) {
            // Explicit dt is taken as given; an unstable choice surfaces as an
            // instability record at runtime rather than a usage error.
            cfg.spec = spec;
            cfg.R = fl.R;
            cfg.rho = fl.rho > 0.0 ? fl.rho : 2.0 * std::sqrt(static_cast<double>(spec.dim));
            cfg.dt = fl.dt;
            cfg.t_end = fl.t_end > 0.0 ? fl.t_end : fl.R * fl.R;
            if (!(cfg.R > 1.0)) throw std::invalid_argument("flow: R must exceed 1");
            if (!(cfg.rho * cfg.rho > 2.0 * spec.dim + 1.0))
                throw std::invalid_argument("flow: barrier parameter must satisfy rho^2 > 2n + 1");
        } else {
            cfg = FlowConfig::make(spec, fl.R, fl.rho, fl.dt, fl.t_end);
        }
        session.config["rho"] = cfg.rho;
        session.config["dt"] = cfg.dt;
        FlowLog log = run(cfg, discretize(flow_opts.make_profile(), spec));
        fs::create_directories(session.out_dir);
        std::ofstream os(session.out_dir / "flowlog.csv");
        write_flow_log_csv(os, log);
        dump_field(session, log.final_state.w);
        double min_clear = 1e300;
        for (const auto& r : log.rows)
            min_clear = std::min(min_clear, std::min(r.clear_plus, r.clear_minus));
        session.add_check("barrier clearance positive throughout", "flow-barriers",
                          log.clearance_ok, min_clear);
    });

    // stability
    auto* stab_cmd = app.add_subcommand("stability", "weighted stability inequality sides");
    FieldOptions stab_opts;
    stab_opts.attach(stab_cmd);
    struct {
        double r0 = 0.4, r1 = 0.9;
        std::string space = "base";
        bool smooth = true;
    } st;
    stab_cmd->add_option("--r0", st.r0, "cutoff inner radius");
    stab_cmd->add_option("--r1", st.r1, "cutoff outer radius");
    stab_cmd->add_option("--space", st.space, "base | ambient");
    stab_cmd->add_flag("--linear,!--smooth", [&](std::int64_t) { st.smooth = false; },
                       "linear clamp instead of smoothstep");
    stab_cmd->callback([&] {
        session.command = "stability";
        session.config = stab_opts.echo();
        session.config["r0"] = st.r0;
        session.config["r1"] = st.r1;
        const auto space =
            st.space == "ambient" ? Cutoff::Space::Ambient : Cutoff::Space::Base;
        Cutoff eta = st.smooth ? Cutoff::smoothstep_bump(st.r0, st.r1, space)
                               : Cutoff::linear_clamp(st.r0, space);
        GraphContext ctx = make_context(discretize(stab_opts.make_profile(), stab_opts.spec()));
        WeightedReport rep = stability_sides(ctx, eta);
        json j;
        j["lhs"] = rep.lhs;
        j["rhs"] = rep.rhs;
        j["margin"] = rep.margin;
        j["h"] = rep.h;
        j["pass"] = rep.margin >= -1e-9;
        fs::create_directories(session.out_dir);
        std::ofstream os(session.out_dir / "report.json");
        os << j.dump(2) << "\n";
        session.add_check("stability inequality holds", "stability-inequality",
                          rep.margin >= -1e-9, rep.margin);
    });

    // volume
    auto* vol_cmd = app.add_subcommand("volume", "volume and linear-growth bounds");
    FieldOptions vol_opts;
    vol_opts.half_width = 4.2;
    vol_opts.nodes = 241;
    vol_opts.profile = "plane";
    vol_opts.attach(vol_cmd);
    std::vector<double> vol_radii{1.5, 2.0, 4.0};
    vol_cmd->add_option("--R", vol_radii, "ball radii (each > 1)");
    vol_cmd->callback([&] {
        session.command = "volume";
        session.config = vol_opts.echo();
        GraphContext ctx = make_context(discretize(vol_opts.make_profile(), vol_opts.spec()));
        json reports = json::array();
        bool all = true;
        double min_margin = 1e300;
        for (double R : vol_radii) {
            VolumeReport rep = volume_growth_check(ctx, R);
            json j;
            j["R"] = R;
            j["volume"] = rep.volume;
            j["bound"] = rep.bound;
            j["m_r"] = rep.m_r;
            j["omega_n"] = rep.omega_n;
            j["pass"] = rep.pass;
            reports.push_back(j);
            all = all && rep.pass;
            min_margin = std::min(min_margin, rep.bound - rep.volume);
        }
        LinearGrowthReport growth = linear_growth_check(ctx, vol_radii);
        fs::create_directories(session.out_dir);
        std::ofstream os(session.out_dir / "volume.json");
        os << reports.dump(2) << "\n";
        session.add_check("volume bound holds", "volume-growth", all, min_margin);
        double growth_margin = 1e300;
        for (const auto& row : growth.rows) growth_margin = std::min(growth_margin, row.margin);
        session.add_check("linear growth bound holds", "linear-growth", growth.pass,
                          growth_margin);
    });

    // verify-all
    auto* verify_cmd = app.add_subcommand("verify-all", "run the full verification suite");
    verify_cmd->callback([&] {
        session.command = "verify-all";
        session.config = json::object();
        for (const CheckResult& c : run_all_checks())
            session.add_check(c.name + " -- " + c.detail, c.tag, c.pass, c.margin);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // help/version exit 0, usage errors exit 2
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        json err;
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        try {
            fs::create_directories(session.out_dir);
            std::ofstream os(session.out_dir / "summary.json");
            os << err.dump(2) << "\n";
        } catch (...) {
        }
        return 1;
    }

    try {
        exit_code = session.emit();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
