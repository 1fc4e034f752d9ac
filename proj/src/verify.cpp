#include "shrinklab/verify.hpp"

#include "shrinklab/flow.hpp"
#include "shrinklab/geometry.hpp"
#include "shrinklab/grid.hpp"
#include "shrinklab/newton.hpp"
#include "shrinklab/shooting.hpp"
#include "shrinklab/weighted.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

namespace shrinklab {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), format, args...);
    return std::string(buf);
}

double masked_sup(const ScalarField& f, int margin) {
    const auto mask = interior_mask(f.spec, margin);
    double sup = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (mask[i]) sup = std::max(sup, std::abs(f.values[i]));
    return sup;
}

// Checks 1-3 share the sphere-cap geometry at two resolutions.
void sphere_identity_checks(std::vector<CheckResult>& out) {
    const auto start = Clock::now();
    const Profile cap = Profile::sphere_cap(2);

    struct Level {
        double sup_s = 0.0, sup_h_err = 0.0, sup_a2_err = 0.0;
        IdentityReport report;
    };
    auto compute = [&](int m, int margin) {
        Level lv;
        const GridSpec spec = GridSpec::make(2, 1.2, m);
        const ScalarField u = discretize(cap, spec);
        GraphContext ctx = make_context(u);
        ScalarField s = shrinker_residual(ctx.u, ctx.geom);
        lv.sup_s = masked_sup(s, margin);
        const auto mask = interior_mask(spec, margin);
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (!mask[i]) continue;
            lv.sup_h_err = std::max(lv.sup_h_err, std::abs(ctx.geom.mean_curv[i] - 1.0));
            lv.sup_a2_err = std::max(lv.sup_a2_err, std::abs(ctx.geom.a_norm_sq[i] - 0.5));
        }
        lv.report = identity_report(u, margin);
        return lv;
    };
    const Level coarse = compute(161, 10);
    const double t_coarse = elapsed(start);
    const Level fine = compute(321, 20);

    {
        CheckResult c;
        c.id = 1;
        c.name = "shrinker-equation residual on the sphere cap";
        c.tag = "shrinker-equation";
        const double ratio = coarse.sup_s / fine.sup_s;
        c.pass = coarse.sup_s <= 5e-3 && ratio >= 3.4 && ratio <= 4.6 && t_coarse < 5.0;
        c.margin = 5e-3 - coarse.sup_s;
        c.detail = fmt("sup|S|=%.3e (<=5e-3), refinement ratio=%.2f (in [3.4,4.6]), %.2fs",
                       coarse.sup_s, ratio, t_coarse);
        c.seconds = elapsed(start);
        out.push_back(c);
    }
    {
        CheckResult c;
        c.id = 2;
        c.name = "round-sphere curvature values";
        c.tag = "mean-curvature";
        c.pass = coarse.sup_h_err <= 0.01 && coarse.sup_a2_err <= 0.01;
        c.margin = std::min(0.01 - coarse.sup_h_err, 0.01 - coarse.sup_a2_err);
        c.detail = fmt("sup|H-1|=%.3e (<=1e-2), sup||A|^2-0.5|=%.3e (<=1e-2)", coarse.sup_h_err,
                       coarse.sup_a2_err);
        c.seconds = elapsed(start);
        out.push_back(c);
    }
    {
        CheckResult c;
        c.id = 3;
        c.name = "stability operator identities Lf=f/2, LH=H and log-density";
        c.tag = "stability-operator";
        const double lf = coarse.report.lf_minus_half_f.weighted_l2;
        const double lh = coarse.report.lh_minus_h.weighted_l2;
        const double e2 = coarse.report.log_density.weighted_l2;
        const double r_lf = lf / fine.report.lf_minus_half_f.weighted_l2;
        const double r_lh = lh / fine.report.lh_minus_h.weighted_l2;
        const double r_e2 = e2 / fine.report.log_density.weighted_l2;
        c.pass = lf <= 5e-2 && lh <= 5e-2 && e2 <= 5e-2 && r_lf >= 3.0 && r_lh >= 3.0 &&
                 r_e2 >= 3.0;
        c.margin = 5e-2 - std::max({lf, lh, e2});
        c.detail = fmt("|Lf-f/2|=%.3e |LH-H|=%.3e |logdens|=%.3e (<=5e-2); ratios %.2f %.2f %.2f (>=3)",
                       lf, lh, e2, r_lf, r_lh, r_e2);
        c.seconds = elapsed(start);
        out.push_back(c);
    }
}

void shooting_check(std::vector<CheckResult>& out) {
    const auto start = Clock::now();
    CheckResult c;
    c.id = 4;
    c.name = "1D rigidity: lines persist, off-line data loses graphicality";
    c.tag = "rigidity-1d";
    bool pass = true;
    std::string note;

    for (double b : {-2.0, -1.0, 0.0, 0.5, 2.0}) {
        ShootingProblem p;
        p.a = 0.0;
        p.b = b;
        p.x_max = 8.0;
        Trajectory t = integrate(p);
        if (t.classification != TrajectoryClass::Line || !t.line_deviation ||
            *t.line_deviation >= 1e-7) {
            pass = false;
            note += fmt(" b=%.1f not LINE;", b);
        }
    }
    double worst_shift = 0.0;
    for (double a : {-1.0, -0.1, 0.1, 1.0}) {
        ShootingProblem p;
        p.a = a;
        p.b = 0.0;
        p.x_max = 20.0;
        Trajectory t = integrate(p);
        if (t.classification != TrajectoryClass::GradientBlowup || !t.blowup_x) {
            pass = false;
            note += fmt(" a=%.1f not BLOWUP;", a);
            continue;
        }
        ShootingProblem tight = p;
        tight.rel_tol /= 10.0;
        tight.abs_tol /= 10.0;
        Trajectory t2 = integrate(tight);
        const double shift = std::abs(*t.blowup_x - *t2.blowup_x) / std::abs(*t2.blowup_x);
        worst_shift = std::max(worst_shift, shift);
        if (shift >= 0.01) pass = false;
    }
    const double secs = elapsed(start);
    if (secs >= 2.0) pass = false;
    c.pass = pass;
    c.margin = 0.01 - worst_shift;
    c.detail = fmt("blowup_x tolerance-shift=%.2e (<1e-2), %.2fs%s", worst_shift, secs,
                   note.c_str());
    c.seconds = secs;
    out.push_back(c);
}

void stability_inequality_check(std::vector<CheckResult>& out) {
    const auto start = Clock::now();
    CheckResult c;
    c.id = 5;
    c.name = "weighted stability inequality over random bump cutoffs";
    c.tag = "stability-inequality";

    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> inner(0.2, 0.5);
    std::uniform_real_distribution<double> width(0.25, 0.6);
    std::vector<Cutoff> bumps;
    for (int i = 0; i < 20; ++i) {
        const double r0 = inner(rng);
        const double r1 = std::min(r0 + width(rng), 1.15);
        bumps.push_back(Cutoff::smoothstep_bump(r0, r1, Cutoff::Space::Base));
    }

    bool pass = true;
    double worst_margin = 1e300, worst_drift = 0.0;
    for (int which = 0; which < 2; ++which) {
        auto field = [&](int m) {
            const GridSpec spec = GridSpec::make(2, 1.2, m);
            return which == 0 ? discretize(Profile::plane({0.3, 0.1}), spec)
                              : discretize(Profile::sphere_cap(2), spec);
        };
        GraphContext coarse = make_context(field(81));
        GraphContext fine = make_context(field(161));
        for (const Cutoff& eta : bumps) {
            WeightedReport rc = stability_sides(coarse, eta);
            WeightedReport rf = stability_sides(fine, eta);
            worst_margin = std::min(worst_margin, std::min(rc.margin, rf.margin));
            if (rc.margin < -1e-9 || rf.margin < -1e-9) pass = false;
            const double drift = std::abs(rc.margin - rf.margin) / std::abs(rf.margin);
            worst_drift = std::max(worst_drift, drift);
            if (drift >= 0.05) pass = false;
        }
    }
    c.pass = pass;
    c.margin = worst_margin;
    c.detail = fmt("min margin=%.3e (>=-1e-9), max resolution drift=%.2f%% (<5%%)", worst_margin,
                   100.0 * worst_drift);
    c.seconds = elapsed(start);
    out.push_back(c);
}

void cutoff_decay_check(std::vector<CheckResult>& out) {
    const auto start = Clock::now();
    CheckResult c;
    c.id = 6;
    c.name = "cutoff gradient energy decays to zero";
    c.tag = "cutoff-decay";

    const GridSpec spec = GridSpec::make(2, 9.0, 241);
    CutoffFamily family;
    for (int j = 1; j <= 8; ++j) family.radii.push_back(static_cast<double>(j));

    GraphContext tilted = make_context(discretize(Profile::plane({0.3, 0.1}), spec));
    const auto energies = cutoff_energy(tilted, family);
    bool pass = true;
    for (std::size_t j = 3; j < energies.size(); ++j)
        if (!(energies[j].energy < energies[j - 1].energy)) pass = false;
    const double tail_ratio = energies[7].energy / energies[0].energy;
    if (!(tail_ratio < 1e-5)) pass = false;

    GraphContext flat = make_context(discretize(Profile::plane({0.0, 0.0}), spec));
    const auto flat_energies = cutoff_energy(flat, family);
    double worst_oracle = 0.0;
    for (const auto& e : flat_energies) {
        const double oracle =
            4.0 * M_PI * (std::exp(-e.radius * e.radius / 4.0) -
                          std::exp(-(e.radius + 1.0) * (e.radius + 1.0) / 4.0));
        worst_oracle = std::max(worst_oracle, std::abs(e.energy - oracle) / oracle);
    }
    if (worst_oracle >= 0.02) pass = false;

    c.pass = pass;
    c.margin = 1e-5 - tail_ratio;
    c.detail = fmt("value_8/value_1=%.2e (<1e-5), flat-graph oracle error=%.2f%% (<2%%)",
                   tail_ratio, 100.0 * worst_oracle);
    c.seconds = elapsed(start);
    out.push_back(c);
}

void volume_growth_check(std::vector<CheckResult>& out) {
    const auto start = Clock::now();
    CheckResult c;
    c.id = 7;
    c.name = "volume growth bounds, with a non-shrinker teeth test";
    c.tag = "volume-growth";

    bool pass = true;
    double worst_vol_err = 0.0, min_margin = 1e300;
    const GridSpec spec = GridSpec::make(2, 4.2, 241);
    for (int which = 0; which < 2; ++which) {
        GraphContext ctx = make_context(which == 0
                                            ? discretize(Profile::plane({0.0, 0.0}), spec)
                                            : discretize(Profile::plane({1.0, 0.0}), spec));
        for (double R : {1.5, 2.0, 4.0}) {
            const double vol = graph_volume(ctx, R);
            const double exact = M_PI * R * R;  // plane through the origin cuts a disk
            worst_vol_err = std::max(worst_vol_err, std::abs(vol - exact) / exact);
            if (std::abs(vol - exact) / exact >= 0.01) pass = false;
            const VolumeReport v2 = volume_growth_check(ctx, R);
            if (!v2.pass || v2.bound - v2.volume <= 0.0) pass = false;
            min_margin = std::min(min_margin, v2.bound - v2.volume);
        }
        const LinearGrowthReport v3 = linear_growth_check(ctx, {1.5, 2.0, 4.0});
        for (const auto& row : v3.rows) {
            if (!row.pass || row.margin <= 0.0) pass = false;
            min_margin = std::min(min_margin, row.margin);
        }
    }
    // Teeth: a paraboloid eventually violates linear growth.
    {
        const GridSpec big = GridSpec::make(2, 25.0, 201);
        GraphContext ctx = make_context(
            discretize(Profile::tabulated([](std::span<const double> x) { return x[0] * x[0]; },
                                          "x1_squared"),
                       big));
        const LinearGrowthReport v3 = linear_growth_check(ctx, {22.0});
        if (v3.rows[0].pass) pass = false;
    }
    c.pass = pass;
    c.margin = min_margin;
    c.detail = fmt("max volume error=%.2f%% (<1%%), min bound margin=%.3f, teeth test fails as expected",
                   100.0 * worst_vol_err, min_margin);
    c.seconds = elapsed(start);
    out.push_back(c);
}

void flow_barrier_check(std::vector<CheckResult>& out) {
    const auto start = Clock::now();
    CheckResult c;
    c.id = 8;
    c.name = "flow stays clear of shrinking-sphere barriers";
    c.tag = "flow-barriers";

    const double R = 2.0, rho = 2.0;
    const Profile w0 = Profile::sinusoid(0.5, 0.4, 1.0);
    auto run_box = [&](double half_width, int m) {
        const GridSpec spec = GridSpec::make(1, half_width, m);
        FlowConfig cfg = FlowConfig::make(spec, R, rho);
        return run(cfg, discretize(w0, spec));
    };
    bool pass = true;
    std::string note;
    double min_clear = 1e300, rel_change = 0.0;
    try {
        // The run goes to t_end = R^2, long enough for frozen-boundary error
        // to diffuse ~2 sqrt(t_end) inward; the box must keep the comparison
        // window |x| <= R well clear of that, hence 2.5 rho R rather than the
        // tighter default.
        FlowLog base = run_box(2.5 * rho * R, 401);
        FlowLog wide = run_box(5.0 * rho * R, 801);
        for (const auto& row : base.rows)
            min_clear = std::min(min_clear, std::min(row.clear_plus, row.clear_minus));
        if (!base.clearance_ok || min_clear <= 0.0) pass = false;

        // Same spacing, so the narrow-box nodes are a subset of the wide box.
        const GridSpec& bs = base.final_state.w.spec;
        const GridSpec& ws = wide.final_state.w.spec;
        double sup_diff = 0.0, sup_val = 0.0;
        for (int k = 0; k < bs.nodes_per_axis; ++k) {
            const double x = bs.coord(k);
            if (std::abs(x) > R) continue;
            const int kw = static_cast<int>(std::lround((x + ws.half_width) / ws.spacing));
            const double a = base.final_state.w.at(Index{k, 0, 0});
            const double b = wide.final_state.w.at(Index{kw, 0, 0});
            sup_diff = std::max(sup_diff, std::abs(a - b));
            sup_val = std::max(sup_val, std::abs(b));
        }
        rel_change = sup_diff / sup_val;
        if (rel_change >= 0.01) pass = false;
    } catch (const std::exception& e) {
        pass = false;
        note = e.what();
    }
    const double secs = elapsed(start);
    if (secs >= 30.0) pass = false;
    c.pass = pass;
    c.margin = min_clear;
    c.detail = fmt("min clearance=%.3f (>0), box-doubling change=%.3f%% (<1%%), %.1fs %s",
                   min_clear, 100.0 * rel_change, secs, note.c_str());
    c.seconds = secs;
    out.push_back(c);
}

void self_similar_check(std::vector<CheckResult>& out) {
    const auto start = Clock::now();
    CheckResult c;
    c.id = 9;
    c.name = "self-similar profile exactness and flow-equation residual";
    c.tag = "self-similar-profile";

    bool pass = true;
    double worst_linear = 0.0;
    {
        const GridSpec spec = GridSpec::make(2, 3.0, 61);
        const Profile plane = Profile::plane({0.7, -0.3});
        const ScalarField exact = discretize(plane, spec);
        for (double t : {0.0, 1.0, 2.5, 4.0}) {
            const ScalarField w = self_similar_profile(plane, 2.0, t, spec);
            for (std::size_t i = 0; i < w.values.size(); ++i)
                worst_linear = std::max(worst_linear,
                                        std::abs(w.values[i] - exact.values[i]));
        }
        if (worst_linear > 1e-12) pass = false;
    }
    double sup_res = 0.0;
    {
        const GridSpec spec = GridSpec::make(2, 1.2, 161);
        const ScalarField res = eq4_residual(Profile::sphere_cap(2), 2.0, 1.0, spec);
        sup_res = masked_sup(res, 10);
        if (sup_res > 5e-3) pass = false;
    }
    c.pass = pass;
    c.margin = 5e-3 - sup_res;
    c.detail = fmt("linear slices static to %.1e (<=1e-12), sphere-cap flow residual=%.3e (<=5e-3)",
                   worst_linear, sup_res);
    c.seconds = elapsed(start);
    out.push_back(c);
}

void newton_check(std::vector<CheckResult>& out) {
    const auto start = Clock::now();
    CheckResult c;
    c.id = 10;
    c.name = "Newton solver reproduces analytic solutions and cross-validates";
    c.tag = "newton-cross-check";

    bool pass = true;
    std::string note;
    double linear_err = 0.0, cap_err = 0.0, worst_ratio = 1e300;
    try {
        {
            const GridSpec spec = GridSpec::make(2, 1.2, 41);
            const Profile data = Profile::plane({0.5, -0.25});
            SolveResult sr = solve(DirichletProblem::from_profile(spec, data));
            const ScalarField exact = discretize(data, spec);
            for (std::size_t i = 0; i < sr.u.values.size(); ++i)
                linear_err = std::max(linear_err, std::abs(sr.u.values[i] - exact.values[i]));
            if (linear_err > 1e-6) pass = false;
        }
        IdentityReport reports[2];
        const int ms[2] = {41, 81};
        for (int lvl = 0; lvl < 2; ++lvl) {
            const GridSpec spec = GridSpec::make(2, 1.0, ms[lvl]);
            const Profile cap = Profile::sphere_cap(2);
            SolveResult sr = solve(DirichletProblem::from_profile(spec, cap));
            const ScalarField exact = discretize(cap, spec);
            double err = 0.0;
            for (std::size_t i = 0; i < sr.u.values.size(); ++i)
                err = std::max(err, std::abs(sr.u.values[i] - exact.values[i]));
            if (lvl == 1) {
                cap_err = err;
                if (cap_err > 5e-3) pass = false;
            }
            reports[lvl] = cross_validate(sr.u, 4 * (lvl + 1));
        }
        const double ratios[3] = {
            reports[0].lf_minus_half_f.weighted_l2 / reports[1].lf_minus_half_f.weighted_l2,
            reports[0].lh_minus_h.weighted_l2 / reports[1].lh_minus_h.weighted_l2,
            reports[0].log_density.weighted_l2 / reports[1].log_density.weighted_l2};
        for (double r : ratios) {
            worst_ratio = std::min(worst_ratio, r);
            if (r < 3.0) pass = false;
        }
    } catch (const std::exception& e) {
        pass = false;
        note = e.what();
    }
    c.pass = pass;
    c.margin = 5e-3 - cap_err;
    c.detail = fmt("linear err=%.2e (<=1e-6), cap err=%.2e (<=5e-3), min identity ratio=%.2f (>=3) %s",
                   linear_err, cap_err, worst_ratio, note.c_str());
    c.seconds = elapsed(start);
    out.push_back(c);
}

void flatness_check(std::vector<CheckResult>& out) {
    const auto start = Clock::now();
    CheckResult c;
    c.id = 11;
    c.name = "flatness certificate: solved linear problems flat, sphere cap not";
    c.tag = "flatness";

    bool pass = true;
    std::string note;
    double worst_mass = 0.0;
    try {
        for (double L : {1.0, 2.0, 4.0}) {
            const GridSpec spec = GridSpec::make(2, L, 41);
            SolveResult sr =
                solve(DirichletProblem::from_profile(spec, Profile::plane({0.3, -0.2})));
            CutoffFamily family;
            family.radii = {L - 0.5};
            FlatnessReport rep = flatness_certificate(make_context(std::move(sr.u)), family);
            worst_mass = std::max(worst_mass, rep.a2_mass);
            if (!rep.flat || rep.a2_mass >= 1e-6) pass = false;
        }
        {
            const GridSpec spec = GridSpec::make(2, 1.2, 81);
            GraphContext ctx = make_context(discretize(Profile::sphere_cap(2), spec));
            CutoffFamily family;
            family.radii = {2.0};
            FlatnessReport rep = flatness_certificate(ctx, family);
            if (rep.flat) pass = false;
        }
    } catch (const std::exception& e) {
        pass = false;
        note = e.what();
    }
    c.pass = pass;
    c.margin = 1e-6 - worst_mass;
    c.detail = fmt("max weighted |A|^2 mass=%.2e (<1e-6); sphere cap rejected %s", worst_mass,
                   note.c_str());
    c.seconds = elapsed(start);
    out.push_back(c);
}

}  // namespace

std::vector<CheckResult> run_all_checks() {
    std::vector<CheckResult> out;
    sphere_identity_checks(out);
    shooting_check(out);
    stability_inequality_check(out);
    cutoff_decay_check(out);
    volume_growth_check(out);
    flow_barrier_check(out);
    self_similar_check(out);
    newton_check(out);
    flatness_check(out);
    std::sort(out.begin(), out.end(),
              [](const CheckResult& a, const CheckResult& b) { return a.id < b.id; });
    return out;
}

}  // namespace shrinklab
