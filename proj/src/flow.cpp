#include "shrinklab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace shrinklab {

FlowConfig FlowConfig::make(GridSpec spec, double R, double rho, double dt, double t_end) {
    FlowConfig cfg;
    cfg.spec = spec;
    cfg.R = R;
    const int n = spec.dim;
    cfg.rho = rho > 0.0 ? rho : 2.0 * std::sqrt(static_cast<double>(n));
    const double h = spec.spacing;
    cfg.dt = dt > 0.0 ? dt : h * h / (4.0 * n);
    cfg.t_end = t_end > 0.0 ? t_end : R * R;
    cfg.validate();
    return cfg;
}

void FlowConfig::validate() const {
    const int n = spec.dim;
    if (!(R > 1.0)) throw std::invalid_argument("flow: R must exceed 1");
    if (!(rho * rho > 2.0 * n + 1.0))
        throw std::invalid_argument("flow: barrier parameter must satisfy rho^2 > 2n + 1");
    const double h = spec.spacing;
    if (!(dt > 0.0) || dt > h * h / (2.0 * n) + 1e-15)
        throw std::invalid_argument("flow: dt must lie in (0, h^2/(2n)]");
    if (!(t_end > 0.0)) throw std::invalid_argument("flow: t_end must be positive");
}

BarrierBall make_barrier(const ScalarField& w0, double rho, double R, int sign) {
    const GridSpec& spec = w0.spec;
    const double ball = rho * R;
    double extreme = sign > 0 ? -1e300 : 1e300;
    bool found = false;
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        double r2 = 0.0;
        for (int d = 0; d < spec.dim; ++d) {
            const double xi = spec.coord(idx[d]);
            r2 += xi * xi;
        }
        if (r2 > ball * ball) return;
        found = true;
        if (sign > 0)
            extreme = std::max(extreme, w0.values[node]);
        else
            extreme = std::min(extreme, w0.values[node]);
    });
    if (!found) throw std::invalid_argument("make_barrier: grid does not cover the base ball");
    BarrierBall b;
    b.sign = sign;
    b.center_height = sign > 0 ? extreme + ball + 1.0 : extreme - ball - 1.0;
    b.initial_radius = ball;
    return b;
}

namespace {

double scale_factor(double R, double t) {
    if (t < 0.0 || t > R * R)
        throw std::invalid_argument("self_similar_profile: t outside [0, R^2]");
    return std::sqrt(R * R + 1.0 - t);
}

}  // namespace

ScalarField self_similar_profile(const Profile& u, double R, double t, const GridSpec& spec) {
    const double s = scale_factor(R, t);
    ScalarField out = ScalarField::zeros(spec);
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        double x[3];
        for (int d = 0; d < spec.dim; ++d) x[d] = spec.coord(idx[d]) / s;
        out.values[node] = s * u(std::span<const double>(x, static_cast<std::size_t>(spec.dim)));
    });
    return out;
}

namespace {

// Multilinear interpolation of a field at an off-node point inside its box.
double interpolate(const ScalarField& f, std::span<const double> x) {
    const GridSpec& spec = f.spec;
    int base[3] = {0, 0, 0};
    double frac[3] = {0.0, 0.0, 0.0};
    for (int d = 0; d < spec.dim; ++d) {
        double s = (x[d] + spec.half_width) / spec.spacing;
        s = std::clamp(s, 0.0, static_cast<double>(spec.nodes_per_axis - 1));
        base[d] = std::min(static_cast<int>(s), spec.nodes_per_axis - 2);
        frac[d] = s - base[d];
    }
    double acc = 0.0;
    const int corners = 1 << spec.dim;
    for (int c = 0; c < corners; ++c) {
        Index idx{0, 0, 0};
        double wgt = 1.0;
        for (int d = 0; d < spec.dim; ++d) {
            const int bit = (c >> d) & 1;
            idx[d] = base[d] + bit;
            wgt *= bit ? frac[d] : 1.0 - frac[d];
        }
        acc += wgt * f.at(idx);
    }
    return acc;
}

}  // namespace

ScalarField self_similar_profile(const ScalarField& u, double R, double t, const GridSpec& spec) {
    const double s = scale_factor(R, t);
    ScalarField out = ScalarField::zeros(spec);
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        double x[3];
        for (int d = 0; d < spec.dim; ++d) x[d] = spec.coord(idx[d]) / s;
        out.values[node] =
            s * interpolate(u, std::span<const double>(x, static_cast<std::size_t>(spec.dim)));
    });
    return out;
}

ScalarField eq4_residual(const Profile& u, double R, double t, const GridSpec& spec) {
    const double delta = spec.spacing * spec.spacing;
    if (t - delta < 0.0 || t + delta > R * R)
        throw std::invalid_argument("eq4_residual: t too close to the interval ends");
    ScalarField w_minus = self_similar_profile(u, R, t - delta, spec);
    ScalarField w_plus = self_similar_profile(u, R, t + delta, spec);
    ScalarField w = self_similar_profile(u, R, t, spec);
    GraphGeometry geom = compute_geometry(w);
    ScalarField out = ScalarField::zeros(spec);
    for (std::size_t node = 0; node < spec.node_count(); ++node) {
        const double wt = (w_plus.values[node] - w_minus.values[node]) / (2.0 * delta);
        // v div(Dw/v) = -v H
        out.values[node] = wt + geom.v[node] * geom.mean_curv[node];
    }
    return out;
}

FlowState step(const FlowState& state, const FlowConfig& config) {
    const GridSpec& spec = state.w.spec;
    const int n = spec.dim;
    VectorField dw = gradient_fd(state.w);
    HessianField hw = hessian_fd(state.w);
    FlowState next;
    next.w = state.w;
    next.t = state.t + config.dt;
    next.step_index = state.step_index + 1;

    double sup_old = 0.0, sup_new = 0.0;
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        sup_old = std::max(sup_old, std::abs(state.w.values[node]));
        if (!is_interior(spec, idx, 1)) return;  // frozen Dirichlet faces
        double grad2 = 0.0;
        for (int i = 0; i < n; ++i) grad2 += dw.at(node, i) * dw.at(node, i);
        const double inv_v2 = 1.0 / (1.0 + grad2);
        double rate = 0.0;
        for (int i = 0; i < n; ++i) {
            rate += hw.at(node, i, i);
            for (int j = 0; j < n; ++j)
                rate -= dw.at(node, i) * dw.at(node, j) * inv_v2 * hw.at(node, i, j);
        }
        next.w.values[node] = state.w.values[node] + config.dt * rate;
    });
    for (double val : next.w.values) {
        if (!std::isfinite(val)) throw InstabilityError("flow step produced non-finite values");
        sup_new = std::max(sup_new, std::abs(val));
    }
    if (sup_new > 10.0 * std::max(sup_old, 1.0))
        throw InstabilityError("flow step grew sup|w| more than tenfold");
    return next;
}

double barrier_radius(double rho, double R, double t, int n) {
    const double r2 = rho * rho * R * R - 2.0 * n * t;
    if (t < 0.0 || r2 < 0.0)
        throw std::invalid_argument("barrier_radius: t beyond the extinction time");
    return std::sqrt(r2);
}

double clearance(const FlowState& state, const BarrierBall& barrier, const FlowConfig& config) {
    const GridSpec& spec = state.w.spec;
    const double radius = barrier_radius(config.rho, config.R, state.t, spec.dim);
    double best = 1e300;
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        double d2 = 0.0;
        for (int d = 0; d < spec.dim; ++d) {
            const double xi = spec.coord(idx[d]);
            d2 += xi * xi;
        }
        const double dz = state.w.values[node] - barrier.center_height;
        best = std::min(best, std::sqrt(d2 + dz * dz) - radius);
    });
    return best;
}

SupBoundReport sup_bound_check(const ScalarField& u, double R) {
    const GridSpec& spec = u.spec;
    const int n = spec.dim;
    if (!(R > 1.0)) throw std::invalid_argument("sup_bound_check: requires R > 1");
    const double inner = 2.0 * std::sqrt(static_cast<double>(n));
    if (spec.half_width < R || spec.half_width < inner)
        throw std::invalid_argument("sup_bound_check: grid does not cover the required balls");
    double sup_r = 0.0, sup_inner = 0.0;
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        double r2 = 0.0;
        for (int d = 0; d < n; ++d) {
            const double xi = spec.coord(idx[d]);
            r2 += xi * xi;
        }
        const double val = std::abs(u.values[node]);
        if (r2 <= R * R) sup_r = std::max(sup_r, val);
        if (r2 <= inner * inner) sup_inner = std::max(sup_inner, val);
    });
    SupBoundReport rep;
    rep.lhs = sup_r;
    rep.c1 = 2.0 * (sup_inner + std::sqrt(2.0 * n + 1.0));
    rep.rhs = rep.c1 * R;
    rep.pass = rep.lhs <= rep.rhs;
    return rep;
}

FlowLog run(const FlowConfig& config, const ScalarField& w0) {
    if (!(w0.spec == config.spec)) throw std::invalid_argument("flow run: grid mismatch");
    BarrierBall upper = make_barrier(w0, config.rho, config.R, +1);
    BarrierBall lower = make_barrier(w0, config.rho, config.R, -1);

    FlowLog log;
    FlowState state{w0, 0.0, 0};
    const GridSpec& spec = config.spec;
    auto record = [&](const FlowState& s) {
        FlowLogRow row;
        row.step = s.step_index;
        row.t = s.t;
        GraphGeometry geom = compute_geometry(s.w);
        for (std::size_t node = 0; node < spec.node_count(); ++node) {
            row.sup_w = std::max(row.sup_w, std::abs(s.w.values[node]));
            row.max_a2 = std::max(row.max_a2, geom.a_norm_sq[node]);
            double g2 = 0.0;
            for (int d = 0; d < spec.dim; ++d) g2 += geom.du.at(node, d) * geom.du.at(node, d);
            row.max_grad = std::max(row.max_grad, std::sqrt(g2));
        }
        row.clear_plus = clearance(s, upper, config);
        row.clear_minus = clearance(s, lower, config);
        if (row.clear_plus <= 0.0 || row.clear_minus <= 0.0) log.clearance_ok = false;
        log.rows.push_back(row);
    };

    record(state);
    while (state.t < config.t_end - 1e-12) {
        state = step(state, config);
        record(state);
    }
    log.final_state = std::move(state);
    return log;
}

void write_flow_log_csv(std::ostream& os, const FlowLog& log) {
    os << "step,t,sup_w,max_grad,max_A2,clear_plus,clear_minus\n";
    char buf[256];
    for (const auto& r : log.rows) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step, r.t,
                      r.sup_w, r.max_grad, r.max_a2, r.clear_plus, r.clear_minus);
        os << buf;
    }
}

}  // namespace shrinklab
