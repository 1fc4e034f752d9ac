#include "shrinklab/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace shrinklab {

GraphGeometry compute_geometry(const ScalarField& u) {
    const GridSpec& spec = u.spec;
    const int n = spec.dim;
    GraphGeometry g;
    g.spec = spec;
    g.du = gradient_fd(u);
    g.hess = hessian_fd(u);
    const std::size_t count = spec.node_count();
    g.v.resize(count);
    g.mean_curv.resize(count);
    g.a_norm_sq.resize(count);
    g.f.resize(count);
    g.normal = VectorField::zeros(spec, n + 1);
    g.position = VectorField::zeros(spec, n + 1);

    double ginv_row[3];
    double gm[3][3];  // g^{ik} g^{jl} u_kl, built in two passes
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        double grad2 = 0.0;
        for (int i = 0; i < n; ++i) grad2 += g.du.at(node, i) * g.du.at(node, i);
        const double v = std::sqrt(1.0 + grad2);
        const double inv_v2 = 1.0 / (v * v);
        g.v[node] = v;
        g.f[node] = 1.0 / v;
        for (int i = 0; i < n; ++i) {
            g.normal.at(node, i) = -g.du.at(node, i) / v;
            g.position.at(node, i) = spec.coord(idx[i]);
        }
        g.normal.at(node, n) = 1.0 / v;
        g.position.at(node, n) = u.values[node];

        // B_ij = g^{ik} u_kj
        double b[3][3];
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < n; ++k)
                ginv_row[k] = (i == k ? 1.0 : 0.0) - g.du.at(node, i) * g.du.at(node, k) * inv_v2;
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += ginv_row[k] * g.hess.at(node, k, j);
                b[i][j] = s;
            }
        }
        double trace_b = 0.0;
        for (int i = 0; i < n; ++i) trace_b += b[i][i];
        g.mean_curv[node] = -trace_b / v;

        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k)
                    s += b[i][k] * ((k == j ? 1.0 : 0.0) - g.du.at(node, k) * g.du.at(node, j) * inv_v2);
                gm[i][j] = s;  // g^{ik} u_kl g^{lj}
            }
        double a2 = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a2 += gm[i][j] * g.hess.at(node, j, i);
        g.a_norm_sq[node] = a2 * inv_v2;
    });
    return g;
}

GraphContext make_context(ScalarField u) {
    GraphGeometry geom = compute_geometry(u);
    return GraphContext{std::move(u), std::move(geom)};
}

void apply_inverse_metric(std::span<const double> du_node, double v,
                          std::span<const double> w, std::span<double> out) {
    const int n = static_cast<int>(du_node.size());
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += du_node[i] * w[i];
    const double scale = dot / (v * v);
    for (int i = 0; i < n; ++i) out[i] = w[i] - du_node[i] * scale;
}

ScalarField shrinker_residual(const ScalarField& u, const GraphGeometry& geom) {
    const GridSpec& spec = u.spec;
    const int n = spec.dim;
    ScalarField out = ScalarField::zeros(spec);
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        const double v = geom.v[node];
        double x_dot_du = 0.0;
        double grad_dot_hess = 0.0;  // u_i u_j u_ij
        double lap = 0.0;
        for (int i = 0; i < n; ++i) {
            x_dot_du += spec.coord(idx[i]) * geom.du.at(node, i);
            lap += geom.hess.at(node, i, i);
            for (int j = 0; j < n; ++j)
                grad_dot_hess += geom.du.at(node, i) * geom.du.at(node, j) * geom.hess.at(node, i, j);
        }
        // Form A: div(Du/v) expanded by the chain rule, minus the right side.
        const double div_flux = lap / v - grad_dot_hess / (v * v * v);
        const double form_a = div_flux - (x_dot_du - u.values[node]) / (2.0 * v);
        // Form B: -H + <X, n>/2 with <X, n> = (u - x.Du)/v.
        const double form_b = -geom.mean_curv[node] + (u.values[node] - x_dot_du) / (2.0 * v);
        if (std::abs(form_a - form_b) > 1e-10)
            throw std::logic_error("shrinker_residual: algebraic forms disagree beyond 1e-10");
        out.values[node] = form_b;
    });
    return out;
}

SurfaceDerivatives laplace_beltrami(const GraphContext& ctx, const ScalarField& phi) {
    const GridSpec& spec = ctx.u.spec;
    if (!(phi.spec == spec))
        throw std::invalid_argument("laplace_beltrami: phi lives on a different grid");
    const int n = spec.dim;
    const GraphGeometry& g = ctx.geom;

    VectorField dphi = gradient_fd(phi);
    // Flux components F_i = v g^{ij} phi_j, each differentiated along axis i.
    SurfaceDerivatives out;
    out.grad_norm_sq = ScalarField::zeros(spec);
    out.grad_ambient = VectorField::zeros(spec, n + 1);
    std::vector<ScalarField> flux;
    flux.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) flux.push_back(ScalarField::zeros(spec));

    double tang[3];
    for_each_node(spec, [&](std::size_t node, const Index&) {
        const double v = g.v[node];
        const double du_node[3] = {n > 0 ? g.du.at(node, 0) : 0.0,
                                   n > 1 ? g.du.at(node, 1) : 0.0,
                                   n > 2 ? g.du.at(node, 2) : 0.0};
        const double dphi_node[3] = {n > 0 ? dphi.at(node, 0) : 0.0,
                                     n > 1 ? dphi.at(node, 1) : 0.0,
                                     n > 2 ? dphi.at(node, 2) : 0.0};
        apply_inverse_metric(std::span<const double>(du_node, static_cast<std::size_t>(n)), v,
                             std::span<const double>(dphi_node, static_cast<std::size_t>(n)),
                             std::span<double>(tang, static_cast<std::size_t>(n)));
        double gn = 0.0, vertical = 0.0;
        for (int i = 0; i < n; ++i) {
            flux[static_cast<std::size_t>(i)].values[node] = v * tang[i];
            gn += tang[i] * dphi_node[i];
            out.grad_ambient.at(node, i) = tang[i];
            vertical += tang[i] * du_node[i];
        }
        out.grad_ambient.at(node, n) = vertical;
        out.grad_norm_sq.values[node] = gn;
    });

    out.laplacian = ScalarField::zeros(spec);
    for (int i = 0; i < n; ++i) {
        VectorField dflux = gradient_fd(flux[static_cast<std::size_t>(i)]);
        for_each_node(spec, [&](std::size_t node, const Index&) {
            out.laplacian.values[node] += dflux.at(node, i);
        });
    }
    for_each_node(spec, [&](std::size_t node, const Index&) {
        out.laplacian.values[node] /= g.v[node];
    });
    return out;
}

namespace {

// <X, grad_Sigma phi> = g^{ij} phi_j (x_i + u u_i) at one node.
double position_dot_tangential(const GraphContext& ctx, const SurfaceDerivatives& sd,
                               std::size_t node, const Index& idx) {
    const GridSpec& spec = ctx.u.spec;
    const int n = spec.dim;
    double s = 0.0;
    const double u_val = ctx.u.values[node];
    for (int i = 0; i < n; ++i)
        s += sd.grad_ambient.at(node, i) * (spec.coord(idx[i]) + u_val * ctx.geom.du.at(node, i));
    return s;
}

}  // namespace

ScalarField l_apply(const GraphContext& ctx, const ScalarField& phi) {
    SurfaceDerivatives sd = laplace_beltrami(ctx, phi);
    ScalarField out = ScalarField::zeros(ctx.u.spec);
    for_each_node(ctx.u.spec, [&](std::size_t node, const Index& idx) {
        const double drift = position_dot_tangential(ctx, sd, node, idx);
        out.values[node] = sd.laplacian.values[node] - 0.5 * drift +
                           (ctx.geom.a_norm_sq[node] + 0.5) * phi.values[node];
    });
    return out;
}

ScalarField eq2_residual(const GraphContext& ctx) {
    const GridSpec& spec = ctx.u.spec;
    ScalarField log_f = ScalarField::zeros(spec);
    for (std::size_t node = 0; node < spec.node_count(); ++node)
        log_f.values[node] = std::log(ctx.geom.f[node]);
    SurfaceDerivatives sd = laplace_beltrami(ctx, log_f);
    ScalarField out = ScalarField::zeros(spec);
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        const double drift = position_dot_tangential(ctx, sd, node, idx);
        out.values[node] = sd.laplacian.values[node] - 0.5 * drift +
                           sd.grad_norm_sq.values[node] + ctx.geom.a_norm_sq[node];
    });
    return out;
}

NormPair masked_norms(const GraphContext& ctx, const ScalarField& phi, int margin_nodes) {
    const GridSpec& spec = ctx.u.spec;
    const std::vector<bool> mask = interior_mask(spec, margin_nodes);
    double cell = 1.0;
    for (int d = 0; d < spec.dim; ++d) cell *= spec.spacing;
    NormPair out;
    double sum = 0.0;
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        if (!mask[node]) return;
        const double val = std::abs(phi.values[node]);
        if (val > out.sup) out.sup = val;
        double r2 = ctx.u.values[node] * ctx.u.values[node];
        for (int d = 0; d < spec.dim; ++d) {
            const double xi = spec.coord(idx[d]);
            r2 += xi * xi;
        }
        sum += val * val * std::exp(-r2 / 4.0) * ctx.geom.v[node] * cell;
    });
    out.weighted_l2 = std::sqrt(sum);
    return out;
}

IdentityReport identity_report(const ScalarField& u, int margin_nodes) {
    GraphContext ctx = make_context(u);
    const GridSpec& spec = ctx.u.spec;

    ScalarField s_res = shrinker_residual(ctx.u, ctx.geom);

    ScalarField f_field{spec, ctx.geom.f};
    ScalarField lf = l_apply(ctx, f_field);
    for (std::size_t node = 0; node < spec.node_count(); ++node)
        lf.values[node] -= 0.5 * f_field.values[node];

    ScalarField h_field{spec, ctx.geom.mean_curv};
    ScalarField lh = l_apply(ctx, h_field);
    for (std::size_t node = 0; node < spec.node_count(); ++node)
        lh.values[node] -= h_field.values[node];

    ScalarField eq2 = eq2_residual(ctx);

    IdentityReport report;
    report.shrinker = masked_norms(ctx, s_res, margin_nodes);
    report.lf_minus_half_f = masked_norms(ctx, lf, margin_nodes);
    report.lh_minus_h = masked_norms(ctx, lh, margin_nodes);
    report.log_density = masked_norms(ctx, eq2, margin_nodes);
    report.margin_nodes = margin_nodes;
    report.h = spec.spacing;
    return report;
}

}  // namespace shrinklab
