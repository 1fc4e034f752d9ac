#pragma once

#include "shrinklab/grid.hpp"

namespace shrinklab {

/// Per-node differential geometry of the graph Sigma = {(x, u(x))}.
///
/// Conventions: v = sqrt(1 + |Du|^2), upward unit normal n = (-Du, 1)/v,
/// mean curvature H = div(n) = -(1/v) g^{ij} u_ij with inverse metric
/// g^{ij} = delta_ij - u_i u_j / v^2, and
/// |A|^2 = (1/v^2) g^{ik} g^{jl} u_ij u_kl.
struct GraphGeometry {
    GridSpec spec;
    std::vector<double> v;          // slope factor, >= 1
    std::vector<double> mean_curv;  // H
    std::vector<double> a_norm_sq;  // |A|^2
    std::vector<double> f;          // <n, e_{n+1}> = 1/v
    VectorField normal;             // arity dim+1
    VectorField position;           // (x, u), arity dim+1
    VectorField du;                 // Du, arity dim
    HessianField hess;              // D^2 u
};

/// A height field together with its derived geometry; the common argument
/// of the surface operators below.
struct GraphContext {
    ScalarField u;
    GraphGeometry geom;
};

GraphGeometry compute_geometry(const ScalarField& u);
GraphContext make_context(ScalarField u);

/// Inverse-metric action at one node: (g^{ij} w_j)_i = w_i - du_i (du.w)/v^2.
void apply_inverse_metric(std::span<const double> du_node, double v,
                          std::span<const double> w, std::span<double> out);

/// Residual of the shrinker equation,
///   S = div(Du/v) - (x.Du - u)/(2v) = -H + <X, n>/2,
/// with <X, n> = (u - x.Du)/v. Both algebraic forms are evaluated and
/// asserted to agree pointwise within 1e-10.
ScalarField shrinker_residual(const ScalarField& u, const GraphGeometry& geom);

/// Output of laplace_beltrami: the surface Laplacian of phi together with
/// its tangential gradient data.
struct SurfaceDerivatives {
    ScalarField laplacian;       // (1/v) d_i(v g^{ij} d_j phi)
    ScalarField grad_norm_sq;    // g^{ij} phi_i phi_j
    VectorField grad_ambient;    // g^{ij} phi_j (e_i + u_i e_{n+1}), arity dim+1
};

/// Surface Laplacian of a base function pulled back to Sigma, discretized
/// in divergence form: the flux v g^{ij} phi_j is formed pointwise and
/// differentiated with the first-derivative stencils.
SurfaceDerivatives laplace_beltrami(const GraphContext& ctx, const ScalarField& phi);

/// Stability operator L phi = Lap_Sigma phi - (1/2)<X, grad_Sigma phi> + (|A|^2 + 1/2) phi,
/// with <X, grad_Sigma phi> = g^{ij} phi_j (x_i + u u_i).
ScalarField l_apply(const GraphContext& ctx, const ScalarField& phi);

/// Residual of the log-density identity for g = log(1/v):
///   Lap_Sigma g - (1/2)<X, grad_Sigma g> + |grad_Sigma g|^2 + |A|^2,
/// which vanishes on exact shrinkers.
ScalarField eq2_residual(const GraphContext& ctx);

struct NormPair {
    double sup = 0.0;
    double weighted_l2 = 0.0;  // sqrt(sum phi^2 e^{-|X|^2/4} v h^n) over the mask
};

/// The four identity residuals over an interior mask, each as sup norm and
/// Gaussian-weighted L2 norm: shrinker residual S, Lf - f/2, LH - H, and the
/// log-density residual.
struct IdentityReport {
    NormPair shrinker;
    NormPair lf_minus_half_f;
    NormPair lh_minus_h;
    NormPair log_density;
    int margin_nodes = 0;
    double h = 0.0;
};

IdentityReport identity_report(const ScalarField& u, int margin_nodes);

NormPair masked_norms(const GraphContext& ctx, const ScalarField& phi, int margin_nodes);

}  // namespace shrinklab
