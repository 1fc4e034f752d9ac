#pragma once

#include "shrinklab/geometry.hpp"
#include "shrinklab/grid.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

namespace shrinklab {

/// Configuration of the graphical mean curvature flow on a frozen-Dirichlet
/// box. The barrier parameter must satisfy rho^2 > 2n + 1 and the explicit
/// scheme requires dt <= h^2/(2n).
struct FlowConfig {
    GridSpec spec;
    double R = 2.0;
    double rho = 0.0;      // defaults to 2 sqrt(n)
    double dt = 0.0;       // defaults to h^2/(4n)
    double t_end = 0.0;    // defaults to R^2

    static FlowConfig make(GridSpec spec, double R, double rho = -1.0, double dt = -1.0,
                           double t_end = -1.0);
    void validate() const;
};

struct FlowState {
    ScalarField w;
    double t = 0.0;
    int step_index = 0;
};

/// A shrinking-sphere barrier centered on the height axis. The center
/// heights follow the construction a+ = sup w0 + rho R + 1 over the base
/// ball of radius rho R (inf - rho R - 1 for the lower barrier).
struct BarrierBall {
    int sign = +1;               // +1 upper, -1 lower
    double center_height = 0.0;  // a+ or a-
    double initial_radius = 0.0; // rho R
};

BarrierBall make_barrier(const ScalarField& w0, double rho, double R, int sign);

struct InstabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The self-similar slice w(x, t) = s u(x/s) with s = sqrt(R^2 + 1 - t),
/// sampled on spec. Requires t in [0, R^2].
ScalarField self_similar_profile(const Profile& u, double R, double t, const GridSpec& spec);

/// Field variant: u evaluated off-node by multilinear interpolation.
ScalarField self_similar_profile(const ScalarField& u, double R, double t, const GridSpec& spec);

/// Residual of the graphical flow equation w_t = v div(Dw/v) = -v H on the
/// self-similar slice of u. The time derivative is a centered difference of
/// the exact profile at t +- h^2, isolating spatial discretization error.
ScalarField eq4_residual(const Profile& u, double R, double t, const GridSpec& spec);

/// One forward-Euler step of w_t = (delta_ij - w_i w_j / v^2) w_ij at
/// interior nodes; boundary nodes are held fixed. Throws InstabilityError
/// when sup|w| grows more than tenfold in one step or turns non-finite.
FlowState step(const FlowState& state, const FlowConfig& config);

/// Exact shrinking-sphere radius sqrt(rho^2 R^2 - 2 n t); errors past the
/// extinction time rho^2 R^2 / (2n).
double barrier_radius(double rho, double R, double t, int n);

/// Min over grid nodes of dist((x, w(x)), barrier center) minus the barrier
/// radius at time t; positive means the graph and the ball are disjoint.
double clearance(const FlowState& state, const BarrierBall& barrier, const FlowConfig& config);

struct SupBoundReport {
    double lhs = 0.0;     // sup over B_R of |u| at nodes
    double rhs = 0.0;     // 2 (sup over B_{2 sqrt n} |u| + sqrt(2n+1)) R
    double c1 = 0.0;
    bool pass = false;
};

/// The linear-growth bound sup_{B_R}|u| <= 2(sup_{B_{2 sqrt n}}|u| + sqrt(2n+1)) R
/// for R > 1, evaluated by node sups over the base balls.
SupBoundReport sup_bound_check(const ScalarField& u, double R);

struct FlowLogRow {
    int step = 0;
    double t = 0.0;
    double sup_w = 0.0;
    double max_grad = 0.0;
    double max_a2 = 0.0;
    double clear_plus = 0.0;
    double clear_minus = 0.0;
};

struct FlowLog {
    std::vector<FlowLogRow> rows;
    FlowState final_state;
    bool clearance_ok = true;  // clearance stayed positive at every recorded step
};

/// Runs the flow to t_end with barriers built from the initial slice,
/// logging per-step diagnostics. Instability raises; a non-positive
/// clearance is recorded as a failed check, not thrown.
FlowLog run(const FlowConfig& config, const ScalarField& w0);

/// CSV: columns step,t,sup_w,max_grad,max_A2,clear_plus,clear_minus.
void write_flow_log_csv(std::ostream& os, const FlowLog& log);

}  // namespace shrinklab
