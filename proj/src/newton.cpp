#include "shrinklab/newton.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace shrinklab {

DirichletProblem DirichletProblem::from_profile(const GridSpec& spec, const Profile& data) {
    DirichletProblem p;
    p.spec = spec;
    p.boundary_data = discretize(data, spec);
    return p;
}

ScalarField residual(const ScalarField& u, const DirichletProblem& problem) {
    if (!(u.spec == problem.spec)) throw std::invalid_argument("newton residual: grid mismatch");
    GraphGeometry geom = compute_geometry(u);
    ScalarField s = shrinker_residual(u, geom);
    ScalarField out = ScalarField::zeros(u.spec);
    for_each_node(u.spec, [&](std::size_t node, const Index& idx) {
        out.values[node] = is_interior(u.spec, idx, 1)
                               ? s.values[node]
                               : u.values[node] - problem.boundary_data.values[node];
    });
    return out;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

// Analytic Jacobian of the discrete operator. Interior rows differentiate
//   S = lap/v - (g_i g_j M_ij)/v^3 + (P - x.g)/(2v)
// through the centered stencils of g and M; boundary rows are identity.
SpMat assemble_jacobian(const ScalarField& u, const GraphGeometry& geom) {
    const GridSpec& spec = u.spec;
    const int n = spec.dim;
    const double h = spec.spacing;
    const std::size_t count = spec.node_count();
    Triplets trips;
    trips.reserve(count * (n * n * 4 + 2 * n + 1));

    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        const auto row = static_cast<int>(node);
        if (!is_interior(spec, idx, 1)) {
            trips.emplace_back(row, row, 1.0);
            return;
        }
        const double v = geom.v[node];
        const double v3 = v * v * v;
        double g[3] = {0.0, 0.0, 0.0}, lap = 0.0, ggm = 0.0, x_dot_g = 0.0;
        for (int i = 0; i < n; ++i) g[i] = geom.du.at(node, i);
        for (int i = 0; i < n; ++i) {
            lap += geom.hess.at(node, i, i);
            x_dot_g += spec.coord(idx[i]) * g[i];
            for (int j = 0; j < n; ++j) ggm += g[i] * g[j] * geom.hess.at(node, i, j);
        }
        const double p_val = u.values[node];

        // dS/dP
        trips.emplace_back(row, row, 1.0 / (2.0 * v));

        // dS/dg_k through centered first differences
        for (int k = 0; k < n; ++k) {
            double gm_k = 0.0;  // sum_j g_j M_kj
            for (int j = 0; j < n; ++j) gm_k += g[j] * geom.hess.at(node, k, j);
            const double ds_dgk = -lap * g[k] / v3 - 2.0 * gm_k / v3 +
                                  3.0 * ggm * g[k] / (v3 * v * v) -
                                  spec.coord(idx[k]) / (2.0 * v) -
                                  (p_val - x_dot_g) * g[k] / (2.0 * v3);
            Index nb = idx;
            nb[k] = idx[k] + 1;
            trips.emplace_back(row, static_cast<int>(spec.flatten(nb)), ds_dgk / (2.0 * h));
            nb[k] = idx[k] - 1;
            trips.emplace_back(row, static_cast<int>(spec.flatten(nb)), -ds_dgk / (2.0 * h));
        }

        // dS/dM_ij = delta_ij / v - g_i g_j / v^3
        for (int i = 0; i < n; ++i) {
            const double c_ii = 1.0 / v - g[i] * g[i] / v3;
            Index nb = idx;
            trips.emplace_back(row, row, -2.0 * c_ii / (h * h));
            nb[i] = idx[i] + 1;
            trips.emplace_back(row, static_cast<int>(spec.flatten(nb)), c_ii / (h * h));
            nb[i] = idx[i] - 1;
            trips.emplace_back(row, static_cast<int>(spec.flatten(nb)), c_ii / (h * h));
            for (int j = i + 1; j < n; ++j) {
                const double c_ij = -2.0 * g[i] * g[j] / v3;  // both (i,j) and (j,i)
                for (int si = -1; si <= 1; si += 2)
                    for (int sj = -1; sj <= 1; sj += 2) {
                        Index cr = idx;
                        cr[i] = idx[i] + si;
                        cr[j] = idx[j] + sj;
                        trips.emplace_back(row, static_cast<int>(spec.flatten(cr)),
                                           c_ij * si * sj / (4.0 * h * h));
                    }
            }
        }
    });

    SpMat jac(static_cast<int>(count), static_cast<int>(count));
    jac.setFromTriplets(trips.begin(), trips.end());
    return jac;
}

double sup_norm(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values) s = std::max(s, std::abs(v));
    return s;
}

ScalarField harmonic_extension(const DirichletProblem& problem) {
    const GridSpec& spec = problem.spec;
    const std::size_t count = spec.node_count();
    Triplets trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<int>(count));
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        const auto row = static_cast<int>(node);
        if (!is_interior(spec, idx, 1)) {
            trips.emplace_back(row, row, 1.0);
            rhs[row] = problem.boundary_data.values[node];
            return;
        }
        for (int d = 0; d < spec.dim; ++d) {
            Index nb = idx;
            trips.emplace_back(row, row, -2.0);
            nb[d] = idx[d] + 1;
            trips.emplace_back(row, static_cast<int>(spec.flatten(nb)), 1.0);
            nb[d] = idx[d] - 1;
            trips.emplace_back(row, static_cast<int>(spec.flatten(nb)), 1.0);
        }
    });
    SpMat lap(static_cast<int>(count), static_cast<int>(count));
    lap.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<SpMat> lu;
    lu.compute(lap);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("harmonic extension: factorization failed");
    Eigen::VectorXd sol = lu.solve(rhs);
    ScalarField out = ScalarField::zeros(spec);
    for (std::size_t i = 0; i < count; ++i) out.values[i] = sol[static_cast<int>(i)];
    return out;
}

}  // namespace

ScalarField jacobian_apply(const ScalarField& u, const DirichletProblem& problem,
                           const ScalarField& phi) {
    (void)problem;
    GraphGeometry geom = compute_geometry(u);
    SpMat jac = assemble_jacobian(u, geom);
    Eigen::Map<const Eigen::VectorXd> x(phi.values.data(),
                                        static_cast<int>(phi.values.size()));
    Eigen::VectorXd y = jac * x;
    ScalarField out = ScalarField::zeros(u.spec);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = y[static_cast<int>(i)];
    return out;
}

SolveResult solve(const DirichletProblem& problem, const NewtonConfig& config) {
    ScalarField u = problem.guess == InitialGuess::Supplied ? problem.supplied_guess
                                                            : harmonic_extension(problem);
    if (!(u.spec == problem.spec)) throw std::invalid_argument("newton solve: guess grid mismatch");

    SolveReport report;
    ScalarField res = residual(u, problem);
    double res_norm = sup_norm(res);

    for (int iter = 0; iter < config.max_iter && res_norm >= config.tol; ++iter) {
        GraphGeometry geom = compute_geometry(u);
        SpMat jac = assemble_jacobian(u, geom);
        Eigen::SparseLU<SpMat> lu;
        lu.compute(jac);
        if (lu.info() != Eigen::Success)
            throw NotConvergedError("newton: linear solver breakdown", u, report);
        Eigen::Map<const Eigen::VectorXd> r(res.values.data(),
                                            static_cast<int>(res.values.size()));
        Eigen::VectorXd delta = lu.solve(-r);

        double lambda = 1.0;
        bool accepted = false;
        while (lambda >= config.min_step) {
            ScalarField trial = u;
            for (std::size_t i = 0; i < trial.values.size(); ++i)
                trial.values[i] += lambda * delta[static_cast<int>(i)];
            ScalarField trial_res = residual(trial, problem);
            const double trial_norm = sup_norm(trial_res);
            if (trial_norm < res_norm) {
                u = std::move(trial);
                res = std::move(trial_res);
                res_norm = trial_norm;
                accepted = true;
                break;
            }
            lambda *= config.damping_factor;
        }
        if (!accepted) {
            report.final_residual = res_norm;
            throw NotConvergedError("newton: line search stalled", u, report);
        }
        report.damping_history.push_back(lambda);
        report.iterations = iter + 1;
    }

    report.final_residual = res_norm;
    report.converged = res_norm < config.tol;
    if (!report.converged)
        throw NotConvergedError("newton: iteration limit reached", u, report);
    return SolveResult{std::move(u), std::move(report)};
}

IdentityReport cross_validate(const ScalarField& u, int margin_nodes) {
    return identity_report(u, margin_nodes);
}

}  // namespace shrinklab
