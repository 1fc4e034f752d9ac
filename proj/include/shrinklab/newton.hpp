#pragma once

#include "shrinklab/geometry.hpp"

#include <stdexcept>
#include <vector>

namespace shrinklab {

enum class InitialGuess { HarmonicExtension, Supplied };

/// Dirichlet problem for the shrinker equation on the grid box: interior
/// nodes carry the discrete residual S, boundary nodes carry u - data.
struct DirichletProblem {
    GridSpec spec;
    ScalarField boundary_data;  // full-size field; only boundary entries are used
    InitialGuess guess = InitialGuess::HarmonicExtension;
    ScalarField supplied_guess;  // used when guess == Supplied

    static DirichletProblem from_profile(const GridSpec& spec, const Profile& data);
};

struct NewtonConfig {
    double tol = 1e-10;  // sup-norm residual target
    int max_iter = 50;
    double damping_factor = 0.5;
    double min_step = 9.5367431640625e-7;  // 2^-20
};

struct SolveReport {
    int iterations = 0;
    double final_residual = 0.0;
    std::vector<double> damping_history;  // accepted step length per iteration
    bool converged = false;
};

struct NotConvergedError : std::runtime_error {
    ScalarField best_iterate;
    SolveReport report;
    NotConvergedError(std::string msg, ScalarField best, SolveReport rep)
        : std::runtime_error(std::move(msg)), best_iterate(std::move(best)), report(std::move(rep)) {}
};

/// Residual field: shrinker residual at interior nodes, u - data on the faces.
ScalarField residual(const ScalarField& u, const DirichletProblem& problem);

struct SolveResult {
    ScalarField u;
    SolveReport report;
};

/// Damped Newton iteration with an analytic Jacobian of the discrete operator
/// and backtracking line search accepting only residual sup-norm decrease.
/// Throws NotConvergedError carrying the best iterate on failure.
SolveResult solve(const DirichletProblem& problem, const NewtonConfig& config = {});

/// Identity residuals of a converged solution, for the consistency web
/// between the solver and the geometry operators.
IdentityReport cross_validate(const ScalarField& u, int margin_nodes);

/// Directional derivative check used by tests: the assembled Jacobian applied
/// to phi, compared against (residual(u + eps phi) - residual(u - eps phi)) / (2 eps).
ScalarField jacobian_apply(const ScalarField& u, const DirichletProblem& problem,
                           const ScalarField& phi);

}  // namespace shrinklab
