#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace shrinklab {

/// Initial data and controls for integrating the 1D shrinker ODE
///   u'' = (1 + u'^2)(x u' - u)/2
/// from the origin in both directions.
struct ShootingProblem {
    double a = 0.0;      // u(0)
    double b = 0.0;      // u'(0)
    double x_max = 8.0;  // integration horizon
    double rel_tol = 1e-9;
    double abs_tol = 1e-9;
    double slope_cap = 1e8;

    void validate() const;
};

enum class TrajectoryClass { Line, GradientBlowup, HorizonReached };

std::string to_string(TrajectoryClass c);

struct TrajectorySample {
    double x, u, du;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;  // ascending in x, origin included
    TrajectoryClass classification = TrajectoryClass::HorizonReached;
    std::optional<double> blowup_x;         // smallest |x| where |u'| crossed the cap
    std::optional<double> line_deviation;   // sup |u - b x| when Line
};

struct IntegrationError : std::runtime_error {
    double last_x, last_u, last_du;
    IntegrationError(const std::string& msg, double x, double u, double du)
        : std::runtime_error(msg), last_x(x), last_u(u), last_du(du) {}
};

/// Adaptive Dormand-Prince 5(4) integration in both directions from x = 0.
/// A direction stops at |x| = x_max or when |u'| exceeds slope_cap.
/// Classification: GradientBlowup if any direction hit the cap, else Line
/// when sup |u - b x| < 1e-7 over all samples, else HorizonReached.
Trajectory integrate(const ShootingProblem& problem);

struct ScanCell {
    double a, b;
    std::optional<TrajectoryClass> classification;  // empty on integration failure
    std::optional<double> blowup_x;
    std::optional<double> deviation;
    std::string error;  // integration failures are recorded, not thrown
};

std::vector<ScanCell> scan(const std::vector<double>& a_values,
                           const std::vector<double>& b_values, double x_max);

/// True iff the two trajectories are sign mirrors of each other within 1e-9,
/// as for initial data (a, b) and (-a, -b). Throws on mismatched sample grids.
bool symmetry_check(const Trajectory& t1, const Trajectory& t2);

/// CSV: columns x,u,du.
void write_trajectory_csv(std::ostream& os, const Trajectory& t);

/// CSV: columns a,b,class,blowup_x,deviation.
void write_scan_csv(std::ostream& os, const std::vector<ScanCell>& cells);

}  // namespace shrinklab
