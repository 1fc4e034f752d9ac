#include "shrinklab/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace shrinklab {

void ShootingProblem::validate() const {
    if (!(x_max > 0.0)) throw std::invalid_argument("shooting: x_max must be positive");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw std::invalid_argument("shooting: tolerances must be positive");
    if (!(slope_cap > 1.0)) throw std::invalid_argument("shooting: slope_cap must exceed 1");
}

std::string to_string(TrajectoryClass c) {
    switch (c) {
        case TrajectoryClass::Line: return "LINE";
        case TrajectoryClass::GradientBlowup: return "GRADIENT_BLOWUP";
        case TrajectoryClass::HorizonReached: return "HORIZON_REACHED";
    }
    return "?";
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200,
                 E6 = 22.0 / 525, E7 = -1.0 / 40;

struct DirectionResult {
    std::vector<TrajectorySample> samples;  // excludes origin; ordered outward
    bool blew_up = false;
    double blowup_x = 0.0;
};

// One adaptive DP54 driver shared by both coordinate systems below.
// accept(t, y) records the state and returns false to stop the direction;
// done(t) is the horizon test on the independent variable.
template <std::size_t N, class Rhs, class Accept, class Done>
void dp54_drive(const ShootingProblem& prob, double& t, std::array<double, N>& y, double& h,
                const Rhs& rhs, const Accept& accept, const Done& done) {
    using Vec = std::array<double, N>;
    auto fma_stage = [&](double hh, std::initializer_list<std::pair<double, const Vec*>> terms) {
        Vec out = y;
        for (auto [c, k] : terms)
            for (std::size_t i = 0; i < N; ++i) out[i] += hh * c * (*k)[i];
        return out;
    };
    Vec k1 = rhs(t, y);
    while (!done(t, h)) {
        const Vec k2 = rhs(t + C2 * h, fma_stage(h, {{A21, &k1}}));
        const Vec k3 = rhs(t + C3 * h, fma_stage(h, {{A31, &k1}, {A32, &k2}}));
        const Vec k4 = rhs(t + C4 * h, fma_stage(h, {{A41, &k1}, {A42, &k2}, {A43, &k3}}));
        const Vec k5 =
            rhs(t + C5 * h, fma_stage(h, {{A51, &k1}, {A52, &k2}, {A53, &k3}, {A54, &k4}}));
        const Vec k6 = rhs(
            t + h, fma_stage(h, {{A61, &k1}, {A62, &k2}, {A63, &k3}, {A64, &k4}, {A65, &k5}}));
        const Vec y5 = fma_stage(h, {{B1, &k1}, {B3, &k3}, {B4, &k4}, {B5, &k5}, {B6, &k6}});
        const Vec k7 = rhs(t + h, y5);
        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] +
                                  E6 * k6[i] + E7 * k7[i]);
            const double scale =
                prob.abs_tol + prob.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err += (e / scale) * (e / scale);
        }
        err = std::sqrt(err / N);

        if (err <= 1.0 || !std::isfinite(err)) {
            // Non-finite error means the state is exploding; take the step and
            // let the caller's stop condition terminate the direction.
            t += h;
            y = y5;
            k1 = k7;  // FSAL
            if (!accept(t, y)) return;
        }
        double factor;
        if (!std::isfinite(err))
            factor = 0.2;
        else if (err == 0.0)
            factor = 5.0;  // exactly resolved (e.g. a straight line): grow
        else
            factor = std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h *= factor;
        if (std::abs(h) < 1e-14)
            throw IntegrationError("shooting: step size underflow", t, y[0], y[1]);
    }
}

// Two coordinate systems, each covering the other's failure mode.
//
// Moderate slopes: p = u' and the line defect q = x u' - u, so
//   p' = (1 + p^2) q / 2,   q' = x (1 + p^2) q / 2.
// Straight lines are q = 0, which every RK stage preserves exactly in
// floating point; integrating (u, u') instead would let rounding excite the
// e^{x^2/4}-type growing mode and destroy the line long before the horizon.
//
// Steep slopes: near gradient blow-up u' ~ (x* - x)^{-1/2}, so graph
// coordinates would underflow the step size before |u'| reaches the cap.
// Switching to arclength (x, u, tangent angle phi) keeps the system regular:
//   dx/ds = cos phi,  du/ds = sin phi,  dphi/ds = (x sin phi - u cos phi)/2.
constexpr double kSlopeSwitch = 10.0;

DirectionResult integrate_direction(const ShootingProblem& prob, double sign) {
    DirectionResult out;
    double x = 0.0;
    std::array<double, 2> pq{prob.b, -prob.a};
    double h = sign * 1e-3;
    const double x_end = sign * prob.x_max;

    bool go_steep = false;
    dp54_drive<2>(
        prob, x, pq, h,
        [](double t, const std::array<double, 2>& y) {
            const double r = 0.5 * (1.0 + y[0] * y[0]) * y[1];
            return std::array<double, 2>{r, t * r};
        },
        [&](double t, const std::array<double, 2>& y) {
            out.samples.push_back({t, t * y[0] - y[1], y[0]});
            if (!std::isfinite(y[0]) || std::abs(y[0]) > prob.slope_cap) {
                out.blew_up = true;
                out.blowup_x = t;
                return false;
            }
            if (std::abs(y[0]) > kSlopeSwitch && y[1] != 0.0) {
                go_steep = true;
                return false;
            }
            return true;
        },
        [&](double t, double& hh) {
            if (sign * t >= prob.x_max) return true;
            if (std::abs(hh) > std::abs(x_end - t)) hh = x_end - t;
            return false;
        });

    if (!go_steep || out.blew_up) return out;

    // Continue through the steep region by arclength.
    double s = 0.0;
    std::array<double, 3> xup{x, x * pq[0] - pq[1], std::atan(pq[0])};
    double hs = sign * std::abs(h);
    dp54_drive<3>(
        prob, s, xup, hs,
        [](double, const std::array<double, 3>& y) {
            const double c = std::cos(y[2]), sn = std::sin(y[2]);
            return std::array<double, 3>{c, sn, 0.5 * (y[0] * sn - y[1] * c)};
        },
        [&](double, const std::array<double, 3>& y) {
            // A step can hop straight past the vertical tangent, so crossing
            // phi = pi/2 counts as blow-up too (x barely moves there: the
            // graph coordinate stalls quadratically in arclength).
            const bool vertical = std::abs(y[2]) >= M_PI / 2.0;
            const double du = std::tan(y[2]);
            if (vertical || !std::isfinite(du) || std::abs(du) > prob.slope_cap) {
                out.blew_up = true;
                out.blowup_x = y[0];
                if (!vertical && std::isfinite(du)) out.samples.push_back({y[0], y[1], du});
                return false;
            }
            out.samples.push_back({y[0], y[1], du});
            return true;
        },
        [&](double, double&) { return sign * xup[0] >= prob.x_max; });
    return out;
}

}  // namespace

Trajectory integrate(const ShootingProblem& problem) {
    problem.validate();
    DirectionResult neg = integrate_direction(problem, -1.0);
    DirectionResult pos = integrate_direction(problem, +1.0);

    Trajectory t;
    t.samples.reserve(neg.samples.size() + pos.samples.size() + 1);
    for (auto it = neg.samples.rbegin(); it != neg.samples.rend(); ++it) t.samples.push_back(*it);
    t.samples.push_back({0.0, problem.a, problem.b});
    for (const auto& s : pos.samples) t.samples.push_back(s);

    if (neg.blew_up || pos.blew_up) {
        t.classification = TrajectoryClass::GradientBlowup;
        double bx = 0.0;
        if (neg.blew_up && pos.blew_up)
            bx = std::abs(neg.blowup_x) < std::abs(pos.blowup_x) ? neg.blowup_x : pos.blowup_x;
        else
            bx = neg.blew_up ? neg.blowup_x : pos.blowup_x;
        t.blowup_x = bx;
        return t;
    }
    double deviation = 0.0;
    for (const auto& s : t.samples)
        deviation = std::max(deviation, std::abs(s.u - problem.b * s.x));
    if (deviation < 1e-7) {
        t.classification = TrajectoryClass::Line;
        t.line_deviation = deviation;
    } else {
        t.classification = TrajectoryClass::HorizonReached;
    }
    return t;
}

std::vector<ScanCell> scan(const std::vector<double>& a_values, const std::vector<double>& b_values,
                           double x_max) {
    std::vector<ScanCell> cells;
    for (double a : a_values) {
        for (double b : b_values) {
            ScanCell cell;
            cell.a = a;
            cell.b = b;
            try {
                ShootingProblem p;
                p.a = a;
                p.b = b;
                p.x_max = x_max;
                Trajectory t = integrate(p);
                cell.classification = t.classification;
                cell.blowup_x = t.blowup_x;
                cell.deviation = t.line_deviation;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

bool symmetry_check(const Trajectory& t1, const Trajectory& t2) {
    if (t1.samples.size() != t2.samples.size())
        throw std::invalid_argument("symmetry_check: trajectories have mismatched sample grids");
    for (std::size_t i = 0; i < t1.samples.size(); ++i) {
        const auto& s1 = t1.samples[i];
        const auto& s2 = t2.samples[i];
        if (std::abs(s1.x - s2.x) > 1e-12)
            throw std::invalid_argument("symmetry_check: trajectories have mismatched sample grids");
        if (std::abs(s1.u + s2.u) > 1e-9 || std::abs(s1.du + s2.du) > 1e-9) return false;
    }
    return true;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
    os << "x,u,du\n";
    char buf[128];
    for (const auto& s : t.samples) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", s.x, s.u, s.du);
        os << buf;
    }
}

void write_scan_csv(std::ostream& os, const std::vector<ScanCell>& cells) {
    os << "a,b,class,blowup_x,deviation\n";
    char buf[160];
    for (const auto& c : cells) {
        const std::string cls = c.classification ? to_string(*c.classification)
                                                 : (c.error.empty() ? "?" : "ERROR");
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%s,", c.a, c.b, cls.c_str());
        os << buf;
        if (c.blowup_x) {
            std::snprintf(buf, sizeof(buf), "%.17g", *c.blowup_x);
            os << buf;
        }
        os << ",";
        if (c.deviation) {
            std::snprintf(buf, sizeof(buf), "%.17g", *c.deviation);
            os << buf;
        }
        os << "\n";
    }
}

}  // namespace shrinklab
