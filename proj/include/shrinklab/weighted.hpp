#pragma once

#include "shrinklab/geometry.hpp"

#include <optional>
#include <vector>

namespace shrinklab {

/// A radial cutoff, either in the ambient variable |X| = sqrt(|x|^2 + u^2)
/// or in the base variable |x|. LinearClamp is clamp(r1 - rho, 0, 1) with
/// r1 = r0 + 1 (the Lipschitz-1 family); Smoothstep is 1 on [0, r0] and
/// eases to 0 at r1 with a C1 cubic.
struct Cutoff {
    enum class Space { Ambient, Base };
    enum class Kind { LinearClamp, Smoothstep };

    Space space = Space::Ambient;
    Kind kind = Kind::LinearClamp;
    double r0 = 1.0;
    double r1 = 2.0;

    static Cutoff linear_clamp(double radius, Space space = Space::Ambient);
    static Cutoff smoothstep_bump(double r0, double r1, Space space = Space::Base);

    double value(double rho) const;
    double slope(double rho) const;
};

/// The linear cutoff family eta_j = clamp(R_j + 1 - |X|, 0, 1): identically
/// one on B_{R_j}, vanishing outside B_{R_j + 1}.
struct CutoffFamily {
    std::vector<double> radii;  // increasing R_j
};

/// Integral of phi e^{-(|x|^2 + u^2)/4} v dx over {|x|^2 + u^2 < clip^2}
/// by tensor trapezoid quadrature with per-axis partial cell fractions at
/// the clip boundary.
double gaussian_integral(const GraphContext& ctx, const ScalarField& phi, double clip_radius);

/// Same quadrature without the Gaussian weight: integral of phi v dx over
/// the sublevel set.
double surface_integral(const GraphContext& ctx, const ScalarField& phi, double clip_radius);

struct WeightedReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs - lhs
    double h = 0.0;
    double domain_radius = 0.0;
};

/// Two sides of the weighted stability inequality
///   int eta^2 |A|^2 e^{-|X|^2/4} <= int |grad_Sigma eta|^2 e^{-|X|^2/4}.
/// Throws if the cutoff support leaks through the grid boundary.
WeightedReport stability_sides(const GraphContext& ctx, const Cutoff& eta);

struct CutoffEnergy {
    double radius = 0.0;       // R_j
    double energy = 0.0;       // int |grad_Sigma eta_j|^2 e^{-|X|^2/4}
    double crude_bound = 0.0;  // int over Sigma cap (B_{R_j+1} \ B_{R_j}) of 2 e^{-|X|^2/4}
};

/// Per-j cutoff gradient energies together with the constant-2 annulus bound
/// that dominates them. Requires the grid box to contain the footprint of
/// B_{R_max + 1}.
std::vector<CutoffEnergy> cutoff_energy(const GraphContext& ctx, const CutoffFamily& family);

/// Vol(Sigma cap B_R) = integral of v over {|x|^2 + u^2 < R^2}.
double graph_volume(const GraphContext& ctx, double R);

struct VolumeReport {
    double volume = 0.0;
    double bound = 0.0;      // 2 omega_n R^n (1 + R^2 + M_R^2)
    double bound_alt = 0.0;  // 2 omega_n R^n (1 + R^n + M_R^2), surfaced for comparison
    double m_r = 0.0;        // sup over the base ball of |u|
    double omega_n = 0.0;    // half the volume of the unit n-sphere in R^{n+1}
    bool pass = false;
};

/// Half the volume of the unit n-sphere in R^{n+1}: pi for n = 1, 2 pi for n = 2.
double half_sphere_volume(int n);

VolumeReport volume_growth_check(const GraphContext& ctx, double R);

struct LinearGrowthRow {
    double R = 0.0;
    double m_r = 0.0;
    double bound = 0.0;  // C1 R
    double margin = 0.0;
    bool pass = false;
};

struct LinearGrowthReport {
    double c1 = 0.0;  // 2 (sup_{B_{2 sqrt n}} |u| + sqrt(2n+1))
    std::vector<LinearGrowthRow> rows;
    bool pass = true;
};

/// Linear growth bound M_R <= C1 R for each R in the list (all must exceed 1).
LinearGrowthReport linear_growth_check(const GraphContext& ctx, const std::vector<double>& r_list);

struct FlatnessThresholds {
    double a2_mass = 1e-6;
    double fit_residual = 1e-4;
};

struct FlatnessReport {
    double a2_mass = 0.0;              // weighted |A|^2 over the largest clip
    std::vector<double> fit_coeffs;    // least-squares u ~ a.x
    double fit_sup_residual = 0.0;
    bool flat = false;
};

/// Flatness verdict: small weighted |A|^2 mass and a good linear fit u ~ a.x.
FlatnessReport flatness_certificate(const GraphContext& ctx, const CutoffFamily& family,
                                    const FlatnessThresholds& thresholds = {});

}  // namespace shrinklab
