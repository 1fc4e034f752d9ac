#include "shrinklab/weighted.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace shrinklab {

Cutoff Cutoff::linear_clamp(double radius, Space space) {
    if (!(radius > 0.0)) throw std::invalid_argument("cutoff: radius must be positive");
    return Cutoff{space, Kind::LinearClamp, radius, radius + 1.0};
}

Cutoff Cutoff::smoothstep_bump(double r0, double r1, Space space) {
    if (!(r0 > 0.0) || !(r1 > r0))
        throw std::invalid_argument("cutoff: need 0 < r0 < r1");
    return Cutoff{space, Kind::Smoothstep, r0, r1};
}

double Cutoff::value(double rho) const {
    if (rho <= r0) return 1.0;
    if (rho >= r1) return 0.0;
    if (kind == Kind::LinearClamp) return r1 - rho;
    const double tau = (rho - r0) / (r1 - r0);
    return 1.0 - tau * tau * (3.0 - 2.0 * tau);
}

double Cutoff::slope(double rho) const {
    if (rho <= r0 || rho >= r1) return 0.0;
    if (kind == Kind::LinearClamp) return -1.0;
    const double tau = (rho - r0) / (r1 - r0);
    return -6.0 * tau * (1.0 - tau) / (r1 - r0);
}

namespace {

double ambient_radius_sq(const GraphContext& ctx, std::size_t node, const Index& idx) {
    const GridSpec& spec = ctx.u.spec;
    double r2 = ctx.u.values[node] * ctx.u.values[node];
    for (int d = 0; d < spec.dim; ++d) {
        const double xi = spec.coord(idx[d]);
        r2 += xi * xi;
    }
    return r2;
}

// Tensor quadrature of integrand * v (optionally * e^{-|X|^2/4}) over the
// sublevel set {|x|^2 + u^2 < clip^2}. Per-axis node weight is
// h (w_minus + w_plus) with w = 1/2 toward an inside neighbor, the full
// linear crossing fraction toward an outside one (the cut interval has no
// node at its far end to carry its half), and 0 past a box face (which
// reproduces the trapezoid end weight on unclipped boxes).
double clipped_quadrature(const GraphContext& ctx, std::span<const double> integrand,
                          double clip_radius, bool gaussian_weight) {
    const GridSpec& spec = ctx.u.spec;
    const int n = spec.dim;
    const double h = spec.spacing;
    const bool unclipped = !std::isfinite(clip_radius);
    const double clip2 = unclipped ? 0.0 : clip_radius * clip_radius;

    // q < 0 inside the set.
    std::vector<double> q(spec.node_count());
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        q[node] = unclipped ? -1.0 : ambient_radius_sq(ctx, node, idx) - clip2;
    });

    double total = 0.0;
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        if (q[node] >= 0.0) return;
        double weight = 1.0;
        for (int d = 0; d < n; ++d) {
            double w_sum = 0.0;
            for (int dir = -1; dir <= 1; dir += 2) {
                Index nb = idx;
                nb[d] += dir;
                if (nb[d] < 0 || nb[d] >= spec.nodes_per_axis) continue;  // box face: 0
                const double qn = q[spec.flatten(nb)];
                if (qn < 0.0)
                    w_sum += 0.5;
                else
                    w_sum += std::clamp(q[node] / (q[node] - qn), 0.0, 1.0);
            }
            weight *= h * w_sum;
        }
        double val = integrand[node] * ctx.geom.v[node] * weight;
        if (gaussian_weight) val *= std::exp(-ambient_radius_sq(ctx, node, idx) / 4.0);
        total += val;
    });
    return total;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Pullback of a radial cutoff to the graph: values and base-gradient
// components phi_i, both analytic.
struct CutoffPullback {
    ScalarField value;
    VectorField grad;  // arity dim
};

CutoffPullback pull_back(const GraphContext& ctx, const Cutoff& eta) {
    const GridSpec& spec = ctx.u.spec;
    const int n = spec.dim;
    CutoffPullback out{ScalarField::zeros(spec), VectorField::zeros(spec, n)};
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        double r2 = 0.0;
        for (int d = 0; d < n; ++d) {
            const double xi = spec.coord(idx[d]);
            r2 += xi * xi;
        }
        const double u_val = ctx.u.values[node];
        const double rho = eta.space == Cutoff::Space::Ambient
                               ? std::sqrt(r2 + u_val * u_val)
                               : std::sqrt(r2);
        out.value.values[node] = eta.value(rho);
        const double sl = eta.slope(rho);
        if (sl != 0.0 && rho > 0.0) {
            for (int d = 0; d < n; ++d) {
                double drho = spec.coord(idx[d]);
                if (eta.space == Cutoff::Space::Ambient) drho += u_val * ctx.geom.du.at(node, d);
                out.grad.at(node, d) = sl * drho / rho;
            }
        }
    });
    return out;
}

// |grad_Sigma phi|^2 = g^{ij} phi_i phi_j from base-gradient components.
double tangential_norm_sq(const GraphContext& ctx, std::size_t node, const VectorField& grad) {
    const int n = ctx.u.spec.dim;
    double dot_du = 0.0, g2 = 0.0;
    for (int d = 0; d < n; ++d) {
        dot_du += grad.at(node, d) * ctx.geom.du.at(node, d);
        g2 += grad.at(node, d) * grad.at(node, d);
    }
    const double v = ctx.geom.v[node];
    return g2 - dot_du * dot_du / (v * v);
}

void check_support(const GraphContext& ctx, const ScalarField& eta_values) {
    const GridSpec& spec = ctx.u.spec;
    bool leaks = false;
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        if (is_interior(spec, idx, 1)) return;
        if (std::abs(eta_values.values[node]) > 1e-12) leaks = true;
    });
    if (leaks)
        throw std::invalid_argument("cutoff support leaks through the grid boundary");
}

}  // namespace

double gaussian_integral(const GraphContext& ctx, const ScalarField& phi, double clip_radius) {
    if (!(phi.spec == ctx.u.spec))
        throw std::invalid_argument("gaussian_integral: grid mismatch");
    return clipped_quadrature(ctx, phi.values, clip_radius, true);
}

double surface_integral(const GraphContext& ctx, const ScalarField& phi, double clip_radius) {
    if (!(phi.spec == ctx.u.spec))
        throw std::invalid_argument("surface_integral: grid mismatch");
    return clipped_quadrature(ctx, phi.values, clip_radius, false);
}

WeightedReport stability_sides(const GraphContext& ctx, const Cutoff& eta) {
    const GridSpec& spec = ctx.u.spec;
    CutoffPullback pb = pull_back(ctx, eta);
    check_support(ctx, pb.value);

    ScalarField lhs_integrand = ScalarField::zeros(spec);
    ScalarField rhs_integrand = ScalarField::zeros(spec);
    for (std::size_t node = 0; node < spec.node_count(); ++node) {
        const double e = pb.value.values[node];
        lhs_integrand.values[node] = e * e * ctx.geom.a_norm_sq[node];
        rhs_integrand.values[node] = tangential_norm_sq(ctx, node, pb.grad);
    }
    WeightedReport rep;
    rep.lhs = gaussian_integral(ctx, lhs_integrand, kInf);
    rep.rhs = gaussian_integral(ctx, rhs_integrand, kInf);
    rep.margin = rep.rhs - rep.lhs;
    rep.h = spec.spacing;
    rep.domain_radius = spec.half_width;
    return rep;
}

std::vector<CutoffEnergy> cutoff_energy(const GraphContext& ctx, const CutoffFamily& family) {
    std::vector<CutoffEnergy> out;
    if (family.radii.empty()) return out;
    const GridSpec& spec = ctx.u.spec;
    const double r_max = *std::max_element(family.radii.begin(), family.radii.end());

    // The largest cutoff must vanish on the boundary nodes.
    bool covered = true;
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        if (is_interior(spec, idx, 1)) return;
        if (ambient_radius_sq(ctx, node, idx) < (r_max + 1.0) * (r_max + 1.0)) covered = false;
    });
    if (!covered)
        throw std::invalid_argument("cutoff_energy: grid box too small for the largest radius");

    ScalarField ones = ScalarField::zeros(spec);
    std::fill(ones.values.begin(), ones.values.end(), 1.0);
    for (double r : family.radii) {
        Cutoff eta = Cutoff::linear_clamp(r, Cutoff::Space::Ambient);
        CutoffPullback pb = pull_back(ctx, eta);
        ScalarField gradsq = ScalarField::zeros(spec);
        for (std::size_t node = 0; node < spec.node_count(); ++node)
            gradsq.values[node] = tangential_norm_sq(ctx, node, pb.grad);
        CutoffEnergy e;
        e.radius = r;
        e.energy = gaussian_integral(ctx, gradsq, kInf);
        e.crude_bound =
            2.0 * (gaussian_integral(ctx, ones, r + 1.0) - gaussian_integral(ctx, ones, r));
        out.push_back(e);
    }
    return out;
}

double graph_volume(const GraphContext& ctx, double R) {
    if (R < 0.0) throw std::invalid_argument("graph_volume: negative radius");
    if (R == 0.0) return 0.0;
    const GridSpec& spec = ctx.u.spec;
    bool overflow = false;
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        if (is_interior(spec, idx, 1)) return;
        if (ambient_radius_sq(ctx, node, idx) < R * R) overflow = true;
    });
    if (overflow)
        throw std::invalid_argument("graph_volume: ball footprint overflows the grid box");
    ScalarField ones = ScalarField::zeros(spec);
    std::fill(ones.values.begin(), ones.values.end(), 1.0);
    return surface_integral(ctx, ones, R);
}

double half_sphere_volume(int n) {
    // Volume of the unit n-sphere in R^{n+1} is 2 pi^{(n+1)/2} / Gamma((n+1)/2).
    return std::pow(M_PI, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

namespace {

double sup_over_base_ball(const GraphContext& ctx, double R) {
    const GridSpec& spec = ctx.u.spec;
    if (spec.half_width < R)
        throw std::invalid_argument("base ball not covered by the grid box");
    double sup = 0.0;
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        double r2 = 0.0;
        for (int d = 0; d < spec.dim; ++d) {
            const double xi = spec.coord(idx[d]);
            r2 += xi * xi;
        }
        if (r2 <= R * R) sup = std::max(sup, std::abs(ctx.u.values[node]));
    });
    return sup;
}

}  // namespace

VolumeReport volume_growth_check(const GraphContext& ctx, double R) {
    const int n = ctx.u.spec.dim;
    VolumeReport rep;
    rep.omega_n = half_sphere_volume(n);
    rep.volume = graph_volume(ctx, R);
    rep.m_r = R > 0.0 ? sup_over_base_ball(ctx, std::min(R, ctx.u.spec.half_width))
                      : std::abs(ctx.u.values[ctx.u.spec.flatten(
                            Index{(ctx.u.spec.nodes_per_axis - 1) / 2,
                                  (ctx.u.spec.nodes_per_axis - 1) / 2,
                                  (ctx.u.spec.nodes_per_axis - 1) / 2})]);
    const double rn = std::pow(R, n);
    rep.bound = 2.0 * rep.omega_n * rn * (1.0 + R * R + rep.m_r * rep.m_r);
    rep.bound_alt = 2.0 * rep.omega_n * rn * (1.0 + rn + rep.m_r * rep.m_r);
    rep.pass = rep.volume <= rep.bound;
    return rep;
}

LinearGrowthReport linear_growth_check(const GraphContext& ctx, const std::vector<double>& r_list) {
    const int n = ctx.u.spec.dim;
    LinearGrowthReport rep;
    const double inner = 2.0 * std::sqrt(static_cast<double>(n));
    rep.c1 = 2.0 * (sup_over_base_ball(ctx, inner) + std::sqrt(2.0 * n + 1.0));
    for (double R : r_list) {
        if (!(R > 1.0)) throw std::invalid_argument("linear_growth_check: all radii must exceed 1");
        LinearGrowthRow row;
        row.R = R;
        row.m_r = sup_over_base_ball(ctx, R);
        row.bound = rep.c1 * R;
        row.margin = row.bound - row.m_r;
        row.pass = row.m_r <= row.bound;
        if (!row.pass) rep.pass = false;
        rep.rows.push_back(row);
    }
    return rep;
}

FlatnessReport flatness_certificate(const GraphContext& ctx, const CutoffFamily& family,
                                    const FlatnessThresholds& thresholds) {
    const GridSpec& spec = ctx.u.spec;
    const int n = spec.dim;
    double clip = kInf;
    if (!family.radii.empty())
        clip = *std::max_element(family.radii.begin(), family.radii.end()) + 1.0;

    FlatnessReport rep;
    ScalarField a2{spec, ctx.geom.a_norm_sq};
    rep.a2_mass = gaussian_integral(ctx, a2, clip);

    // Normal equations for the least-squares fit u ~ a.x through the origin.
    double ata[3][3] = {};
    double atb[3] = {};
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        double x[3];
        for (int d = 0; d < n; ++d) x[d] = spec.coord(idx[d]);
        for (int i = 0; i < n; ++i) {
            atb[i] += x[i] * ctx.u.values[node];
            for (int j = 0; j < n; ++j) ata[i][j] += x[i] * x[j];
        }
    });
    // Gaussian elimination with partial pivoting (n <= 3).
    double a[3] = {};
    {
        double m[3][4];
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) m[i][j] = ata[i][j];
            m[i][n] = atb[i];
        }
        for (int col = 0; col < n; ++col) {
            int piv = col;
            for (int r = col + 1; r < n; ++r)
                if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
            for (int j = 0; j <= n; ++j) std::swap(m[col][j], m[piv][j]);
            for (int r = 0; r < n; ++r) {
                if (r == col || m[col][col] == 0.0) continue;
                const double factor = m[r][col] / m[col][col];
                for (int j = 0; j <= n; ++j) m[r][j] -= factor * m[col][j];
            }
        }
        for (int i = 0; i < n; ++i) a[i] = m[i][i] != 0.0 ? m[i][n] / m[i][i] : 0.0;
    }
    rep.fit_coeffs.assign(a, a + n);
    for_each_node(spec, [&](std::size_t node, const Index& idx) {
        double fit = 0.0;
        for (int d = 0; d < n; ++d) fit += a[d] * spec.coord(idx[d]);
        rep.fit_sup_residual = std::max(rep.fit_sup_residual, std::abs(ctx.u.values[node] - fit));
    });
    rep.flat = rep.a2_mass < thresholds.a2_mass && rep.fit_sup_residual < thresholds.fit_residual;
    return rep;
}

}  // namespace shrinklab
