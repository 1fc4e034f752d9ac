#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shrinklab/geometry.hpp"

#include <cmath>

using namespace shrinklab;

namespace {

double masked_sup(const ScalarField& f, int margin) {
    double sup = 0.0;
    const auto mask = interior_mask(f.spec, margin);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (mask[i]) sup = std::max(sup, std::abs(f.values[i]));
    return sup;
}

}  // namespace

TEST_CASE("flat and tilted planes have trivial geometry") {
    GridSpec s = GridSpec::make(2, 1.0, 21);
    ScalarField u = discretize(Profile::plane({1.0, 2.0}), s);
    GraphGeometry g = compute_geometry(u);
    const double v = std::sqrt(6.0);
    for (std::size_t node = 0; node < s.node_count(); ++node) {
        CHECK(g.v[node] == doctest::Approx(v).epsilon(1e-12));
        CHECK(g.f[node] == doctest::Approx(1.0 / v).epsilon(1e-12));
        CHECK(std::abs(g.mean_curv[node]) < 1e-11);
        CHECK(std::abs(g.a_norm_sq[node]) < 1e-11);
        // unit upward normal
        double norm2 = 0.0;
        for (int c = 0; c <= 2; ++c) norm2 += g.normal.at(node, c) * g.normal.at(node, c);
        CHECK(std::abs(std::sqrt(norm2) - 1.0) < 1e-12);
        CHECK(g.normal.at(node, 2) > 0.0);
    }
}

TEST_CASE("sphere cap curvatures converge to the round values") {
    auto errs = [&](int m) {
        GridSpec s = GridSpec::make(2, 1.2, m);
        GraphGeometry g = compute_geometry(discretize(Profile::sphere_cap(2), s));
        const auto mask = interior_mask(s, m / 16);
        double eh = 0.0, ea = 0.0;
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (!mask[i]) continue;
            eh = std::max(eh, std::abs(g.mean_curv[i] - 1.0));
            ea = std::max(ea, std::abs(g.a_norm_sq[i] - 0.5));
        }
        return std::pair{eh, ea};
    };
    auto [eh1, ea1] = errs(81);
    auto [eh2, ea2] = errs(161);
    CHECK(eh2 < 2e-3);
    CHECK(ea2 < 2e-3);
    // second-order decay
    CHECK(eh1 / eh2 > 3.0);
    CHECK(ea1 / ea2 > 3.0);
}

TEST_CASE("paraboloid values at the origin by hand") {
    GridSpec s = GridSpec::make(2, 1.0, 21);
    ScalarField u = discretize(
        Profile::tabulated([](std::span<const double> x) { return x[0] * x[0]; }), s);
    GraphGeometry g = compute_geometry(u);
    const std::size_t origin = s.flatten({10, 10, 0});
    CHECK(g.mean_curv[origin] == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(g.a_norm_sq[origin] == doctest::Approx(4.0).epsilon(1e-10));

    ScalarField res = shrinker_residual(u, g);
    CHECK(res.values[origin] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("planes through the origin solve the shrinker equation exactly") {
    GridSpec s = GridSpec::make(2, 1.5, 17);
    ScalarField u = discretize(Profile::plane({0.8, -0.6}), s);
    ScalarField res = shrinker_residual(u, compute_geometry(u));
    CHECK(masked_sup(res, 1) < 1e-12);
}

TEST_CASE("sphere cap shrinker residual vanishes at second order") {
    auto sup = [&](int m, int margin) {
        GridSpec s = GridSpec::make(2, 1.2, m);
        ScalarField u = discretize(Profile::sphere_cap(2), s);
        return masked_sup(shrinker_residual(u, compute_geometry(u)), margin);
    };
    const double s1 = sup(81, 5), s2 = sup(161, 10);
    CHECK(s2 < 5e-3);
    CHECK(s1 / s2 > 3.0);
    CHECK(s1 / s2 < 5.0);
}

TEST_CASE("laplace_beltrami reduces to the Euclidean Laplacian on flat graphs") {
    GridSpec s = GridSpec::make(2, 1.0, 21);
    GraphContext ctx = make_context(discretize(Profile::plane({0.0, 0.0}), s));
    ScalarField phi = discretize(
        Profile::tabulated([](std::span<const double> x) { return x[0] * x[0]; }), s);
    SurfaceDerivatives sd = laplace_beltrami(ctx, phi);
    for_each_node(s, [&](std::size_t node, const Index& idx) {
        if (!is_interior(s, idx, 1)) return;
        CHECK(sd.laplacian.values[node] == doctest::Approx(2.0).epsilon(1e-10));
    });

    ScalarField c = discretize(Profile::plane({0.0, 0.0}), s);
    for (auto& v : c.values) v = 7.0;
    SurfaceDerivatives sc = laplace_beltrami(ctx, c);
    CHECK(masked_sup(sc.laplacian, 1) < 1e-10);
    for (double v : sc.grad_ambient.values) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("surface Laplacian of the height matches -H f on the sphere cap") {
    // Independent route: Lap_Sigma u = -H <n, e_{n+1}> for any graph.
    GridSpec s = GridSpec::make(2, 1.2, 161);
    GraphContext ctx = make_context(discretize(Profile::sphere_cap(2), s));
    SurfaceDerivatives sd = laplace_beltrami(ctx, ctx.u);
    const auto mask = interior_mask(s, 10);
    double worst = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        const double oracle = -ctx.geom.mean_curv[i] * ctx.geom.f[i];
        worst = std::max(worst, std::abs(sd.laplacian.values[i] - oracle) / std::abs(oracle));
    }
    CHECK(worst < 0.02);
}

TEST_CASE("L identities on the sphere cap converge under refinement") {
    auto norms = [&](int m, int margin) {
        GridSpec s = GridSpec::make(2, 1.2, m);
        GraphContext ctx = make_context(discretize(Profile::sphere_cap(2), s));
        ScalarField f{s, ctx.geom.f};
        ScalarField lf = l_apply(ctx, f);
        for (std::size_t i = 0; i < lf.values.size(); ++i) lf.values[i] -= 0.5 * f.values[i];
        ScalarField h{s, ctx.geom.mean_curv};
        ScalarField lh = l_apply(ctx, h);
        for (std::size_t i = 0; i < lh.values.size(); ++i) lh.values[i] -= h.values[i];
        return std::pair{masked_norms(ctx, lf, margin).weighted_l2,
                         masked_norms(ctx, lh, margin).weighted_l2};
    };
    auto [lf1, lh1] = norms(81, 5);
    auto [lf2, lh2] = norms(161, 10);
    CHECK(lf2 < 5e-2);
    CHECK(lh2 < 5e-2);
    CHECK(lf1 / lf2 > 3.0);
    CHECK(lh1 / lh2 > 3.0);
}

TEST_CASE("l_apply on constants over a plane gives c/2") {
    GridSpec s = GridSpec::make(2, 1.5, 21);
    GraphContext ctx = make_context(discretize(Profile::plane({0.4, 0.2}), s));
    ScalarField phi = ScalarField::zeros(s);
    for (auto& v : phi.values) v = 3.0;
    ScalarField lphi = l_apply(ctx, phi);
    const auto mask = interior_mask(s, 2);
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) CHECK(lphi.values[i] == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("l_apply is linear in phi") {
    GridSpec s = GridSpec::make(2, 1.2, 41);
    GraphContext ctx = make_context(discretize(Profile::sphere_cap(2), s));
    ScalarField p1 = discretize(
        Profile::tabulated([](std::span<const double> x) { return std::sin(x[0]) + x[1]; }), s);
    ScalarField p2 = discretize(
        Profile::tabulated([](std::span<const double> x) { return std::cos(x[1]) * x[0]; }), s);
    ScalarField combo = ScalarField::zeros(s);
    for (std::size_t i = 0; i < combo.values.size(); ++i)
        combo.values[i] = 2.0 * p1.values[i] - 3.0 * p2.values[i];
    ScalarField l1 = l_apply(ctx, p1);
    ScalarField l2 = l_apply(ctx, p2);
    ScalarField lc = l_apply(ctx, combo);
    double scale = 0.0;
    for (double v : lc.values) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < lc.values.size(); ++i)
        CHECK(std::abs(lc.values[i] - 2.0 * l1.values[i] + 3.0 * l2.values[i]) <
              1e-12 * scale);
}

TEST_CASE("log-density residual: zero on planes, small on the cap, large on a paraboloid") {
    {
        GridSpec s = GridSpec::make(2, 1.5, 21);
        GraphContext ctx = make_context(discretize(Profile::plane({0.7, 0.1}), s));
        CHECK(masked_sup(eq2_residual(ctx), 2) < 1e-11);
    }
    {
        auto sup = [&](int m, int margin) {
            GridSpec s = GridSpec::make(2, 1.2, m);
            GraphContext ctx = make_context(discretize(Profile::sphere_cap(2), s));
            return masked_sup(eq2_residual(ctx), margin);
        };
        const double r1 = sup(81, 5), r2 = sup(161, 10);
        CHECK(r2 < 5e-2);
        CHECK(r1 / r2 > 2.5);
    }
    {
        // The residual cancels at the origin by symmetry; probe the interior sup.
        GridSpec s = GridSpec::make(2, 1.0, 81);
        GraphContext ctx = make_context(discretize(
            Profile::tabulated([](std::span<const double> x) { return x[0] * x[0]; }), s));
        CHECK(masked_sup(eq2_residual(ctx), 4) > 0.5);
    }
}

TEST_CASE("identity report: planes clean, sphere cap second order, paraboloid flagged") {
    {
        GridSpec s = GridSpec::make(2, 1.5, 21);
        IdentityReport rep = identity_report(discretize(Profile::plane({0.3, -0.4}), s), 2);
        CHECK(rep.shrinker.sup < 1e-10);
        CHECK(rep.lf_minus_half_f.sup < 1e-10);
        CHECK(rep.lh_minus_h.sup < 1e-10);
        CHECK(rep.log_density.sup < 1e-10);
    }
    {
        GridSpec coarse = GridSpec::make(2, 1.2, 81);
        GridSpec fine = GridSpec::make(2, 1.2, 161);
        IdentityReport r1 = identity_report(discretize(Profile::sphere_cap(2), coarse), 5);
        IdentityReport r2 = identity_report(discretize(Profile::sphere_cap(2), fine), 10);
        for (auto get : {+[](const IdentityReport& r) { return r.shrinker.weighted_l2; },
                         +[](const IdentityReport& r) { return r.lf_minus_half_f.weighted_l2; },
                         +[](const IdentityReport& r) { return r.lh_minus_h.weighted_l2; },
                         +[](const IdentityReport& r) { return r.log_density.weighted_l2; }}) {
            const double ratio = get(r1) / get(r2);
            CHECK(ratio > 3.0);
            CHECK(ratio < 5.0);
        }
    }
    {
        GridSpec s = GridSpec::make(2, 1.0, 41);
        IdentityReport rep = identity_report(
            discretize(Profile::tabulated([](std::span<const double> x) { return x[0] * x[0]; }),
                       s),
            2);
        CHECK(rep.shrinker.sup > 0.5);
    }
}

TEST_CASE("pointwise invariants: normals, f range, Cauchy-Schwarz") {
    GridSpec s = GridSpec::make(2, 1.2, 41);
    for (const Profile& p : {Profile::sphere_cap(2), Profile::plane({1.0, -2.0}),
                             Profile::sinusoid(0.5, 0.4, 1.3)}) {
        GraphGeometry g = compute_geometry(discretize(p, s));
        for (std::size_t node = 0; node < s.node_count(); ++node) {
            double n2 = 0.0;
            for (int c = 0; c <= 2; ++c) n2 += g.normal.at(node, c) * g.normal.at(node, c);
            CHECK(std::abs(std::sqrt(n2) - 1.0) < 1e-12);
            CHECK(g.f[node] > 0.0);
            CHECK(g.f[node] <= 1.0);
            CHECK(g.v[node] >= 1.0);
            CHECK(g.mean_curv[node] * g.mean_curv[node] <=
                  2.0 * g.a_norm_sq[node] + 1e-9);
        }
    }
}
