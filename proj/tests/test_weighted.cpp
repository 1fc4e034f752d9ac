#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shrinklab/weighted.hpp"

#include <cmath>

using namespace shrinklab;

namespace {

GraphContext flat_context(double L, int m, int dim = 2) {
    GridSpec s = GridSpec::make(dim, L, m);
    std::vector<double> a(dim, 0.0);
    return make_context(discretize(Profile::plane(a), s));
}

}  // namespace

TEST_CASE("cutoff values and slopes") {
    Cutoff lin = Cutoff::linear_clamp(2.0);
    CHECK(lin.value(1.0) == 1.0);
    CHECK(lin.value(2.0) == 1.0);
    CHECK(lin.value(2.5) == doctest::Approx(0.5));
    CHECK(lin.value(3.5) == 0.0);
    CHECK(lin.slope(2.5) == doctest::Approx(-1.0));
    CHECK(lin.slope(1.0) == 0.0);
    CHECK(lin.slope(3.5) == 0.0);

    Cutoff sm = Cutoff::smoothstep_bump(0.5, 1.5);
    CHECK(sm.value(0.2) == 1.0);
    CHECK(sm.value(1.5) == 0.0);
    CHECK(sm.value(1.0) == doctest::Approx(0.5));
    // C1: slope vanishes at both ends of the ramp
    CHECK(std::abs(sm.slope(0.5 + 1e-9)) < 1e-6);
    CHECK(std::abs(sm.slope(1.5 - 1e-9)) < 1e-6);
    // steepest in the middle
    CHECK(sm.slope(1.0) == doctest::Approx(-1.5));
}

TEST_CASE("gaussian quadrature reproduces the planar Gaussian integral") {
    // u = 0, n = 2: int_{R^2} e^{-|x|^2/4} dx = 4 pi; clip 6 leaves a
    // negligible tail.
    GraphContext ctx = flat_context(7.0, 281);
    ScalarField one = ScalarField::zeros(ctx.u.spec);
    for (auto& v : one.values) v = 1.0;
    const double got = gaussian_integral(ctx, one, 6.0);
    CHECK(got == doctest::Approx(4.0 * M_PI).epsilon(1e-3));
}

TEST_CASE("surface integral of 1 over a clipped flat disk is its area") {
    GraphContext ctx = flat_context(3.0, 241);
    ScalarField one = ScalarField::zeros(ctx.u.spec);
    for (auto& v : one.values) v = 1.0;
    const double got = surface_integral(ctx, one, 2.0);
    CHECK(got == doctest::Approx(4.0 * M_PI).epsilon(2e-3));
}

TEST_CASE("quadrature converges under refinement") {
    // The cut-cell error oscillates with the grid phase along the circle, so
    // compare errors averaged over several clip radii.
    auto mean_err = [](int m) {
        GraphContext ctx = flat_context(3.0, m);
        ScalarField one = ScalarField::zeros(ctx.u.spec);
        for (auto& v : one.values) v = 1.0;
        double sum = 0.0;
        const double radii[] = {1.6, 1.8, 2.0, 2.2, 2.4};
        for (double r : radii)
            sum += std::abs(surface_integral(ctx, one, r) - M_PI * r * r);
        return sum / 5.0;
    };
    CHECK(mean_err(241) < mean_err(61));
}

TEST_CASE("tilted plane surface integral scales by the slope factor") {
    GridSpec s = GridSpec::make(2, 3.0, 241);
    GraphContext ctx = make_context(discretize(Profile::plane({1.0, 0.0}), s));
    ScalarField one = ScalarField::zeros(s);
    for (auto& v : one.values) v = 1.0;
    // the tilted plane through the origin meets B_2 in a disk of radius 2
    const double got = surface_integral(ctx, one, 2.0);
    CHECK(got == doctest::Approx(4.0 * M_PI).epsilon(5e-3));
}

TEST_CASE("stability inequality holds on planes and the sphere cap") {
    {
        GridSpec s = GridSpec::make(2, 2.0, 81);
        GraphContext ctx = make_context(discretize(Profile::plane({0.3, 0.1}), s));
        WeightedReport rep = stability_sides(ctx, Cutoff::smoothstep_bump(0.4, 1.2));
        CHECK(rep.lhs == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(rep.margin > 0.0);
    }
    {
        GridSpec s = GridSpec::make(2, 1.2, 81);
        GraphContext ctx = make_context(discretize(Profile::sphere_cap(2), s));
        WeightedReport rep = stability_sides(ctx, Cutoff::smoothstep_bump(0.3, 1.0));
        CHECK(rep.lhs > 0.0);
        CHECK(rep.margin > -1e-9);
    }
}

TEST_CASE("stability_sides rejects cutoffs leaking through the boundary") {
    GridSpec s = GridSpec::make(2, 1.0, 41);
    GraphContext ctx = make_context(discretize(Profile::plane({0.0, 0.0}), s));
    CHECK_THROWS_AS(stability_sides(ctx, Cutoff::smoothstep_bump(0.5, 3.0)),
                    std::invalid_argument);
}

TEST_CASE("cutoff energies on a flat plane match the closed form") {
    // For u = 0, n = 2, the annulus energy is
    //   int_{R<|x|<R+1} e^{-|x|^2/4} dx = 4 pi (e^{-R^2/4} - e^{-(R+1)^2/4}).
    GridSpec s = GridSpec::make(2, 7.0, 281);
    GraphContext ctx = make_context(discretize(Profile::plane({0.0, 0.0}), s));
    CutoffFamily fam{{1.0, 2.0, 3.0, 4.0}};
    auto energies = cutoff_energy(ctx, fam);
    REQUIRE(energies.size() == 4);
    for (const auto& e : energies) {
        const double exact =
            4.0 * M_PI * (std::exp(-e.radius * e.radius / 4.0) -
                          std::exp(-(e.radius + 1.0) * (e.radius + 1.0) / 4.0));
        CHECK(e.energy == doctest::Approx(exact).epsilon(0.02));
        CHECK(e.energy <= e.crude_bound * 1.0001);
    }
    // decreasing once past the Gaussian shoulder
    CHECK(energies[2].energy < energies[1].energy);
    CHECK(energies[3].energy < energies[2].energy);

    // box too small for the support of the last cutoff
    GridSpec tiny = GridSpec::make(2, 2.0, 41);
    GraphContext tctx = make_context(discretize(Profile::plane({0.0, 0.0}), tiny));
    CHECK_THROWS_AS(cutoff_energy(tctx, fam), std::invalid_argument);
}

TEST_CASE("graph volume of a flat disk is pi R^2") {
    GraphContext ctx = flat_context(3.0, 241);
    CHECK(graph_volume(ctx, 2.0) == doctest::Approx(4.0 * M_PI).epsilon(2e-3));
    CHECK(graph_volume(ctx, 0.0) == 0.0);
}

TEST_CASE("half sphere volumes") {
    CHECK(half_sphere_volume(1) == doctest::Approx(M_PI));
    CHECK(half_sphere_volume(2) == doctest::Approx(2.0 * M_PI));
    CHECK(half_sphere_volume(3) == doctest::Approx(M_PI * M_PI));
}

TEST_CASE("volume growth bound on planes") {
    GridSpec s = GridSpec::make(2, 9.0, 241);
    GraphContext ctx = make_context(discretize(Profile::plane({0.3, 0.1}), s));
    for (double R : {1.5, 2.0, 4.0}) {
        VolumeReport rep = volume_growth_check(ctx, R);
        CHECK(rep.pass);
        CHECK(rep.volume <= rep.bound);
        CHECK(rep.omega_n == doctest::Approx(2.0 * M_PI));
        // a plane through the origin meets B_R in a disk of radius R
        CHECK(rep.volume == doctest::Approx(M_PI * R * R).epsilon(0.01));
    }
}

TEST_CASE("linear growth bound on a tilted plane") {
    GridSpec s = GridSpec::make(2, 9.0, 241);
    GraphContext ctx = make_context(discretize(Profile::plane({0.3, 0.1}), s));
    LinearGrowthReport rep = linear_growth_check(ctx, {1.5, 2.0, 4.0, 8.0});
    CHECK(rep.pass);
    REQUIRE(rep.rows.size() == 4);
    for (const auto& row : rep.rows) {
        CHECK(row.pass);
        CHECK(row.m_r <= row.bound);
        // plane slope magnitude sqrt(0.1): M_R ~ sqrt(0.1) R, far under C1 R
        CHECK(row.m_r <= std::sqrt(0.1) * row.R * 1.5);
    }
    CHECK(rep.c1 >= 2.0 * std::sqrt(5.0));
    CHECK_THROWS_AS(linear_growth_check(ctx, {0.5}), std::invalid_argument);
}

TEST_CASE("flatness certificate separates planes from the sphere cap") {
    {
        GridSpec s = GridSpec::make(2, 2.0, 41);
        GraphContext ctx = make_context(discretize(Profile::plane({0.3, -0.2}), s));
        FlatnessReport rep = flatness_certificate(ctx, CutoffFamily{{1.5}});
        CHECK(rep.flat);
        REQUIRE(rep.fit_coeffs.size() == 2);
        CHECK(rep.fit_coeffs[0] == doctest::Approx(0.3).epsilon(1e-6));
        CHECK(rep.fit_coeffs[1] == doctest::Approx(-0.2).epsilon(1e-6));
        CHECK(rep.fit_sup_residual < 1e-8);
    }
    {
        GridSpec s = GridSpec::make(2, 1.2, 81);
        GraphContext ctx = make_context(discretize(Profile::sphere_cap(2), s));
        FlatnessReport rep = flatness_certificate(ctx, CutoffFamily{{2.0}});
        CHECK(!rep.flat);
        CHECK(rep.a2_mass > 1e-3);
    }
}
