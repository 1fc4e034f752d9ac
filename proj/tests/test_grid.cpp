#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shrinklab/grid.hpp"

#include <cmath>
#include <sstream>

using namespace shrinklab;

TEST_CASE("make_grid computes spacing and node coordinates") {
    GridSpec s = GridSpec::make(1, 1.0, 5);
    CHECK(s.spacing == doctest::Approx(0.5).epsilon(1e-15));
    const double expected[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};
    for (int k = 0; k < 5; ++k) CHECK(s.coord(k) == doctest::Approx(expected[k]).epsilon(1e-15));

    GridSpec s2 = GridSpec::make(2, 2.0, 9);
    CHECK(s2.spacing == doctest::Approx(0.5));
    CHECK(s2.node_count() == 81);
}

TEST_CASE("make_grid rejects invalid parameters") {
    CHECK_THROWS_AS(GridSpec::make(1, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec::make(1, 1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec::make(1, 0.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec::make(0, 1.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec::make(4, 1.0, 5), std::invalid_argument);
}

TEST_CASE("discretize samples profiles exactly") {
    GridSpec s = GridSpec::make(1, 1.0, 5);
    ScalarField f = discretize(Profile::plane({3.0}), s);
    for (int k = 0; k < 5; ++k) CHECK(f.at({k, 0, 0}) == doctest::Approx(3.0 * s.coord(k)));

    GridSpec s2 = GridSpec::make(2, 1.2, 9);
    ScalarField cap = discretize(Profile::sphere_cap(2), s2);
    CHECK(cap.at({4, 4, 0}) == doctest::Approx(2.0));  // origin: sqrt(4)

    // re-sampling on the same spec is idempotent
    ScalarField cap2 = discretize(Profile::sphere_cap(2), s2);
    CHECK(cap.values == cap2.values);
}

TEST_CASE("sphere_cap rejects boxes leaving its domain") {
    CHECK_THROWS_AS(discretize(Profile::sphere_cap(2), GridSpec::make(2, 2.5, 9)),
                    std::invalid_argument);
}

TEST_CASE("gradient_fd is exact on polynomials of degree <= 2") {
    GridSpec s = GridSpec::make(2, 1.0, 9);

    ScalarField c = discretize(Profile::plane({0.0, 0.0}), s);
    VectorField dc = gradient_fd(c);
    for (double v : dc.values) CHECK(v == 0.0);

    ScalarField lin = discretize(Profile::plane({2.0, -1.5}), s);
    VectorField dl = gradient_fd(lin);
    for (std::size_t node = 0; node < s.node_count(); ++node) {
        CHECK(dl.at(node, 0) == doctest::Approx(2.0).epsilon(1e-13));
        CHECK(dl.at(node, 1) == doctest::Approx(-1.5).epsilon(1e-13));
    }

    ScalarField q = discretize(
        Profile::tabulated([](std::span<const double> x) { return x[0] * x[0]; }), s);
    VectorField dq = gradient_fd(q);
    for_each_node(s, [&](std::size_t node, const Index& idx) {
        if (!is_interior(s, idx, 1)) return;
        CHECK(dq.at(node, 0) == doctest::Approx(2.0 * s.coord(idx[0])).epsilon(1e-12));
    });
}

TEST_CASE("hessian_fd is exact on quadratics") {
    GridSpec s = GridSpec::make(2, 1.0, 9);
    ScalarField xy = discretize(
        Profile::tabulated([](std::span<const double> x) { return x[0] * x[1]; }), s);
    HessianField h = hessian_fd(xy);
    for_each_node(s, [&](std::size_t node, const Index& idx) {
        if (!is_interior(s, idx, 1)) return;
        CHECK(h.at(node, 0, 1) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(h.at(node, 1, 0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(h.at(node, 0, 0) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(h.at(node, 1, 1) == doctest::Approx(0.0).epsilon(1e-12));
    });

    ScalarField lin = discretize(Profile::plane({1.0, 2.0}), s);
    for (double v : hessian_fd(lin).values) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("derivatives converge at second order on smooth profiles") {
    auto smooth = Profile::tabulated(
        [](std::span<const double> x) { return std::sin(1.3 * x[0]) * std::exp(0.4 * x[1]); });
    auto max_grad_err = [&](int m) {
        GridSpec s = GridSpec::make(2, 1.0, m);
        ScalarField f = discretize(smooth, s);
        VectorField g = gradient_fd(f);
        double err = 0.0;
        for_each_node(s, [&](std::size_t node, const Index& idx) {
            if (!is_interior(s, idx, 1)) return;
            const double x = s.coord(idx[0]), y = s.coord(idx[1]);
            const double gx = 1.3 * std::cos(1.3 * x) * std::exp(0.4 * y);
            err = std::max(err, std::abs(g.at(node, 0) - gx));
        });
        return err;
    };
    const double ratio = max_grad_err(41) / max_grad_err(81);
    CHECK(ratio > 3.4);
    CHECK(ratio < 4.6);
}

TEST_CASE("interior_mask counts and errors") {
    GridSpec s = GridSpec::make(2, 1.0, 9);
    auto all = interior_mask(s, 0);
    int count = 0;
    for (bool b : all) count += b ? 1 : 0;
    CHECK(count == 81);

    auto inner = interior_mask(s, 1);
    count = 0;
    for (bool b : inner) count += b ? 1 : 0;
    CHECK(count == 49);

    CHECK_THROWS_AS(interior_mask(s, 4), std::invalid_argument);
}

TEST_CASE("CSV dump layout") {
    GridSpec s = GridSpec::make(1, 1.0, 5);
    ScalarField f = discretize(Profile::plane({1.0}), s);
    std::ostringstream os;
    write_field_csv(os, f);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "x1,value");
    std::getline(is, line);
    CHECK(line == "-1,-1");
    int rows = 1;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 5);
}
