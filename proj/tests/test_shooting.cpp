#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shrinklab/shooting.hpp"

#include <cmath>
#include <sstream>

using namespace shrinklab;

TEST_CASE("lines through the origin are exact solutions") {
    for (double b : {-2.0, -1.0, 0.0, 0.5, 2.0}) {
        ShootingProblem p{.a = 0.0, .b = b};
        Trajectory t = integrate(p);
        CHECK(t.classification == TrajectoryClass::Line);
        REQUIRE(t.line_deviation.has_value());
        CHECK(*t.line_deviation < 1e-7);
        // endpoints reach the horizon
        CHECK(t.samples.front().x == doctest::Approx(-p.x_max));
        CHECK(t.samples.back().x == doctest::Approx(p.x_max));
    }
}

TEST_CASE("nonzero height at the origin forces gradient blowup") {
    for (double a : {0.1, -0.1, 1.0, -1.0}) {
        Trajectory t = integrate({.a = a, .b = 0.0, .x_max = 20.0});
        CHECK(t.classification == TrajectoryClass::GradientBlowup);
        REQUIRE(t.blowup_x.has_value());
        CHECK(*t.blowup_x > 0.0);
        CHECK(*t.blowup_x < 20.0);
    }
}

TEST_CASE("blowup location is stable under tolerance changes") {
    ShootingProblem loose{.a = 0.5, .b = 0.0, .x_max = 20.0};
    ShootingProblem tight = loose;
    tight.rel_tol = tight.abs_tol = 1e-11;
    Trajectory t1 = integrate(loose);
    Trajectory t2 = integrate(tight);
    REQUIRE(t1.blowup_x.has_value());
    REQUIRE(t2.blowup_x.has_value());
    CHECK(std::abs(*t1.blowup_x - *t2.blowup_x) / *t2.blowup_x < 0.01);
}

TEST_CASE("the ODE respects the (u, u') -> (-u, -u') symmetry") {
    Trajectory t1 = integrate({.a = 0.3, .b = 0.7, .x_max = 6.0});
    Trajectory t2 = integrate({.a = -0.3, .b = -0.7, .x_max = 6.0});
    CHECK(symmetry_check(t1, t2));
}

TEST_CASE("samples ascend in x and include the origin") {
    Trajectory t = integrate({.a = 0.2, .b = -0.4, .x_max = 5.0});
    bool saw_origin = false;
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
        if (i > 0) CHECK(t.samples[i].x > t.samples[i - 1].x);
        if (t.samples[i].x == 0.0) {
            saw_origin = true;
            CHECK(t.samples[i].u == doctest::Approx(0.2));
            CHECK(t.samples[i].du == doctest::Approx(-0.4));
        }
    }
    CHECK(saw_origin);
}

TEST_CASE("validate rejects bad controls") {
    ShootingProblem p;
    p.x_max = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ShootingProblem{};
    p.rel_tol = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ShootingProblem{};
    p.slope_cap = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("scan covers the grid and records classes") {
    const std::vector<double> as{0.0, 0.5};
    const std::vector<double> bs{-1.0, 0.0, 1.0};
    auto cells = scan(as, bs, 20.0);
    REQUIRE(cells.size() == 6);
    for (const auto& c : cells) {
        REQUIRE(c.classification.has_value());
        CHECK(c.error.empty());
        if (c.a == 0.0) {
            CHECK(*c.classification == TrajectoryClass::Line);
        } else {
            CHECK(*c.classification == TrajectoryClass::GradientBlowup);
        }
    }
}

TEST_CASE("trajectory CSV layout") {
    Trajectory t = integrate({.a = 0.0, .b = 1.0, .x_max = 2.0});
    std::ostringstream os;
    write_trajectory_csv(os, t);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "x,u,du");
    std::size_t rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == t.samples.size());
}

TEST_CASE("scan CSV layout") {
    auto cells = scan({0.0}, {0.0, 1.0}, 5.0);
    std::ostringstream os;
    write_scan_csv(os, cells);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "a,b,class,blowup_x,deviation");
    std::size_t rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 2);
}
