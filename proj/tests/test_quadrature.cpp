#include <doctest.h>

#include <cmath>

#include "quadric/closed_forms.hpp"
#include "quadric/green.hpp"
#include "quadric/quadrature.hpp"

using namespace quadric;

TEST_SUITE_BEGIN("quadrature");

TEST_CASE("integrate_r handles algebraic endpoint behavior to 1e-12") {
    QuadratureSpec spec;
    spec.rel_tol = 1e-13;
    spec.abs_tol = 1e-15;
    for (double a : {0.5, 1.0, 3.0}) {
        const QuadResult r =
            integrate_r([a](double x, double) { return cx(std::pow(x, a - 1.0), 0.0); }, spec);
        CHECK(r.converged);
        CHECK(std::abs(r.value.real() - 1.0 / a) < 1e-12);
    }
    const QuadResult r =
        integrate_r([](double, double omr) { return cx(1.0 / std::sqrt(omr), 0.0); }, spec);
    CHECK(r.converged);
    CHECK(std::abs(r.value.real() - 2.0) < 1e-12);
}

TEST_CASE("tanh_sinh on a generic interval") {
    TanhSinhOptions opt;
    opt.rel_tol = 1e-12;
    const QuadResult r =
        tanh_sinh([](const QuadNode& nd) { return cx(std::sin(nd.x), 0.0); }, 0.0, 3.14159265358979323846,
                  opt);
    CHECK(r.converged);
    CHECK(std::abs(r.value.real() - 2.0) < 1e-12);
}

TEST_CASE("vector integrands share nodes") {
    TanhSinhOptions opt;
    opt.rel_tol = 1e-12;
    const VecQuadResult r = tanh_sinh_vec(
        [](const QuadNode& nd, std::span<cx> out) {
            out[0] = cx(nd.x, 0.0);
            out[1] = cx(nd.x * nd.x, 0.0);
        },
        2, 0.0, 1.0, opt);
    CHECK(r.converged);
    CHECK(std::abs(r.values[0].real() - 0.5) < 1e-12);
    CHECK(std::abs(r.values[1].real() - 1.0 / 3.0) < 1e-12);
}

TEST_CASE("semi-infinite substitution") {
    TanhSinhOptions opt;
    opt.rel_tol = 1e-12;
    const QuadResult r1 = tanh_sinh_semi_infinite([](double x) { return cx(std::exp(-x), 0.0); }, opt);
    CHECK(r1.converged);
    CHECK(std::abs(r1.value.real() - 1.0) < 1e-11);
    const QuadResult r2 =
        tanh_sinh_semi_infinite([](double x) { return cx(x * std::exp(-x * x), 0.0); }, opt);
    CHECK(r2.converged);
    CHECK(std::abs(r2.value.real() - 0.5) < 1e-11);
}

TEST_CASE("a non-integrable singularity is flagged, not silently averaged") {
    TanhSinhOptions opt;
    opt.rel_tol = 1e-10;
    const QuadResult r = tanh_sinh([](const QuadNode& nd) { return cx(1.0 / nd.dist_a, 0.0); }, 0.0, 1.0,
                                   opt);
    CHECK_FALSE(r.converged);
}

TEST_CASE("integrate_sphere counting measure and surface measures") {
    QuadratureSpec spec;
    spec.rel_tol = 1e-12;
    auto one = [](std::span<const double>) { return cx(1.0, 0.0); };

    const QuadricForm h1 = Preset::heisenberg(2).quadric;
    const QuadResult r1 = integrate_sphere(one, h1, spec);
    CHECK(r1.value.real() == 2.0);  // counting measure on S^0

    const QuadricForm m2 = Preset::m2().quadric;
    const QuadResult r2 = integrate_sphere(one, m2, spec);
    CHECK(std::abs(r2.value.real() - 2.0 * 3.14159265358979323846) < 1e-12);

    // m = 3: surface area 4 pi
    CMatrix id = CMatrix::identity(2);
    const QuadricForm q3(2, 3, {id, id, id});
    QuadratureSpec spec3;
    spec3.rel_tol = 1e-10;
    const QuadResult r3 = integrate_sphere(one, q3, spec3);
    CHECK(std::abs(r3.value.real() - 4.0 * 3.14159265358979323846) < 1e-8);
}

TEST_CASE("sphere panels split at eigen-structure angles of M1") {
    const QuadricForm m1 = Preset::m1().quadric;
    const auto breaks = sphere_breaks_m2(m1);
    auto has = [&breaks](double th) {
        for (double b : breaks)
            if (std::abs(b - th) < 1e-6) return true;
        return false;
    };
    const double pi = 3.14159265358979323846;
    // eigenvalue zeros at the four axes, crossings on the diagonals
    CHECK(has(0.0));
    CHECK(has(pi / 2));
    CHECK(has(pi));
    CHECK(has(3 * pi / 2));
    CHECK(has(pi / 4));
    CHECK(has(5 * pi / 4));
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) CHECK(breaks[i] < breaks[i + 1] + 1e-15);
}

TEST_SUITE_END();
