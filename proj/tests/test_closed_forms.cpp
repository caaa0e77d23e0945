#include <doctest.h>

#include <cmath>

#include "quadric/classify.hpp"
#include "quadric/closed_forms.hpp"
#include "test_util.hpp"

using namespace quadric;
using testutil::Rng;

TEST_SUITE_BEGIN("closed_forms");

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("preset matrices match their defining forms") {
    const QuadricForm m1 = Preset::m1().quadric;
    CHECK(m1.A[0](0, 0) == cx(1.0, 0.0));
    CHECK(m1.A[0](1, 1) == cx(0.0, 0.0));
    CHECK(m1.A[1](1, 1) == cx(1.0, 0.0));

    const QuadricForm m2 = Preset::m2().quadric;
    CHECK(m2.A[0](0, 1) == cx(1.0, 0.0));
    CHECK(m2.A[0](1, 0) == cx(1.0, 0.0));
    CHECK(m2.A[1](0, 0) == cx(1.0, 0.0));
    CHECK(m2.A[1](1, 1) == cx(-1.0, 0.0));

    const QuadricForm m3 = Preset::m3().quadric;
    CHECK(m3.A[0](0, 0) == cx(2.0, 0.0));
    CHECK(m3.A[1](0, 1) == cx(1.0, 0.0));

    CHECK(Preset::by_name("M2").quadric == m2);
    CHECK(Preset::by_name("heisenberg:3").quadric == Preset::heisenberg(3).quadric);
    CHECK(Preset::by_name("product-heisenberg:1,2").quadric.n == 3);
    CHECK(Preset::by_name("product-heisenberg:1,2").quadric.m == 2);
    CHECK_THROWS_AS(Preset::by_name("M9"), std::invalid_argument);
    CHECK_THROWS_AS(Preset::by_name("heisenberg"), std::invalid_argument);
}

TEST_CASE("every preset reproduces its signature table") {
    using Sig = std::set<std::pair<int, int>>;
    SphereSampler s2;
    s2.m = 2;
    CHECK(signature_set(Preset::m1().quadric, s2) == Sig{{2, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 2}});
    CHECK(signature_set(Preset::m2().quadric, s2) == Sig{{1, 1}});
    CHECK(signature_set(Preset::m3().quadric, s2) == Sig{{1, 0}, {1, 1}, {0, 1}});
}

TEST_CASE("heisenberg relative fundamental solution closed form") {
    // n = 1, t = 0: log 1 = 0 and the harmonic sum is empty
    const std::vector<cx> z1 = {cx(0.8, -0.4)};
    CHECK(std::abs(heisenberg_N(1, false, z1, 0.0)) < 1e-15);

    // n = 2, z = 0, t = 1 (hand derivation): c = 2^{n-2}(n-1)!/pi^{n+1} = 1/pi^3,
    // (it)^{-2} = -1, log(i) - log(-i) = i pi, so N = (1 - i pi)/pi^3.
    const std::vector<cx> z0 = {cx{}, cx{}};
    const cx got = heisenberg_N(2, false, z0, 1.0);
    const cx want = cx(1.0, -kPi) / std::pow(kPi, 3);
    CHECK(std::abs(got - want) < 1e-15);

    // the top-degree kernel is the conjugate of the function kernel
    Rng rng(3);
    for (int n : {1, 2, 3}) {
        for (int trial = 0; trial < 5; ++trial) {
            const auto z = testutil::random_z(rng, n, 0.2, 2.0);
            const double t = rng.uniform(-2.0, 2.0);
            const cx a = heisenberg_N(n, false, z, t);
            const cx b = heisenberg_N(n, true, z, t);
            CHECK(std::abs(b - std::conj(a)) < 1e-14 * std::abs(a));
        }
    }

    CHECK_THROWS_AS(heisenberg_N(2, false, z0, 0.0), std::domain_error);
}

TEST_CASE("heisenberg kernel is continuous along paths with z != 0") {
    // |z| > 0 keeps (|z|^2+it)/(|z|^2-it) off the branch cut; small parameter
    // steps produce small value steps.
    const std::vector<cx> z = {cx(0.5, 0.0), cx(0.3, -0.1)};
    cx prev = heisenberg_N(2, false, z, -1.0);
    double max_jump = 0.0;
    for (double t = -1.0 + 1e-6; t <= 1.0; t += 1e-6 * 1000) {
        const cx cur = heisenberg_N(2, false, z, t);
        max_jump = std::max(max_jump, std::abs(cur - prev) / std::max(1e-300, std::abs(prev)));
        prev = cur;
    }
    CHECK(max_jump < 2e-2);  // ~ Lipschitz * step, far from a branch jump of O(1)

    cx fine_prev = heisenberg_N(2, false, z, -1e-5);
    for (double t = -1e-5; t <= 1e-5; t += 1e-6) {
        const cx cur = heisenberg_N(2, false, z, t);
        CHECK(std::abs(cur - fine_prev) < 1e-4 * std::abs(cur));
        fine_prev = cur;
    }
}

TEST_CASE("m2 power law scaling and normalization") {
    const std::vector<cx> z = {cx(0.6, 0.2), cx(-0.1, 0.7)};
    const std::vector<double> t = {0.4, -0.9};
    const double C = 0.0161257672;
    const double base = m2_power_law(z, t, C);
    for (double d : {0.5, 2.0}) {
        std::vector<cx> zd = z;
        for (auto& v : zd) v *= d;
        std::vector<double> td = t;
        for (auto& v : td) v *= d * d;
        CHECK(m2_power_law(zd, td, C) == doctest::Approx(std::pow(d, -6.0) * base).epsilon(1e-14));
    }
    const std::vector<cx> unit = {cx(1.0, 0.0), cx(0.0, 0.0)};
    const std::vector<double> t0 = {0.0, 0.0};
    CHECK(m2_power_law(unit, t0, C) == C);
    const std::vector<cx> zz = {cx{}, cx{}};
    CHECK_THROWS_AS(m2_power_law(zz, t0, C), std::domain_error);
}

TEST_CASE("m3 corollary structure") {
    const std::vector<cx> z = {cx(0.7, -0.3), cx(0.5, 0.4)};
    const std::vector<double> t0 = {0.0, 0.0};
    const ClosedFormResult real_case = m3_corollary(z, t0, 1e-8);
    CHECK(real_case.converged);
    CHECK(real_case.value.real() > 0.0);
    CHECK(std::abs(real_case.value.imag()) < 1e-9 * real_case.value.real());

    const std::vector<double> t = {0.6, -0.8};
    const ClosedFormResult plus = m3_corollary(z, t, 1e-8);
    std::vector<double> tm = t;
    for (double& v : tm) v = -v;
    const ClosedFormResult minus = m3_corollary(z, tm, 1e-8);
    CHECK(std::abs(minus.value - std::conj(plus.value)) < 1e-7 * std::abs(plus.value));

    const std::vector<cx> zz = {cx{}, cx{}};
    CHECK_THROWS_AS(m3_corollary(zz, t0, 1e-8), std::domain_error);
}

TEST_CASE("product heisenberg szego display") {
    const std::vector<cx> ones = {cx(1.0, 0.0), cx(1.0, 0.0)};
    const std::vector<double> t0 = {0.0, 0.0};
    CHECK(std::abs(product_heisenberg_szego(ones, t0) - 1.0 / std::pow(kPi, 4)) < 1e-18);

    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto z = testutil::random_z(rng, 2, 0.4, 1.6);
        const std::vector<double> t = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const cx v = product_heisenberg_szego(z, t);
        const cx a(std::norm(z[0]), t[0]);
        const cx b(std::norm(z[1]), t[1]);
        CHECK(std::abs(v * a * a * b * b * std::pow(kPi, 4) - 1.0) < 1e-12);
    }

    const std::vector<cx> halforigin = {cx{}, cx(1.0, 0.0)};
    CHECK_THROWS_AS(product_heisenberg_szego(halforigin, t0), std::domain_error);
}

TEST_SUITE_END();
