#include <doctest.h>

#include <cmath>

#include "quadric/closed_forms.hpp"
#include "quadric/levi.hpp"
#include "test_util.hpp"

using namespace quadric;
using testutil::Rng;

TEST_SUITE_BEGIN("levi_spectral");

TEST_CASE("quadric form validation") {
    CMatrix bad(2, 2);
    bad(0, 1) = cx(1.0, 0.0);
    bad(1, 0) = cx(0.5, 0.0);  // not the conjugate
    CHECK_THROWS_AS(QuadricForm(2, 1, {bad}), std::invalid_argument);
    CHECK_THROWS_AS(QuadricForm(2, 2, {CMatrix::identity(2)}), std::invalid_argument);
    CHECK_THROWS_AS(QuadricForm(0, 1, {}), std::invalid_argument);
}

TEST_CASE("assemble_directional reproduces the preset displays") {
    const QuadricForm m2 = Preset::m2().quadric;
    const double l1[2] = {0.0, 1.0};
    const CMatrix a2 = assemble_directional(m2, l1);
    CHECK(std::abs(a2(0, 0) - cx(1.0, 0.0)) == 0.0);
    CHECK(std::abs(a2(0, 1)) == 0.0);
    CHECK(std::abs(a2(1, 1) - cx(-1.0, 0.0)) == 0.0);

    const QuadricForm m3 = Preset::m3().quadric;
    const double l2[2] = {1.0, 0.0};
    const CMatrix a3 = assemble_directional(m3, l2);
    CHECK(std::abs(a3(0, 0) - cx(2.0, 0.0)) == 0.0);
    CHECK(std::abs(a3(0, 1)) == 0.0);
    CHECK(std::abs(a3(1, 1)) == 0.0);

    const double zero[2] = {0.0, 0.0};
    CHECK(assemble_directional(m3, zero).max_abs() == 0.0);

    const double l3[1] = {1.0};
    CHECK_THROWS_AS(assemble_directional(m3, l3), std::invalid_argument);
}

TEST_CASE("spectral eigenvalues of the presets") {
    const QuadricForm m3 = Preset::m3().quadric;
    for (double th : {0.3, 1.1, 2.0, 4.4, 5.9}) {
        const double al[2] = {std::cos(th), std::sin(th)};
        const SpectralData s = spectral(m3, al);
        CHECK(s.mu[0] == doctest::Approx(1.0 + std::cos(th)).epsilon(1e-12));
        CHECK(s.mu[1] == doctest::Approx(std::cos(th) - 1.0).epsilon(1e-12));
    }
    const QuadricForm m2 = Preset::m2().quadric;
    for (double th : {0.0, 0.9, 2.7, 5.0}) {
        const double al[2] = {std::cos(th), std::sin(th)};
        const SpectralData s = spectral(m2, al);
        CHECK(s.mu[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.mu[1] == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(s.nu == 2);
    }
    // zero form
    CMatrix z2(2, 2);
    const QuadricForm zq(2, 1, {z2});
    const double one[1] = {1.0};
    const SpectralData s = spectral(zq, one);
    CHECK(s.mu[0] == 0.0);
    CHECK(s.mu[1] == 0.0);
    CHECK(s.nu == 0);

    const double notunit[2] = {0.5, 0.5};
    CHECK_THROWS_AS(spectral(m2, notunit), std::invalid_argument);
}

TEST_CASE("eigen coordinates") {
    // diagonal already-descending quadric: U = I
    CMatrix d(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 1.0;
    const QuadricForm q(2, 1, {d});
    const double one[1] = {1.0};
    const SpectralData s = spectral(q, one);
    const std::vector<cx> z = {cx(0.3, -0.2), cx(1.5, 0.4)};
    const auto za = eigen_coordinates(s, z);
    CHECK(std::abs(za[0] - z[0]) < 1e-14);
    CHECK(std::abs(za[1] - z[1]) < 1e-14);

    const std::vector<cx> zero = {cx{}, cx{}};
    const auto z0 = eigen_coordinates(s, zero);
    CHECK(std::abs(z0[0]) == 0.0);
    CHECK(std::abs(z0[1]) == 0.0);

    // M2 at alpha = (0,1): A = diag(1,-1), eigenvectors are the standard basis
    const QuadricForm m2 = Preset::m2().quadric;
    const double al[2] = {0.0, 1.0};
    const SpectralData s2 = spectral(m2, al);
    const std::vector<cx> e1 = {cx(1.0, 0.0), cx(0.0, 0.0)};
    const auto e1a = eigen_coordinates(s2, e1);
    CHECK(std::abs(e1a[0] - cx(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(e1a[1]) < 1e-12);

    // norm preservation on random input
    Rng rng(5);
    const auto zr = testutil::random_z(rng, 2, 0.5, 2.0);
    const auto zra = eigen_coordinates(s2, zr);
    double n1 = std::norm(zr[0]) + std::norm(zr[1]);
    double n2 = std::norm(zra[0]) + std::norm(zra[1]);
    CHECK(n1 == doctest::Approx(n2).epsilon(1e-13));
}

TEST_CASE("multi index enumeration and validation") {
    CHECK_THROWS_AS(MultiIndex(std::vector<int>{2, 1}), std::invalid_argument);
    CHECK_THROWS_AS(MultiIndex(std::vector<int>{0, 1}), std::invalid_argument);
    CHECK(MultiIndex{}.q() == 0);

    const auto i2 = multi_indices(4, 2);
    CHECK(i2.size() == 6);
    CHECK(i2.front().entries == std::vector<int>{1, 2});
    CHECK(i2.back().entries == std::vector<int>{3, 4});
    CHECK(multi_indices(3, 0).size() == 1);
    CHECK(multi_indices(3, 3).size() == 1);
}

TEST_CASE("minor conventions at top and bottom degree") {
    Rng rng(9);
    const int n = 3;
    const QuadricForm q(n, 2, {testutil::random_hermitian(rng, n), testutil::random_hermitian(rng, n)});
    const SpectralData s = spectral(q, testutil::random_unit(rng, 2));
    const MultiIndex empty{};
    const MultiIndex full(std::vector<int>{1, 2, 3});
    CHECK(minor_coefficient(s, empty, empty) == cx(1.0, 0.0));
    CHECK(minor_coefficient(s, full, full) == cx(1.0, 0.0));
    CHECK(inverse_minor(s, empty, empty) == cx(1.0, 0.0));
    CHECK(inverse_minor(s, full, full) == cx(1.0, 0.0));
    CHECK_THROWS_AS(minor_coefficient(s, empty, full), std::invalid_argument);
}

TEST_CASE("minors against the laplace oracle, cauchy-binet and duality") {
    Rng rng(13);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = rng.uniform_int(2, 4);
        const int m = rng.uniform_int(1, 3);
        std::vector<CMatrix> mats;
        for (int j = 0; j < m; ++j) mats.push_back(testutil::random_hermitian(rng, n));
        const QuadricForm q(n, m, std::move(mats));
        const SpectralData s = spectral(q, testutil::random_unit(rng, m));
        const int deg = rng.uniform_int(1, n - 1);
        const auto iq = multi_indices(n, deg);

        for (const MultiIndex& K : iq) {
            // oracle: laplace determinant of the conjugated submatrix
            for (const MultiIndex& L : iq) {
                std::vector<std::vector<cx>> sub(deg, std::vector<cx>(deg));
                for (int i = 0; i < deg; ++i)
                    for (int j = 0; j < deg; ++j)
                        sub[i][j] = std::conj(s.U(K.entries[i] - 1, L.entries[j] - 1));
                const cx want = testutil::laplace_det(sub);
                CHECK(std::abs(minor_coefficient(s, K, L) - want) < 1e-12);
            }
            double row_norm = 0.0;
            for (const MultiIndex& L : iq) row_norm += std::norm(minor_coefficient(s, K, L));
            CHECK(row_norm == doctest::Approx(1.0).epsilon(1e-11));

            for (const MultiIndex& Kp : iq) {
                cx acc{};
                for (const MultiIndex& L : iq) acc += minor_coefficient(s, K, L) * inverse_minor(s, L, Kp);
                const double want = (Kp == K) ? 1.0 : 0.0;
                CHECK(std::abs(acc - want) < 1e-11);
            }
        }
    }
}

TEST_CASE("eigenvalue homogeneity and sign flip in lambda") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = rng.uniform_int(1, 5);
        const int m = rng.uniform_int(1, 4);
        std::vector<CMatrix> mats;
        for (int j = 0; j < m; ++j) mats.push_back(testutil::random_hermitian(rng, n));
        const QuadricForm q(n, m, std::move(mats));
        const auto alpha = testutil::random_unit(rng, m);
        const SpectralData s = spectral(q, alpha);

        // mu_j^{t lambda} = t mu_j^{alpha} realized through assemble + eigen
        const double t = rng.uniform(0.1, 5.0);
        std::vector<double> tl(alpha);
        for (double& v : tl) v *= t;
        const auto vals = hermitian_eigen(assemble_directional(q, tl)).values;
        for (int j = 0; j < n; ++j)
            CHECK(vals[j] == doctest::Approx(t * s.mu[j]).epsilon(1e-10).scale(1.0));

        std::vector<double> neg(alpha);
        for (double& v : neg) v = -v;
        const SpectralData sn = spectral(q, neg);
        CHECK(sn.n_plus == s.n_minus);
        CHECK(sn.n_minus == s.n_plus);
    }
}

TEST_SUITE_END();
