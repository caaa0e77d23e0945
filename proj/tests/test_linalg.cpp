#include <doctest.h>

#include <cmath>

#include "quadric/linalg.hpp"
#include "test_util.hpp"

using namespace quadric;
using testutil::Rng;

TEST_SUITE_BEGIN("linalg");

TEST_CASE("jacobi diagonalizes a diagonal matrix trivially") {
    CMatrix a(3, 3);
    a(0, 0) = -1.0;
    a(1, 1) = 4.0;
    a(2, 2) = 2.0;
    const EigenSystem es = hermitian_eigen(a);
    CHECK(es.values[0] == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(es.values[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(es.values[2] == doctest::Approx(-1.0).epsilon(1e-14));
    // columns follow the sort; phase convention makes the pivot entries +1
    CHECK(std::abs(es.vectors(1, 0) - cx(1.0, 0.0)) < 1e-14);
    CHECK(std::abs(es.vectors(2, 1) - cx(1.0, 0.0)) < 1e-14);
    CHECK(std::abs(es.vectors(0, 2) - cx(1.0, 0.0)) < 1e-14);
}

TEST_CASE("jacobi eigensystem invariants on random hermitian matrices") {
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = rng.uniform_int(1, 8);
        const CMatrix a = testutil::random_hermitian(rng, n);
        const EigenSystem es = hermitian_eigen(a);

        const CMatrix uu = es.vectors.adjoint() * es.vectors - CMatrix::identity(n);
        CHECK(uu.max_abs() < 1e-12);

        CMatrix d = es.vectors.adjoint() * a * es.vectors;
        for (int j = 0; j < n; ++j) d(j, j) -= es.values[j];
        CHECK(d.max_abs() < 1e-12 * std::max(1.0, a.max_abs()));

        for (int j = 0; j + 1 < n; ++j) CHECK(es.values[j] >= es.values[j + 1]);

        // phase convention: the largest-magnitude entry of each column is
        // real and positive
        for (int j = 0; j < n; ++j) {
            double best = 0.0;
            cx pivot{};
            for (int i = 0; i < n; ++i)
                if (std::abs(es.vectors(i, j)) > best) {
                    best = std::abs(es.vectors(i, j));
                    pivot = es.vectors(i, j);
                }
            CHECK(std::abs(pivot.imag()) < 1e-13);
            CHECK(pivot.real() > 0.0);
        }
    }
}

TEST_CASE("determinant matches the laplace-expansion oracle") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = rng.uniform_int(1, 5);
        CMatrix a(n, n);
        std::vector<std::vector<cx>> rows(n, std::vector<cx>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const cx v(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
                a(i, j) = v;
                rows[i][j] = v;
            }
        const cx want = testutil::laplace_det(rows);
        CHECK(std::abs(det(a) - want) < 1e-11 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("unitary determinants have unit modulus") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = rng.uniform_int(2, 6);
        const EigenSystem es = hermitian_eigen(testutil::random_hermitian(rng, n));
        CHECK(std::abs(std::abs(det(es.vectors)) - 1.0) < 1e-12);
    }
}

TEST_CASE("submatrix determinant") {
    CMatrix a(3, 3);
    int v = 1;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = v++;
    const int rows[2] = {0, 2};
    const int cols[2] = {1, 2};
    // [[2,3],[8,9]] -> -6
    CHECK(std::abs(submatrix_det(a, rows, cols) - cx(-6.0, 0.0)) < 1e-14);
}

TEST_SUITE_END();
