#include <doctest.h>

#include <cmath>

#include "quadric/classify.hpp"
#include "quadric/closed_forms.hpp"
#include "quadric/green.hpp"
#include "test_util.hpp"

using namespace quadric;
using testutil::Rng;

TEST_SUITE_BEGIN("green_evaluator");

namespace {
constexpr double kPi = 3.14159265358979323846;

double rel(cx a, cx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
}  // namespace

TEST_CASE("a_alpha evaluates the displayed coefficient") {
    const QuadricForm h1 = Preset::heisenberg(1).quadric;
    const double one[1] = {1.0};
    const SpectralData s = spectral(h1, one);

    const std::vector<cx> z0 = {cx{}};
    CHECK(a_alpha(s, 0.37, z0) == 0.0);

    // |z| = 1, r = e^{-2}: A = (1+e^{-2})/(1-e^{-2}) = coth(1)
    const std::vector<cx> z1 = {cx(1.0, 0.0)};
    CHECK(a_alpha(s, std::exp(-2.0), z1) == doctest::Approx(1.3130352854993312).epsilon(1e-12));

    // r -> 0 recovers A(0, z) = sum |mu| |z_j|^2
    const std::vector<cx> z = {cx(0.6, 0.8)};
    CHECK(a_alpha(s, 1e-9, z) == doctest::Approx(1.0).epsilon(1e-8));

    CHECK_THROWS_AS(a_alpha(s, 0.0, z), std::domain_error);
    CHECK_THROWS_AS(a_alpha(s, 1.0, z), std::domain_error);
}

TEST_CASE("szego kernel on the heisenberg group matches the two-point substitution") {
    // Eq. (2.3) with the counting measure on S^0 and alpha = -1, all |mu| = 1:
    // S(z,t) = 2^{n-1} n! / pi^{n+1} (|z|^2 + it)^{-(n+1)}
    Rng rng(3);
    QuadratureSpec spec;
    spec.rel_tol = 1e-11;
    for (int n : {1, 2}) {
        const QuadricForm q = Preset::heisenberg(n).quadric;
        for (int trial = 0; trial < 4; ++trial) {
            EvalPoint p;
            p.z = testutil::random_z(rng, n, 0.4, 1.5);
            p.t = {rng.uniform(-1.5, 1.5)};
            p.q = 0;
            double z2 = 0.0;
            for (const cx& v : p.z) z2 += std::norm(v);
            double fact = 1.0;
            for (int j = 2; j <= n; ++j) fact *= j;
            cx denom = 1.0;
            for (int j = 0; j <= n; ++j) denom *= cx(z2, p.t[0]);
            const cx want = std::pow(2.0, n - 1) * fact / std::pow(kPi, n + 1) / denom;
            const FormCoefficients fc = eval_szego(q, p, spec);
            CHECK(rel(fc.coeffs[0], want) < 1e-9);
            CHECK(fc.formula_used == KernelFormula::SZEGO);
        }
    }
}

TEST_CASE("szego kernel vanishes identically when no gamma cone exists") {
    EvalPoint p;
    p.z = {cx(0.7, 0.1), cx(-0.3, 0.5)};
    p.t = {0.4, -0.2};
    p.q = 0;
    const FormCoefficients fc = eval_szego(Preset::m2().quadric, p, {});
    CHECK(fc.coeffs[0] == cx{});
    CHECK(fc.converged);
}

TEST_CASE("formula branch agrees with the gamma detector") {
    QuadratureSpec spec;
    spec.rel_tol = 1e-6;
    EvalPoint p;
    p.z = {cx(0.8, 0.0), cx(0.2, -0.5)};
    p.t = {0.3, 0.1};
    p.q = 0;

    struct Case {
        Preset preset;
        KernelFormula want;
    };
    for (const auto& [preset, want] : {Case{Preset::m2(), KernelFormula::N_NO_SZEGO},
                                       Case{Preset::m3(), KernelFormula::N_NO_SZEGO},
                                       Case{Preset::m1(), KernelFormula::N_WITH_SZEGO}}) {
        const FormCoefficients fc = eval_green(preset.quadric, p, spec);
        CHECK(fc.formula_used == want);
        // cross-module consistency with the classifier
        SphereSampler s;
        s.m = 2;
        bool any = false;
        for (const MultiIndex& L : multi_indices(2, 0))
            any = any || gamma_report(preset.quadric, L, s).nonempty_positive_measure;
        CHECK((fc.formula_used == KernelFormula::N_WITH_SZEGO) == any);
    }
}

TEST_CASE("q=0 kernels pair conjugately under t -> -t") {
    QuadratureSpec spec;
    spec.rel_tol = 1e-8;
    Rng rng(7);
    for (const Preset& preset : {Preset::m2(), Preset::m3()}) {
        EvalPoint p;
        p.z = testutil::random_z(rng, 2, 0.5, 1.2);
        p.t = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        p.q = 0;
        EvalPoint pm = p;
        for (double& v : pm.t) v = -v;
        const FormCoefficients a = eval_green(preset.quadric, p, spec);
        const FormCoefficients b = eval_green(preset.quadric, pm, spec);
        CHECK(rel(b.coeffs[0], std::conj(a.coeffs[0])) < 1e-6);
    }
}

TEST_CASE("q=0 kernel is invariant under unitary conjugation of the form") {
    Rng rng(11);
    QuadratureSpec spec;
    spec.rel_tol = 1e-7;
    const int n = 2, m = 2;
    std::vector<CMatrix> mats = {testutil::random_hermitian(rng, n), testutil::random_hermitian(rng, n)};
    const QuadricForm q(n, m, mats);
    const CMatrix v = hermitian_eigen(testutil::random_hermitian(rng, n)).vectors;
    std::vector<CMatrix> cm;
    for (const CMatrix& a : mats) cm.push_back(v.adjoint() * a * v);
    const QuadricForm qc(n, m, std::move(cm));

    EvalPoint p;
    p.z = testutil::random_z(rng, n, 0.6, 1.2);
    p.t = {0.4, -0.7};
    p.q = 0;
    EvalPoint pc = p;
    pc.z = v.adjoint() * std::span<const cx>(p.z);

    const FormCoefficients a = eval_green(q, p, spec);
    const FormCoefficients b = eval_green(qc, pc, spec);
    CHECK(rel(b.coeffs[0], a.coeffs[0]) < 1e-5);
}

TEST_CASE("degree-one evaluation on the heisenberg group stays diagonal") {
    // U is the identity for every alpha, so C M = delta and the K' != K
    // coefficient must vanish.
    const QuadricForm h2 = Preset::heisenberg(2).quadric;
    QuadratureSpec spec;
    spec.rel_tol = 1e-9;
    EvalPoint p;
    p.z = {cx(0.7, -0.2), cx(0.4, 0.5)};
    p.t = {0.6};
    p.q = 1;
    p.K = MultiIndex(std::vector<int>{1});
    const FormCoefficients fc = eval_green(h2, p, spec);
    REQUIRE(fc.index_set.size() == 2);
    CHECK(std::abs(fc.coeff(MultiIndex(std::vector<int>{2}))) < 1e-12);
    const cx diag = fc.coeff(MultiIndex(std::vector<int>{1}));
    CHECK(std::abs(diag) > 0.0);
    CHECK(fc.converged);

    // parabolic homogeneity also holds per coefficient at q = 1
    EvalPoint pd = p;
    for (auto& zv : pd.z) zv *= 0.5;
    for (auto& tv : pd.t) tv *= 0.25;
    const FormCoefficients fd = eval_green(h2, pd, spec);
    const double power = -2.0 * (2 + 1 - 1);
    CHECK(rel(fd.coeff(MultiIndex(std::vector<int>{1})), std::pow(0.5, power) * diag) < 1e-6);
}

TEST_CASE("degree-one evaluation with a direction-dependent eigenbasis") {
    // M2 at q=1 has a full Gamma_{1} cone and genuinely alpha-dependent
    // minors; the evaluation must stay finite and converged.
    const QuadricForm m2 = Preset::m2().quadric;
    QuadratureSpec spec;
    spec.rel_tol = 1e-6;
    EvalPoint p;
    p.z = {cx(0.8, 0.1), cx(-0.4, 0.6)};
    p.t = {0.5, -0.3};
    p.q = 1;
    p.K = MultiIndex(std::vector<int>{1});
    const FormCoefficients fc = eval_green(m2, p, spec);
    CHECK(fc.converged);
    CHECK(fc.formula_used == KernelFormula::N_WITH_SZEGO);
    for (const cx& c : fc.coeffs) {
        CHECK(std::isfinite(c.real()));
        CHECK(std::isfinite(c.imag()));
    }
}

TEST_CASE("domain errors at the kernel singularities") {
    const QuadricForm m2 = Preset::m2().quadric;
    EvalPoint origin;
    origin.z = {cx{}, cx{}};
    origin.t = {0.0, 0.0};
    origin.q = 0;
    CHECK_THROWS_AS(eval_green(m2, origin, {}), std::domain_error);
    CHECK_THROWS_AS(eval_szego(m2, origin, {}), std::domain_error);

    EvalPoint zslice;
    zslice.z = {cx{}, cx{}};
    zslice.t = {1.0, 0.0};
    zslice.q = 0;
    CHECK_THROWS_AS(eval_green(m2, zslice, {}), std::domain_error);

    EvalPoint bad;
    bad.z = {cx(1.0, 0.0)};
    bad.t = {0.0, 0.0};
    bad.q = 0;
    CHECK_THROWS_AS(eval_green(m2, bad, {}), std::invalid_argument);
}

TEST_CASE("m3 cross-parameterization at one point (fast variant)") {
    QuadratureSpec spec;
    spec.rel_tol = 1e-6;
    EvalPoint p;
    p.z = {cx(0.7, 0.2), cx(-0.4, 0.5)};
    p.t = {0.3, -0.6};
    p.q = 0;
    const FormCoefficients fc = eval_green(Preset::m3().quadric, p, spec);
    const ClosedFormResult cf = m3_corollary(p.z, p.t, 1e-7);
    CHECK(rel(fc.coeffs[0], cf.value) < 1e-4);
}

TEST_CASE("top-degree heisenberg kernel matches its closed form") {
    // exercises the q = n path: top minors, epsilon bookkeeping for the full
    // index, and the conjugate closed-form variant
    Rng rng(41);
    QuadratureSpec spec;
    spec.rel_tol = 1e-9;
    for (int n : {1, 2, 3}) {
        const Preset pre = Preset::heisenberg(n);
        EvalPoint p;
        p.z = testutil::random_z(rng, n, 0.4, 1.4);
        p.t = {rng.uniform(-1.5, 1.5)};
        p.q = n;
        std::vector<int> full(n);
        for (int i = 0; i < n; ++i) full[i] = i + 1;
        p.K = MultiIndex(full);
        const FormCoefficients fc = eval_green(pre.quadric, p, spec);
        const cx want = heisenberg_N(n, true, p.z, p.t[0]);
        CHECK(fc.converged);
        CHECK(rel(fc.coeff(p.K), want) < 1e-9);
    }
}

TEST_CASE("m = 3 szego kernel factors over a triple heisenberg product") {
    // exercises the product-spherical rule with structural sweep splitting
    const Preset pre = Preset::product_heisenberg(std::vector<int>{1, 1, 1});
    EvalPoint p;
    p.z = {cx(0.9, 0.1), cx(-0.5, 0.7), cx(0.4, -0.6)};
    p.t = {0.4, -0.9, 0.2};
    p.q = 0;
    cx want = 1.0;
    for (int j = 0; j < 3; ++j) {
        const cx a(std::norm(p.z[j]), p.t[j]);
        want *= 1.0 / (kPi * kPi * a * a);
    }
    QuadratureSpec spec;
    spec.rel_tol = 1e-9;
    const FormCoefficients fc = eval_szego(pre.quadric, p, spec);
    CHECK(fc.converged);
    CHECK(rel(fc.coeffs[0], want) < 1e-8);
}

TEST_CASE("minors collapse to deltas for a direction-independent eigenbasis") {
    // diagonal descending quadric: U = I at every direction, so C = M = delta
    CMatrix d(3, 3);
    d(0, 0) = 3.0;
    d(1, 1) = 2.0;
    d(2, 2) = 1.0;
    const QuadricForm q(3, 1, {d});
    const double one[1] = {1.0};
    const SpectralData s = spectral(q, one);
    for (const MultiIndex& K : multi_indices(3, 2))
        for (const MultiIndex& L : multi_indices(3, 2)) {
            const double want = (K == L) ? 1.0 : 0.0;
            CHECK(std::abs(minor_coefficient(s, K, L) - want) < 1e-14);
            CHECK(std::abs(inverse_minor(s, L, K) - want) < 1e-14);
        }
}

TEST_CASE("formula branch matches the gamma detector on random quadrics") {
    Rng rng(29);
    QuadratureSpec spec;
    spec.rel_tol = 1e-5;
    SphereSampler sampler;
    sampler.m = 2;
    sampler.density = 512;
    for (int trial = 0; trial < 3; ++trial) {
        const QuadricForm q(2, 2,
                            {testutil::random_hermitian(rng, 2), testutil::random_hermitian(rng, 2)});
        EvalPoint p;
        p.z = testutil::random_z(rng, 2, 0.6, 1.2);
        p.t = {rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)};
        p.q = 0;
        const FormCoefficients fc = eval_green(q, p, spec);
        bool any = false;
        for (const MultiIndex& L : multi_indices(2, 0))
            any = any || gamma_report(q, L, sampler).nonempty_positive_measure;
        CHECK((fc.formula_used == KernelFormula::N_WITH_SZEGO) == any);
    }
}

TEST_CASE("batch evaluation matches pointwise and runs threaded") {
    const QuadricForm m2 = Preset::m2().quadric;
    QuadratureSpec spec;
    spec.rel_tol = 1e-6;
    std::vector<EvalPoint> pts;
    Rng rng(19);
    for (int i = 0; i < 4; ++i) {
        EvalPoint p;
        p.z = testutil::random_z(rng, 2, 0.5, 1.2);
        p.t = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        p.q = 0;
        pts.push_back(std::move(p));
    }
    const auto seq = eval_green_batch(m2, pts, spec, 1);
    const auto par = eval_green_batch(m2, pts, spec, 4);
    REQUIRE(seq.size() == par.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        CHECK(seq[i].coeffs[0] == par[i].coeffs[0]);  // bit-identical: same work per point
    }
}

TEST_SUITE_END();
