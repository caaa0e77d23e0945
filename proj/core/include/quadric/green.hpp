// green.hpp — numerical evaluation of the complex Green operator kernel and
// the Szegő projection kernel of the Kohn Laplacian on a quadric, as
// (0,q)-form coefficients in the fixed dz̄ basis. The radial integral is
// tanh-sinh over (0,1); the sphere integral splits panels at eigenvalue sign
// changes and crossings, where the eigenvector field (and hence the minor
// weights) can kink.

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "quadric/classify.hpp"
#include "quadric/levi.hpp"
#include "quadric/quadrature.hpp"

namespace quadric {

enum class KernelFormula { N_NO_SZEGO, N_WITH_SZEGO, SZEGO };
const char* to_string(KernelFormula f);

struct EvalPoint {
    std::vector<cx> z;
    std::vector<double> t;
    int q = 0;
    MultiIndex K;
};

struct FormCoefficients {
    std::vector<MultiIndex> index_set;  // I_q, lexicographic
    std::vector<cx> coeffs;             // coefficient of dz̄^{K'}
    std::vector<double> abs_error;
    KernelFormula formula_used = KernelFormula::N_NO_SZEGO;
    bool converged = true;

    cx coeff(const MultiIndex& k_prime) const;
};

enum class SphereRule { AUTO, TWO_POINT, ADAPTIVE_ANGLES, PRODUCT_SPHERICAL };

struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-14;
    int max_panels = 2000;
    SphereRule sphere_rule = SphereRule::AUTO;
    double crossing_split_tol = 1e-7;  // relative eigen-gap threshold for panel breaks
    int scan_density = 2048;           // break/cone detection scan on the sphere
    double zero_tol = 1e-10;
    int max_level = 11;                // tanh-sinh level budget

    bool operator==(const QuadratureSpec&) const = default;
};

// A_alpha(r, z^alpha): the full-rank sum plus the 2|z''|^2/|log r| term for
// the slots whose eigenvalue is below the zero tolerance.
double a_alpha(const SpectralData& S, double r, std::span<const cx> z_alpha);

FormCoefficients eval_szego(const QuadricForm& Q, const EvalPoint& P, const QuadratureSpec& spec = {});
FormCoefficients eval_green(const QuadricForm& Q, const EvalPoint& P, const QuadratureSpec& spec = {});

// Points are independent; batches run them concurrently (deterministically —
// each point's quadrature is self-contained).
std::vector<FormCoefficients> eval_green_batch(const QuadricForm& Q, std::span<const EvalPoint> pts,
                                               const QuadratureSpec& spec, int threads);
std::vector<FormCoefficients> eval_szego_batch(const QuadricForm& Q, std::span<const EvalPoint> pts,
                                               const QuadratureSpec& spec, int threads);

// Tanh-sinh on (0,1); the integrand receives r and an accurately computed
// 1 - r. Endpoints are never evaluated.
QuadResult integrate_r(const std::function<cx(double r, double one_minus_r)>& f,
                       const QuadratureSpec& spec = {});

// Sphere integral of a scalar integrand: counting measure on S^0, adaptive
// panels with eigen-structure breaks on S^1, product spherical coordinates
// with per-sweep splitting for m >= 3.
QuadResult integrate_sphere(const std::function<cx(std::span<const double> alpha)>& g, const QuadricForm& Q,
                            const QuadratureSpec& spec = {});

// Panel boundaries on S^1: eigenvalue sign changes, degenerate directions,
// and eigenvalue-crossing gap minima. Sorted, starts at 0, ends at 2*pi.
std::vector<double> sphere_breaks_m2(const QuadricForm& Q, const QuadratureSpec& spec = {});

// The fixed-direction radial slice of the Green kernel for one component L:
// constant * int_0^1 W_L (A_alpha - i alpha.t)^{-(n+m-1)} dr/r, with the
// subtracted Gamma_L bracket when alpha lies in Gamma_L. This is the
// tau-integrated form of int_0^inf [H~_L - S~_L] ds at lambda = alpha*tau,
// which the heat bridge cross-checks.
struct RadialSlice {
    cx value{};
    double abs_error = 0.0;
    bool converged = false;
};
RadialSlice green_radial_slice(const QuadricForm& Q, const MultiIndex& L, std::span<const cx> z,
                               std::span<const double> t, std::span<const double> alpha,
                               const QuadratureSpec& spec = {});

}  // namespace quadric
