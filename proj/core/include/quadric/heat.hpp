// heat.hpp — the Fourier-domain heat kernel of the Kohn Laplacian on a
// quadric, the s -> inf Szegő transform, the transformed operator's finite
// difference residual, and the s-integral producing the transformed relative
// fundamental solution. These are the verification bridge for the (r, alpha)
// evaluator.

#pragma once

#include <span>
#include <vector>

#include "quadric/levi.hpp"

namespace quadric {

struct TransformPoint {
    std::vector<cx> z_alpha;        // coordinates in the descending eigenbasis
    std::vector<double> lambda;     // nonzero Fourier dual of t
    double s = 0.0;                 // heat time
    MultiIndex L;
};

// Precomputed spectral data for a fixed (lambda, L): everything the kernel
// formulas need per evaluation. Slots follow the descending eigenvalue order
// of spectral().
struct HeatContext {
    int n = 0, m = 0, nu = 0;
    std::vector<double> mu_lambda;   // signed mu_j^lambda per slot, length n
    std::vector<double> mu_abs_nz;   // |mu^lambda| per nonzero slot
    std::vector<int> eps_nz;         // epsilon_{j,L} per nonzero slot
    std::vector<int> nonzero_slots;  // 0-based
    std::vector<int> zero_slots;
    bool gamma_member = false;       // alpha in Gamma_L
    double lambda_norm = 0.0;
};

HeatContext make_heat_context(const QuadricForm& Q, const MultiIndex& L, std::span<const double> lambda,
                              double zero_tol = 1e-10);

// H~_L(s, z^alpha, lambda^): abs_z2[j] = |z_j^alpha|^2 per slot. Requires s > 0.
double heat_value(const HeatContext& ctx, std::span<const double> abs_z2, double s);

// S~_L(z^alpha, lambda^): the s -> inf limit on Gamma_L, identically 0 off it.
double szego_value(const HeatContext& ctx, std::span<const double> abs_z2);

double heat_transform(const QuadricForm& Q, const TransformPoint& T);
double szego_transform(const QuadricForm& Q, const MultiIndex& L, std::span<const cx> z_alpha,
                       std::span<const double> lambda);

// Evaluation lattice for the PDE residual: points_per_axis samples per real
// coordinate over [-extent, extent]^{2n}, with fd_step the central-difference
// stencil step in space. The s-derivative uses fd_step/4, which balances the
// larger s-curvature of the kernel; the residual stays O(fd_step^2).
struct GridSpec {
    double extent = 1.0;
    int points_per_axis = 5;
    double fd_step = 1e-3;
};

// max |d_s H~ + Box H~| / max |H~| over the lattice and s_values, with the
// transformed operator applied by second-order central differences.
double box_transformed_residual(const QuadricForm& Q, const MultiIndex& L, std::span<const double> lambda,
                                const GridSpec& grid, std::span<const double> s_values);

struct TailIntegral {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = false;
};

// N~_L(z^alpha, lambda^) = int_0^inf [H~ - S~] ds, split at s_cut with the
// substitution u = e^{-s} on the tail. Reports a domain error for z = 0
// (the integrand diverges at s -> 0 there).
TailIntegral n_transform_from_heat(const QuadricForm& Q, const MultiIndex& L, std::span<const cx> z_alpha,
                                   std::span<const double> lambda, double s_cut = 1.0,
                                   double tail_tol = 1e-10);

}  // namespace quadric
