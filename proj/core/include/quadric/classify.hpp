// classify.hpp — the Peloso–Ricci solvability/hypoellipticity criterion per
// form degree, the Gamma_L sign-cone detector, and the epsilon sign twists.
// Decisions are made over a deterministic sphere sample (always including
// the coordinate directions, where degenerate signatures live) refined by
// bisection across detected signature changes; the sample density is
// recorded so results are auditable.

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "quadric/levi.hpp"

namespace quadric {

struct SphereSampler {
    int m = 1;
    int density = 2048;      // base sample size (per sweep for m >= 3)
    std::uint64_t seed = 0;  // rotates the base sample; 0 keeps canonical points
    int refine_steps = 48;   // bisection depth across signature changes
    double zero_tol = 1e-10;

    std::vector<std::vector<double>> base_points() const;
};

struct DegreeClassification {
    int q = 0;
    bool solvable = false;
    bool hypoelliptic = false;
    std::optional<std::vector<double>> witness;  // alpha violating the failed condition(s)
    int samples_used = 0;
};

struct GammaReport {
    MultiIndex L;
    bool nonempty_positive_measure = false;
    std::vector<std::vector<double>> sample_points;  // up to 32 members found
    double sphere_fraction_estimate = 0.0;
    int samples_used = 0;
};

DegreeClassification classify_degree(const QuadricForm& Q, int q, const SphereSampler& sampler);

// All (n_plus, n_minus) signatures attained over the sample.
std::set<std::pair<int, int>> signature_set(const QuadricForm& Q, const SphereSampler& sampler);

GammaReport gamma_report(const QuadricForm& Q, const MultiIndex& L, const SphereSampler& sampler);

// epsilon_{j,L}: sgn(mu_j) on L, -sgn(mu_j) off L, listed for the nu nonzero
// eigenvalue slots in descending-eigenvalue order.
std::vector<int> epsilon_signs(const SpectralData& S, const MultiIndex& L);

// Strict Gamma_L membership test for one direction: every eigenvalue clear of
// the zero tolerance, positive exactly on the slots named by L.
bool in_gamma(const SpectralData& S, const MultiIndex& L);

}  // namespace quadric
