// levi.hpp — the vector-valued Levi form of a quadric CR submanifold and its
// directional spectral data: eigenvalues, eigen-coordinates, and the minor
// determinants that translate between the fixed dz̄ basis and the
// direction-dependent eigenbasis of (0,1)-covectors.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "quadric/linalg.hpp"

namespace quadric {

// Levi form of M = {Im w = phi(z,z)} ⊂ ℂⁿ×ℂᵐ as m Hermitian n×n matrices,
// phi_j(z,z') = z^* A^j z'.
struct QuadricForm {
    int n = 0;  // complex dimension of z
    int m = 0;  // codimension
    std::vector<CMatrix> A;

    QuadricForm() = default;
    // Validates shapes and Hermitian-ness (to 1e-12 of each matrix's max
    // entry magnitude). Throws std::invalid_argument.
    QuadricForm(int n, int m, std::vector<CMatrix> mats);

    bool operator==(const QuadricForm&) const = default;

    static constexpr double kHermitianTol = 1e-12;
};

// Strictly increasing q-tuple of indices in 1..n. The empty tuple (q = 0) is
// allowed and indexes scalar-valued (0,0)-currents.
struct MultiIndex {
    std::vector<int> entries;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> e);  // validates strict increase, entries >= 1

    int q() const { return static_cast<int>(entries.size()); }
    bool contains(int j) const;
    std::string to_string() const;  // "1|3|4"; "-" for the empty tuple

    auto operator<=>(const MultiIndex&) const = default;
};

// I_q: all increasing q-tuples in 1..n, lexicographic.
std::vector<MultiIndex> multi_indices(int n, int q);

// Spectral data of the directional Levi form A^alpha for a unit direction
// alpha ∈ S^{m-1}. Eigenvalues are sorted descending and U's column j holds
// the eigenvector paired with mu[j]; columns are phase-fixed so the
// largest-magnitude entry is real positive. Eigenvalues with
// |mu| <= zero_tol * max|A^alpha| count as zero for nu / n_plus / n_minus.
struct SpectralData {
    std::vector<double> alpha;
    std::vector<double> mu;
    CMatrix U;
    double zero_tol_abs = 0.0;
    int nu = 0;
    int n_plus = 0;
    int n_minus = 0;

    int n() const { return static_cast<int>(mu.size()); }
    bool is_zero(int slot) const;  // slot is 0-based
    int sign_of(int slot) const;   // +1 / -1 / 0 under the zero tolerance
};

// A^lambda = sum_j lambda_j A^j (any finite lambda, not necessarily unit).
CMatrix assemble_directional(const QuadricForm& q, std::span<const double> lambda);

// Spectral data in the direction alpha; requires |alpha| = 1 within 1e-12.
SpectralData spectral(const QuadricForm& q, std::span<const double> alpha, double zero_tol = 1e-10);

// z^alpha = (U^alpha)^* z.
std::vector<cx> eigen_coordinates(const SpectralData& s, std::span<const cx> z);

// C_{K,L}(alpha): dz̄^K = sum_L C_{K,L} dZ̄(z,alpha)^L; the minor of conj(U)
// with rows K and columns L. Top and bottom degree use the scalar convention
// C = 1 (the dZ̄ basis absorbs the unimodular determinant phase).
cx minor_coefficient(const SpectralData& s, const MultiIndex& K, const MultiIndex& L);

// M_{K',L}(alpha): dZ̄(z,alpha)^L = sum_{K'} M_{K',L} dz̄^{K'}; the minor of U
// with rows K' and columns L. Satisfies sum_L C_{K,L} M_{K',L} = delta_{K,K'}.
cx inverse_minor(const SpectralData& s, const MultiIndex& L, const MultiIndex& K_out);

}  // namespace quadric
