#include "quadric/levi.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace quadric {

QuadricForm::QuadricForm(int n_, int m_, std::vector<CMatrix> mats) : n(n_), m(m_), A(std::move(mats)) {
    if (n < 1 || m < 1) throw std::invalid_argument("QuadricForm: need n >= 1 and m >= 1");
    if (static_cast<int>(A.size()) != m)
        throw std::invalid_argument("QuadricForm: expected " + std::to_string(m) + " matrices, got " +
                                    std::to_string(A.size()));
    for (int j = 0; j < m; ++j) {
        const CMatrix& a = A[j];
        if (a.rows() != n || a.cols() != n)
            throw std::invalid_argument("QuadricForm: matrix " + std::to_string(j + 1) + " is not " +
                                        std::to_string(n) + "x" + std::to_string(n));
        const double asym = (a - a.adjoint()).max_abs();
        if (asym > kHermitianTol * std::max(a.max_abs(), 1e-300) && asym > 0.0)
            throw std::invalid_argument("QuadricForm: matrix " + std::to_string(j + 1) +
                                        " is not Hermitian (max asymmetry " + std::to_string(asym) + ")");
    }
}

MultiIndex::MultiIndex(std::vector<int> e) : entries(std::move(e)) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i] < 1) throw std::invalid_argument("MultiIndex: entries must be >= 1");
        if (i > 0 && entries[i] <= entries[i - 1])
            throw std::invalid_argument("MultiIndex: entries must be strictly increasing");
    }
}

bool MultiIndex::contains(int j) const {
    for (int e : entries)
        if (e == j) return true;
    return false;
}

std::string MultiIndex::to_string() const {
    if (entries.empty()) return "-";
    std::string s;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i) s += '|';
        s += std::to_string(entries[i]);
    }
    return s;
}

std::vector<MultiIndex> multi_indices(int n, int q) {
    if (q < 0 || q > n) throw std::invalid_argument("multi_indices: need 0 <= q <= n");
    std::vector<MultiIndex> out;
    std::vector<int> cur(q);
    for (int i = 0; i < q; ++i) cur[i] = i + 1;
    while (true) {
        out.push_back(MultiIndex(cur));
        if (q == 0) break;
        int i = q - 1;
        while (i >= 0 && cur[i] == n - (q - 1 - i)) --i;
        if (i < 0) break;
        ++cur[i];
        for (int k = i + 1; k < q; ++k) cur[k] = cur[k - 1] + 1;
    }
    return out;
}

bool SpectralData::is_zero(int slot) const { return std::abs(mu[slot]) <= zero_tol_abs; }

int SpectralData::sign_of(int slot) const {
    if (is_zero(slot)) return 0;
    return mu[slot] > 0.0 ? 1 : -1;
}

CMatrix assemble_directional(const QuadricForm& q, std::span<const double> lambda) {
    if (static_cast<int>(lambda.size()) != q.m)
        throw std::invalid_argument("assemble_directional: lambda has length " + std::to_string(lambda.size()) +
                                    ", expected m = " + std::to_string(q.m));
    for (double l : lambda)
        if (!std::isfinite(l)) throw std::invalid_argument("assemble_directional: lambda must be finite");
    CMatrix r(q.n, q.n);
    for (int j = 0; j < q.m; ++j)
        if (lambda[j] != 0.0) r = r + cx(lambda[j], 0.0) * q.A[j];
    return r;
}

SpectralData spectral(const QuadricForm& q, std::span<const double> alpha, double zero_tol) {
    double norm2 = 0.0;
    for (double a : alpha) norm2 += a * a;
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12)
        throw std::invalid_argument("spectral: alpha must be a unit vector");

    const CMatrix a = assemble_directional(q, alpha);
    EigenSystem es = hermitian_eigen(a);

    SpectralData s;
    s.alpha.assign(alpha.begin(), alpha.end());
    s.mu = std::move(es.values);
    s.U = std::move(es.vectors);
    s.zero_tol_abs = zero_tol * a.max_abs();
    for (int j = 0; j < q.n; ++j) {
        const int sg = s.sign_of(j);
        if (sg > 0) ++s.n_plus;
        if (sg < 0) ++s.n_minus;
    }
    s.nu = s.n_plus + s.n_minus;
    return s;
}

std::vector<cx> eigen_coordinates(const SpectralData& s, std::span<const cx> z) {
    return s.U.adjoint() * z;
}

namespace {

std::vector<int> zero_based(const MultiIndex& idx) {
    std::vector<int> v(idx.entries.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = idx.entries[i] - 1;
    return v;
}

}  // namespace

cx minor_coefficient(const SpectralData& s, const MultiIndex& K, const MultiIndex& L) {
    if (K.q() != L.q()) throw std::invalid_argument("minor_coefficient: |K| != |L|");
    const int q = K.q();
    if (q == 0 || q == s.n()) return cx(1.0, 0.0);
    const auto rows = zero_based(K);
    const auto cols = zero_based(L);
    return submatrix_det(s.U.conjugate(), rows, cols);
}

cx inverse_minor(const SpectralData& s, const MultiIndex& L, const MultiIndex& K_out) {
    if (L.q() != K_out.q()) throw std::invalid_argument("inverse_minor: |L| != |K_out|");
    const int q = L.q();
    if (q == 0 || q == s.n()) return cx(1.0, 0.0);
    const auto rows = zero_based(K_out);
    const auto cols = zero_based(L);
    return submatrix_det(s.U, rows, cols);
}

}  // namespace quadric
