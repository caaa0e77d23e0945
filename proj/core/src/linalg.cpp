#include "quadric/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace quadric {

CMatrix CMatrix::identity(int n) {
    CMatrix I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

CMatrix CMatrix::adjoint() const {
    CMatrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

CMatrix CMatrix::conjugate() const {
    CMatrix r(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r(i, j) = std::conj((*this)(i, j));
    return r;
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (const cx& v : a_) m = std::max(m, std::abs(v));
    return m;
}

double CMatrix::max_abs_offdiag() const {
    double m = 0.0;
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            if (i != j) m = std::max(m, std::abs((*this)(i, j)));
    return m;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("CMatrix multiply: shape mismatch");
    CMatrix r(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const cx aik = a(i, k);
            if (aik == cx{}) continue;
            for (int j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

CMatrix operator+(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("CMatrix add: shape mismatch");
    CMatrix r(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
    return r;
}

CMatrix operator-(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("CMatrix sub: shape mismatch");
    CMatrix r(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
    return r;
}

CMatrix operator*(cx s, const CMatrix& a) {
    CMatrix r(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(i, j) = s * a(i, j);
    return r;
}

std::vector<cx> operator*(const CMatrix& a, std::span<const cx> v) {
    if (a.cols() != static_cast<int>(v.size())) throw std::invalid_argument("CMatrix apply: shape mismatch");
    std::vector<cx> r(a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        cx acc{};
        for (int j = 0; j < a.cols(); ++j) acc += a(i, j) * v[j];
        r[i] = acc;
    }
    return r;
}

namespace {

// One complex Jacobi rotation zeroing b(p,q). The 2x2 block
// [[a, b],[conj(b), d]] is reduced to the real symmetric case by the phase of
// b, then rotated by the classic smaller-angle Givens choice.
void jacobi_rotate(CMatrix& b, CMatrix& u, int p, int q) {
    const cx bpq = b(p, q);
    const double h = std::abs(bpq);
    if (h == 0.0) return;
    const cx phase = std::conj(bpq) / h;  // e^{-i arg(b_pq)}
    const double app = b(p, p).real();
    const double aqq = b(q, q).real();
    const double tau = (aqq - app) / (2.0 * h);
    double t;
    if (tau >= 0.0)
        t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
    else
        t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    const int n = b.rows();
    // Columns p, q of B and U:  (col_p, col_q) <- (c*col_p - s*phase*col_q, s*col_p + c*phase*col_q)
    for (int i = 0; i < n; ++i) {
        const cx bip = b(i, p), biq = b(i, q);
        b(i, p) = c * bip - s * phase * biq;
        b(i, q) = s * bip + c * phase * biq;
        const cx uip = u(i, p), uiq = u(i, q);
        u(i, p) = c * uip - s * phase * uiq;
        u(i, q) = s * uip + c * phase * uiq;
    }
    // Rows p, q of B (conjugated rotation from the left).
    for (int j = 0; j < n; ++j) {
        const cx bpj = b(p, j), bqj = b(q, j);
        b(p, j) = c * bpj - s * std::conj(phase) * bqj;
        b(q, j) = s * bpj + c * std::conj(phase) * bqj;
    }
    b(p, q) = 0.0;
    b(q, p) = 0.0;
    b(p, p) = cx(b(p, p).real(), 0.0);
    b(q, q) = cx(b(q, q).real(), 0.0);
}

}  // namespace

EigenSystem hermitian_eigen(const CMatrix& a, int max_sweeps) {
    if (a.rows() != a.cols()) throw std::invalid_argument("hermitian_eigen: matrix not square");
    const int n = a.rows();
    CMatrix b = a;
    CMatrix u = CMatrix::identity(n);
    const double scale = std::max(a.max_abs(), 1e-300);
    const double tol = 1e-15 * scale;

    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        if (b.max_abs_offdiag() <= tol) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q)
                if (std::abs(b(p, q)) > tol * 1e-2) jacobi_rotate(b, u, p, q);
    }
    if (b.max_abs_offdiag() > tol)
        throw std::runtime_error("hermitian_eigen: iteration budget of " + std::to_string(max_sweeps) +
                                 " sweeps exceeded (off-diagonal " + std::to_string(b.max_abs_offdiag()) + ")");

    // Sort descending, stable for ties.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return b(i, i).real() > b(j, j).real(); });

    EigenSystem out;
    out.values.resize(n);
    out.vectors = CMatrix(n, n);
    out.sweeps = sweep;
    for (int j = 0; j < n; ++j) {
        out.values[j] = b(order[j], order[j]).real();
        for (int i = 0; i < n; ++i) out.vectors(i, j) = u(i, order[j]);
    }
    // Phase convention: largest-magnitude entry of each column real positive.
    for (int j = 0; j < n; ++j) {
        int imax = 0;
        double best = -1.0;
        for (int i = 0; i < n; ++i) {
            const double m = std::abs(out.vectors(i, j));
            if (m > best) {  // strict: ties keep the lowest row index
                best = m;
                imax = i;
            }
        }
        const cx piv = out.vectors(imax, j);
        if (std::abs(piv) > 0.0) {
            const cx ph = std::conj(piv) / std::abs(piv);
            for (int i = 0; i < n; ++i) out.vectors(i, j) *= ph;
            out.vectors(imax, j) = cx(std::abs(piv), 0.0);
        }
    }
    return out;
}

cx det(CMatrix a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("det: matrix not square");
    const int n = a.rows();
    if (n == 0) return cx(1.0, 0.0);
    cx d(1.0, 0.0);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(a(k, k));
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                piv = i;
            }
        if (best == 0.0) return cx(0.0, 0.0);
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            d = -d;
        }
        d *= a(k, k);
        for (int i = k + 1; i < n; ++i) {
            const cx f = a(i, k) / a(k, k);
            for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return d;
}

cx submatrix_det(const CMatrix& a, std::span<const int> rows, std::span<const int> cols) {
    if (rows.size() != cols.size()) throw std::invalid_argument("submatrix_det: index length mismatch");
    const int q = static_cast<int>(rows.size());
    CMatrix s(q, q);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) s(i, j) = a(rows[i], cols[j]);
    return det(std::move(s));
}

}  // namespace quadric
