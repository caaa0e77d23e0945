// linalg.hpp — small dense complex matrices, Hermitian Jacobi eigensolver,
// determinants. Everything here is sized for n <= ~8; no attempt is made to
// scale beyond that.

#pragma once

#include <complex>
#include <span>
#include <vector>

namespace quadric {

using cx = std::complex<double>;

class CMatrix {
public:
    CMatrix() = default;
    CMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {}

    static CMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    cx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    const cx& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    CMatrix adjoint() const;
    CMatrix conjugate() const;
    double max_abs() const;            // max entry magnitude
    double max_abs_offdiag() const;

    bool operator==(const CMatrix& o) const = default;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<cx> a_;
};

CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator+(const CMatrix& a, const CMatrix& b);
CMatrix operator-(const CMatrix& a, const CMatrix& b);
CMatrix operator*(cx s, const CMatrix& a);
std::vector<cx> operator*(const CMatrix& a, std::span<const cx> v);

// Eigen-decomposition of a Hermitian matrix. Eigenvalues are sorted
// descending; vectors.column(j) pairs with values[j]. Each column's phase is
// fixed so that its largest-magnitude entry is real positive (ties broken by
// lowest row index).
struct EigenSystem {
    std::vector<double> values;
    CMatrix vectors;
    int sweeps = 0;
};

// Cyclic complex Jacobi rotations; deterministic sweep order. Throws
// std::runtime_error if the off-diagonal has not collapsed within max_sweeps.
EigenSystem hermitian_eigen(const CMatrix& a, int max_sweeps = 50);

// Determinant via partially pivoted LU (on a copy).
cx det(CMatrix a);

// Determinant of the submatrix with the given (0-based) rows and columns.
cx submatrix_det(const CMatrix& a, std::span<const int> rows, std::span<const int> cols);

}  // namespace quadric
