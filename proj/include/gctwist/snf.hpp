#pragma once

#include <utility>
#include <vector>

#include "gctwist/errors.hpp"
#include "gctwist/rational.hpp"

namespace gctwist {

/// Dense integer matrix over arbitrary-precision integers.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, Int(0)) {}

    static IntMatrix identity(std::size_t n) {
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return a_.empty(); }
    Int& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Int& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    void swap_rows(std::size_t i, std::size_t j) {
        for (std::size_t k = 0; k < cols_; ++k) std::swap((*this)(i, k), (*this)(j, k));
    }
    void swap_cols(std::size_t i, std::size_t j) {
        for (std::size_t k = 0; k < rows_; ++k) std::swap((*this)(k, i), (*this)(k, j));
    }
    void add_row(std::size_t dst, std::size_t src, const Int& f) {  // row dst += f * row src
        for (std::size_t k = 0; k < cols_; ++k) (*this)(dst, k) += f * (*this)(src, k);
    }
    void add_col(std::size_t dst, std::size_t src, const Int& f) {
        for (std::size_t k = 0; k < rows_; ++k) (*this)(k, dst) += f * (*this)(k, src);
    }
    void negate_row(std::size_t i) {
        for (std::size_t k = 0; k < cols_; ++k) (*this)(i, k) = -(*this)(i, k);
    }

    std::vector<Int> row(std::size_t i) const {
        std::vector<Int> out(cols_);
        for (std::size_t k = 0; k < cols_; ++k) out[k] = (*this)(i, k);
        return out;
    }

    std::vector<Int> mul_vec(const std::vector<Int>& v) const {
        std::vector<Int> out(rows_, Int(0));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if ((*this)(i, j) != 0) out[i] += (*this)(i, j) * v[j];
        return out;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Int> a_;
};

/// Smith normal form  U * A * V = S  with U, V unimodular and the diagonal
/// of S satisfying s_1 | s_2 | ... .
///
/// U costs O(rows^2) memory, so it is only built on request; a right-hand
/// side can be threaded through the row operations instead, which is all a
/// solvability test needs. V (cols x cols) is always produced.
struct SmithForm {
    IntMatrix U;  // empty unless requested
    IntMatrix S;
    IntMatrix V;
    std::size_t rank = 0;
    std::vector<Int> rhs;  // U * (input rhs), when one was supplied

    const Int& diag(std::size_t i) const { return S(i, i); }
};

inline SmithForm smith_normal_form(IntMatrix A, bool with_U = true, const std::vector<Int>* rhs_in = nullptr) {
    const std::size_t m = A.rows(), n = A.cols();
    SmithForm out;
    if (with_U) out.U = IntMatrix::identity(m);
    out.V = IntMatrix::identity(n);
    if (rhs_in) out.rhs = *rhs_in;

    auto abs_int = [](const Int& x) { return x < 0 ? Int(-x) : x; };
    auto row_swap = [&](std::size_t i, std::size_t j) {
        A.swap_rows(i, j);
        if (with_U) out.U.swap_rows(i, j);
        if (rhs_in) std::swap(out.rhs[i], out.rhs[j]);
    };
    auto row_add = [&](std::size_t dst, std::size_t src, const Int& f) {
        A.add_row(dst, src, f);
        if (with_U) out.U.add_row(dst, src, f);
        if (rhs_in) out.rhs[dst] += f * out.rhs[src];
    };
    auto row_negate = [&](std::size_t i) {
        A.negate_row(i);
        if (with_U) out.U.negate_row(i);
        if (rhs_in) out.rhs[i] = -out.rhs[i];
    };

    std::size_t t = 0;
    while (t < m && t < n) {
        // Smallest nonzero magnitude in the trailing block keeps
        // coefficient growth down.
        std::size_t pi = t, pj = t;
        bool found = false;
        Int best(0);
        for (std::size_t i = t; i < m; ++i)
            for (std::size_t j = t; j < n; ++j)
                if (A(i, j) != 0 && (!found || abs_int(A(i, j)) < best)) {
                    best = abs_int(A(i, j));
                    pi = i;
                    pj = j;
                    found = true;
                }
        if (!found) break;
        if (pi != t) row_swap(t, pi);
        if (pj != t) {
            A.swap_cols(t, pj);
            out.V.swap_cols(t, pj);
        }

        bool clean = false;
        while (!clean) {
            clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (A(i, t) == 0) continue;
                Int q = A(i, t) / A(t, t);
                row_add(i, t, -q);
                if (A(i, t) != 0) {  // remainder is the new, smaller pivot
                    row_swap(t, i);
                    clean = false;
                }
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (A(t, j) == 0) continue;
                Int q = A(t, j) / A(t, t);
                A.add_col(j, t, -q);
                out.V.add_col(j, t, -q);
                if (A(t, j) != 0) {
                    A.swap_cols(t, j);
                    out.V.swap_cols(t, j);
                    clean = false;
                }
            }
        }

        if (A(t, t) < 0) row_negate(t);

        // Divisibility: fold a bad entry's row into the pivot row and redo.
        bool divides = true;
        for (std::size_t i = t + 1; i < m && divides; ++i)
            for (std::size_t j = t + 1; j < n && divides; ++j)
                if (A(i, j) % A(t, t) != 0) {
                    row_add(t, i, 1);
                    divides = false;
                }
        if (divides) ++t;
    }

    out.rank = t;
    out.S = std::move(A);
    return out;
}

}  // namespace gctwist
