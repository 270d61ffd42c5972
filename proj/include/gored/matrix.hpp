#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gored/common.hpp"
#include "gored/field.hpp"

namespace gored {

/// Dense matrix over an exact field. Row-major. All algorithms use the fixed
/// pivot rule "first nonzero entry in column order" so that results are
/// reproducible bit for bit.
template <class F>
class Mat {
  public:
    using Elem = typename F::Elem;

    Mat(F field, std::size_t rows, std::size_t cols)
        : field_(std::move(field)), rows_(rows), cols_(cols), a_(rows * cols, field_.zero()) {}

    static Mat identity(F field, std::size_t n) {
        Mat m(field, n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = m.field_.one();
        return m;
    }

    static Mat from_rows(F field, std::vector<std::vector<Elem>> rows) {
        std::size_t r = rows.size();
        std::size_t c = r ? rows[0].size() : 0;
        Mat m(field, r, c);
        for (std::size_t i = 0; i < r; ++i) {
            if (rows[i].size() != c) throw DimensionMismatch("ragged row list");
            for (std::size_t j = 0; j < c; ++j) m.at(i, j) = std::move(rows[i][j]);
        }
        return m;
    }

    /// Matrix whose columns are the given vectors.
    static Mat from_cols(F field, const std::vector<std::vector<Elem>>& cols) {
        std::size_t c = cols.size();
        std::size_t r = c ? cols[0].size() : 0;
        Mat m(field, r, c);
        for (std::size_t j = 0; j < c; ++j) {
            if (cols[j].size() != r) throw DimensionMismatch("ragged column list");
            for (std::size_t i = 0; i < r; ++i) m.at(i, j) = cols[j][i];
        }
        return m;
    }

    const F& field() const { return field_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Elem& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Elem& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    bool is_zero() const {
        for (const auto& x : a_)
            if (!field_.is_zero(x)) return false;
        return true;
    }

    bool operator==(const Mat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) return false;
        for (std::size_t k = 0; k < a_.size(); ++k)
            if (!field_.eq(a_[k], o.a_[k])) return false;
        return true;
    }

    Mat operator*(const Mat& o) const {
        check_field(o);
        if (cols_ != o.rows_) throw DimensionMismatch("matrix product shape");
        Mat out(field_, rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                if (field_.is_zero(at(i, k))) continue;
                for (std::size_t j = 0; j < o.cols_; ++j)
                    out.at(i, j) = field_.add(out.at(i, j), field_.mul(at(i, k), o.at(k, j)));
            }
        return out;
    }

    std::vector<Elem> operator*(const std::vector<Elem>& v) const {
        if (v.size() != cols_) throw DimensionMismatch("matrix-vector shape");
        std::vector<Elem> out(rows_, field_.zero());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (!field_.is_zero(at(i, j)))
                    out[i] = field_.add(out[i], field_.mul(at(i, j), v[j]));
        return out;
    }

    Mat operator+(const Mat& o) const {
        check_field(o);
        if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix sum shape");
        Mat out(field_, rows_, cols_);
        for (std::size_t k = 0; k < a_.size(); ++k) out.a_[k] = field_.add(a_[k], o.a_[k]);
        return out;
    }

    Mat operator-(const Mat& o) const {
        check_field(o);
        if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix diff shape");
        Mat out(field_, rows_, cols_);
        for (std::size_t k = 0; k < a_.size(); ++k) out.a_[k] = field_.sub(a_[k], o.a_[k]);
        return out;
    }

    Mat scaled(const Elem& c) const {
        Mat out(field_, rows_, cols_);
        for (std::size_t k = 0; k < a_.size(); ++k) out.a_[k] = field_.mul(a_[k], c);
        return out;
    }

    Mat transpose() const {
        Mat out(field_, cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out.at(j, i) = at(i, j);
        return out;
    }

    /// [this | o] side by side.
    Mat hstack(const Mat& o) const {
        check_field(o);
        if (rows_ != o.rows_) throw DimensionMismatch("hstack row count");
        Mat out(field_, rows_, cols_ + o.cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) out.at(i, j) = at(i, j);
            for (std::size_t j = 0; j < o.cols_; ++j) out.at(i, cols_ + j) = o.at(i, j);
        }
        return out;
    }

    Mat vstack(const Mat& o) const {
        check_field(o);
        if (cols_ != o.cols_) throw DimensionMismatch("vstack column count");
        Mat out(field_, rows_ + o.rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out.at(i, j) = at(i, j);
        for (std::size_t i = 0; i < o.rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out.at(rows_ + i, j) = o.at(i, j);
        return out;
    }

    std::vector<Elem> col(std::size_t j) const {
        std::vector<Elem> out(rows_, field_.zero());
        for (std::size_t i = 0; i < rows_; ++i) out[i] = at(i, j);
        return out;
    }

    Mat cols_subset(const std::vector<std::size_t>& idx) const {
        Mat out(field_, rows_, idx.size());
        for (std::size_t j = 0; j < idx.size(); ++j)
            for (std::size_t i = 0; i < rows_; ++i) out.at(i, j) = at(i, idx[j]);
        return out;
    }

    struct Rref {
        Mat reduced;
        std::vector<std::size_t> pivots;  // pivot column per rank row
    };

    /// Reduced row echelon form via Gauss-Jordan.
    Rref rref() const {
        Mat m = *this;
        std::vector<std::size_t> pivots;
        std::size_t r = 0;
        for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
            std::size_t p = r;
            while (p < rows_ && field_.is_zero(m.at(p, c))) ++p;
            if (p == rows_) continue;
            if (p != r)
                for (std::size_t j = 0; j < cols_; ++j) std::swap(m.at(p, j), m.at(r, j));
            Elem piv_inv = field_.inv(m.at(r, c));
            for (std::size_t j = c; j < cols_; ++j) m.at(r, j) = field_.mul(m.at(r, j), piv_inv);
            for (std::size_t i = 0; i < rows_; ++i) {
                if (i == r || field_.is_zero(m.at(i, c))) continue;
                Elem f = m.at(i, c);
                for (std::size_t j = c; j < cols_; ++j)
                    m.at(i, j) = field_.sub(m.at(i, j), field_.mul(f, m.at(r, j)));
            }
            pivots.push_back(c);
            ++r;
        }
        return {std::move(m), std::move(pivots)};
    }

    std::size_t rank() const { return rref().pivots.size(); }

    /// Basis of the right null space, one column per basis vector;
    /// cols() - rank() columns in total, and (*this) * result == 0.
    Mat kernel_basis() const {
        auto [red, pivots] = rref();
        std::vector<bool> is_pivot(cols_, false);
        for (auto c : pivots) is_pivot[c] = true;
        std::vector<std::size_t> free_cols;
        for (std::size_t c = 0; c < cols_; ++c)
            if (!is_pivot[c]) free_cols.push_back(c);
        Mat out(field_, cols_, free_cols.size());
        for (std::size_t k = 0; k < free_cols.size(); ++k) {
            std::size_t fc = free_cols[k];
            out.at(fc, k) = field_.one();
            for (std::size_t r = 0; r < pivots.size(); ++r)
                out.at(pivots[r], k) = field_.neg(red.at(r, fc));
        }
        return out;
    }

    /// Some x with (*this) * x == b, or nullopt when inconsistent. The
    /// returned solution is re-verified by substitution before returning.
    std::optional<std::vector<Elem>> solve(const std::vector<Elem>& b) const {
        if (b.size() != rows_) throw DimensionMismatch("solve rhs length");
        Mat aug(field_, rows_, cols_ + 1);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) aug.at(i, j) = at(i, j);
            aug.at(i, cols_) = b[i];
        }
        auto [red, pivots] = aug.rref();
        if (!pivots.empty() && pivots.back() == cols_) return std::nullopt;
        std::vector<Elem> x(cols_, field_.zero());
        for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = red.at(r, cols_);
        auto check = (*this) * x;
        for (std::size_t i = 0; i < rows_; ++i)
            if (!field_.eq(check[i], b[i])) throw Error("solve verification failed");
        return x;
    }

    /// Solve (*this) * X = B column by column; nullopt if any column is
    /// inconsistent.
    std::optional<Mat> solve_matrix(const Mat& b) const {
        check_field(b);
        if (b.rows_ != rows_) throw DimensionMismatch("solve rhs rows");
        Mat aug = hstack(b);
        auto [red, pivots] = aug.rref();
        for (auto p : pivots)
            if (p >= cols_) return std::nullopt;
        Mat x(field_, cols_, b.cols_);
        for (std::size_t r = 0; r < pivots.size(); ++r)
            for (std::size_t j = 0; j < b.cols_; ++j) x.at(pivots[r], j) = red.at(r, cols_ + j);
        if (!((*this) * x == b)) throw Error("solve_matrix verification failed");
        return x;
    }

    /// Inverse of a square matrix; nullopt when singular.
    std::optional<Mat> inverse() const {
        if (rows_ != cols_) throw DimensionMismatch("inverse of non-square matrix");
        auto x = solve_matrix(identity(field_, rows_));
        return x;
    }

    /// Column indices of a maximal independent subset of columns (the pivot
    /// columns of the RREF); selecting them gives a basis of the column space.
    std::vector<std::size_t> column_basis() const { return rref().pivots; }

    std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < rows_; ++i) {
            out += i == 0 ? "[" : " ";
            out += "[";
            for (std::size_t j = 0; j < cols_; ++j) {
                if (j) out += ", ";
                out += field_.str(at(i, j));
            }
            out += "]";
            out += i + 1 == rows_ ? "]" : "\n";
        }
        if (rows_ == 0) out = "[]";
        return out;
    }

  private:
    void check_field(const Mat& o) const {
        if (field_ != o.field_) throw FieldMismatch("mixed-field matrix operands");
    }

    F field_;
    std::size_t rows_, cols_;
    std::vector<Elem> a_;
};

/// Incrementally row-reduced subspace of F^n. add() reports whether the
/// vector enlarged the span. Deterministic: echelon rows are kept reduced
/// with pivots in column order.
template <class F>
class SpanBuilder {
  public:
    using Elem = typename F::Elem;

    SpanBuilder(F field, std::size_t n) : field_(std::move(field)), n_(n) {}

    std::size_t dim() const { return rows_.size(); }
    std::size_t ambient_dim() const { return n_; }

    /// Reduce v against the current echelon rows; returns the residue.
    std::vector<Elem> reduce(std::vector<Elem> v) const {
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            const Elem& c = v[pivot_[r]];
            if (field_.is_zero(c)) continue;
            Elem f = c;  // rows are monic at their pivot
            for (std::size_t j = 0; j < n_; ++j)
                v[j] = field_.sub(v[j], field_.mul(f, rows_[r][j]));
        }
        return v;
    }

    bool contains(const std::vector<Elem>& v) const {
        auto res = reduce(v);
        for (const auto& x : res)
            if (!field_.is_zero(x)) return false;
        return true;
    }

    bool add(std::vector<Elem> v) {
        if (v.size() != n_) throw DimensionMismatch("span vector length");
        v = reduce(std::move(v));
        std::size_t p = 0;
        while (p < n_ && field_.is_zero(v[p])) ++p;
        if (p == n_) return false;
        Elem inv = field_.inv(v[p]);
        for (std::size_t j = 0; j < n_; ++j) v[j] = field_.mul(v[j], inv);
        // keep earlier rows reduced against the new one
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            Elem f = rows_[r][p];
            if (field_.is_zero(f)) continue;
            for (std::size_t j = 0; j < n_; ++j)
                rows_[r][j] = field_.sub(rows_[r][j], field_.mul(f, v[j]));
        }
        // insert sorted by pivot
        std::size_t pos = 0;
        while (pos < pivot_.size() && pivot_[pos] < p) ++pos;
        rows_.insert(rows_.begin() + pos, std::move(v));
        pivot_.insert(pivot_.begin() + pos, p);
        return true;
    }

    const std::vector<std::vector<Elem>>& basis() const { return rows_; }

    Mat<F> basis_matrix() const {
        Mat<F> m(field_, dim(), n_);
        for (std::size_t i = 0; i < rows_.size(); ++i)
            for (std::size_t j = 0; j < n_; ++j) m.at(i, j) = rows_[i][j];
        return m;
    }

  private:
    F field_;
    std::size_t n_;
    std::vector<std::vector<Elem>> rows_;
    std::vector<std::size_t> pivot_;
};

}  // namespace gored
