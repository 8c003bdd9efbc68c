#include "tcsim/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tcsim {

SparseOperator::SparseOperator(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows <= 0 || cols <= 0) {
        throw std::invalid_argument("SparseOperator: dimensions must be positive");
    }
    row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
}

SparseOperator SparseOperator::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
    SparseOperator out(rows, cols);
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            throw std::out_of_range("SparseOperator::from_triplets: index out of range");
        }
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    // Duplicate (row, col) pairs are summed during compression.
    out.col_ind_.reserve(triplets.size());
    out.values_.reserve(triplets.size());
    std::size_t i = 0;
    while (i < triplets.size()) {
        Complex sum = triplets[i].value;
        std::size_t j = i + 1;
        while (j < triplets.size() && triplets[j].row == triplets[i].row &&
               triplets[j].col == triplets[i].col) {
            sum += triplets[j].value;
            ++j;
        }
        out.col_ind_.push_back(triplets[i].col);
        out.values_.push_back(sum);
        ++out.row_ptr_[static_cast<std::size_t>(triplets[i].row) + 1];
        i = j;
    }
    for (std::size_t r = 0; r < static_cast<std::size_t>(rows); ++r) {
        out.row_ptr_[r + 1] += out.row_ptr_[r];
    }
    return out;
}

SparseOperator SparseOperator::identity(int n) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) t.push_back({i, i, Complex(1.0, 0.0)});
    return from_triplets(n, n, std::move(t));
}

Complex SparseOperator::coeff(int row, int col) const {
    auto begin = col_ind_.begin() + row_ptr_[row];
    auto end = col_ind_.begin() + row_ptr_[row + 1];
    auto it = std::lower_bound(begin, end, col);
    if (it != end && *it == col) {
        return values_[static_cast<std::size_t>(it - col_ind_.begin())];
    }
    return Complex(0.0, 0.0);
}

SparseOperator SparseOperator::transpose() const {
    SparseOperator out(cols_, rows_);
    out.col_ind_.resize(values_.size());
    out.values_.resize(values_.size());
    std::vector<std::int64_t> count(static_cast<std::size_t>(cols_) + 1, 0);
    for (int c : col_ind_) ++count[static_cast<std::size_t>(c) + 1];
    for (std::size_t c = 0; c < static_cast<std::size_t>(cols_); ++c) count[c + 1] += count[c];
    out.row_ptr_ = count;
    std::vector<std::int64_t> next = count;
    for (int r = 0; r < rows_; ++r) {
        for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            std::int64_t pos = next[col_ind_[static_cast<std::size_t>(k)]]++;
            out.col_ind_[static_cast<std::size_t>(pos)] = r;
            out.values_[static_cast<std::size_t>(pos)] = values_[static_cast<std::size_t>(k)];
        }
    }
    return out;
}

SparseOperator SparseOperator::conjugate() const {
    SparseOperator out = *this;
    for (auto& v : out.values_) v = std::conj(v);
    return out;
}

SparseOperator SparseOperator::dagger() const { return transpose().conjugate(); }

void SparseOperator::prune(double tol) {
    std::vector<std::int64_t> new_ptr(static_cast<std::size_t>(rows_) + 1, 0);
    std::size_t out = 0;
    for (int r = 0; r < rows_; ++r) {
        for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            if (std::abs(values_[static_cast<std::size_t>(k)]) > tol) {
                col_ind_[out] = col_ind_[static_cast<std::size_t>(k)];
                values_[out] = values_[static_cast<std::size_t>(k)];
                ++out;
            }
        }
        new_ptr[static_cast<std::size_t>(r) + 1] = static_cast<std::int64_t>(out);
    }
    col_ind_.resize(out);
    values_.resize(out);
    row_ptr_ = std::move(new_ptr);
}

void SparseOperator::apply(std::span<const Complex> x, std::span<Complex> y) const {
    if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_) {
        throw std::invalid_argument("SparseOperator::apply: size mismatch");
    }
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows_; ++r) {
        Complex acc(0.0, 0.0);
        for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            acc += values_[static_cast<std::size_t>(k)] * x[col_ind_[static_cast<std::size_t>(k)]];
        }
        y[r] = acc;
    }
}

void SparseOperator::apply_serial(std::span<const Complex> x, std::span<Complex> y) const {
    if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_) {
        throw std::invalid_argument("SparseOperator::apply_serial: size mismatch");
    }
    for (int r = 0; r < rows_; ++r) {
        Complex acc(0.0, 0.0);
        for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            acc += values_[static_cast<std::size_t>(k)] * x[col_ind_[static_cast<std::size_t>(k)]];
        }
        y[r] = acc;
    }
}

std::vector<Complex> SparseOperator::operator*(std::span<const Complex> x) const {
    std::vector<Complex> y(static_cast<std::size_t>(rows_));
    apply(x, y);
    return y;
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
    if (a.cols_ != b.rows_) {
        throw std::invalid_argument("SparseOperator product: inner dimension mismatch");
    }
    SparseOperator out(a.rows_, b.cols_);
    // Row-wise gather with a dense accumulator over b's columns.
    std::vector<Complex> acc(static_cast<std::size_t>(b.cols_), Complex(0.0, 0.0));
    std::vector<int> marker(static_cast<std::size_t>(b.cols_), -1);
    std::vector<int> active;
    for (int r = 0; r < a.rows_; ++r) {
        active.clear();
        for (std::int64_t ka = a.row_ptr_[r]; ka < a.row_ptr_[r + 1]; ++ka) {
            const int mid = a.col_ind_[static_cast<std::size_t>(ka)];
            const Complex va = a.values_[static_cast<std::size_t>(ka)];
            for (std::int64_t kb = b.row_ptr_[mid]; kb < b.row_ptr_[mid + 1]; ++kb) {
                const int c = b.col_ind_[static_cast<std::size_t>(kb)];
                if (marker[c] != r) {
                    marker[c] = r;
                    acc[c] = Complex(0.0, 0.0);
                    active.push_back(c);
                }
                acc[c] += va * b.values_[static_cast<std::size_t>(kb)];
            }
        }
        std::sort(active.begin(), active.end());
        for (int c : active) {
            out.col_ind_.push_back(c);
            out.values_.push_back(acc[c]);
        }
        out.row_ptr_[static_cast<std::size_t>(r) + 1] = static_cast<std::int64_t>(out.col_ind_.size());
    }
    return out;
}

namespace {

SparseOperator add_scaled(const SparseOperator& a, const SparseOperator& b, Complex beta) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("SparseOperator sum: dimension mismatch");
    }
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(a.nnz() + b.nnz()));
    for (int r = 0; r < a.rows(); ++r) {
        for (std::int64_t k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) {
            t.push_back({r, a.col_ind()[static_cast<std::size_t>(k)], a.values()[static_cast<std::size_t>(k)]});
        }
        for (std::int64_t k = b.row_ptr()[r]; k < b.row_ptr()[r + 1]; ++k) {
            t.push_back({r, b.col_ind()[static_cast<std::size_t>(k)],
                         beta * b.values()[static_cast<std::size_t>(k)]});
        }
    }
    return SparseOperator::from_triplets(a.rows(), a.cols(), std::move(t));
}

}  // namespace

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
    return add_scaled(a, b, Complex(1.0, 0.0));
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
    return add_scaled(a, b, Complex(-1.0, 0.0));
}

SparseOperator operator*(Complex scale, const SparseOperator& a) {
    SparseOperator out = a;
    for (auto& v : out.values_) v *= scale;
    return out;
}

double SparseOperator::norm_inf() const {
    double best = 0.0;
    for (int r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            s += std::abs(values_[static_cast<std::size_t>(k)]);
        }
        best = std::max(best, s);
    }
    return best;
}

double SparseOperator::max_abs() const {
    double best = 0.0;
    for (const auto& v : values_) best = std::max(best, std::abs(v));
    return best;
}

SparseOperator kron(const SparseOperator& a, const SparseOperator& b) {
    SparseOperator out(a.rows() * b.rows(), a.cols() * b.cols());
    std::vector<std::int64_t> ptr(static_cast<std::size_t>(out.rows()) + 1, 0);
    std::vector<int> cols;
    std::vector<Complex> vals;
    cols.reserve(static_cast<std::size_t>(a.nnz() * b.nnz()));
    vals.reserve(static_cast<std::size_t>(a.nnz() * b.nnz()));
    for (int ra = 0; ra < a.rows(); ++ra) {
        for (int rb = 0; rb < b.rows(); ++rb) {
            for (std::int64_t ka = a.row_ptr()[ra]; ka < a.row_ptr()[ra + 1]; ++ka) {
                const Complex va = a.values()[static_cast<std::size_t>(ka)];
                const int ca = a.col_ind()[static_cast<std::size_t>(ka)];
                for (std::int64_t kb = b.row_ptr()[rb]; kb < b.row_ptr()[rb + 1]; ++kb) {
                    cols.push_back(ca * b.cols() + b.col_ind()[static_cast<std::size_t>(kb)]);
                    vals.push_back(va * b.values()[static_cast<std::size_t>(kb)]);
                }
            }
            ptr[static_cast<std::size_t>(ra) * b.rows() + rb + 1] = static_cast<std::int64_t>(cols.size());
        }
    }
    // Entries of each row are already column-sorted and unique because both
    // factors are; install the arrays directly.
    out.row_ptr_ = std::move(ptr);
    out.col_ind_ = std::move(cols);
    out.values_ = std::move(vals);
    return out;
}

}  // namespace tcsim
