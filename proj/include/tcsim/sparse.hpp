#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace tcsim {

using Complex = std::complex<double>;

struct Triplet {
    int row;
    int col;
    Complex value;
};

/// Compressed sparse row matrix over complex doubles.
///
/// Values are immutable after assembly; every algebraic operation returns a
/// new matrix. The matrix-vector product has two kernels: an OpenMP-parallel
/// one (apply) used everywhere, and a serial reference (apply_serial) kept
/// for testing and benchmarking.
class SparseOperator {
public:
    SparseOperator() = default;
    SparseOperator(int rows, int cols);

    static SparseOperator from_triplets(int rows, int cols, std::vector<Triplet> triplets);
    static SparseOperator identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::int64_t nnz() const { return static_cast<std::int64_t>(values_.size()); }

    Complex coeff(int row, int col) const;

    SparseOperator dagger() const;
    SparseOperator transpose() const;
    SparseOperator conjugate() const;

    /// Drops stored entries with |value| <= tol.
    void prune(double tol = 0.0);

    /// y = A x, OpenMP kernel.
    void apply(std::span<const Complex> x, std::span<Complex> y) const;
    /// y = A x, serial reference kernel.
    void apply_serial(std::span<const Complex> x, std::span<Complex> y) const;

    std::vector<Complex> operator*(std::span<const Complex> x) const;

    friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);
    friend SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
    friend SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
    friend SparseOperator operator*(Complex scale, const SparseOperator& a);
    friend SparseOperator kron(const SparseOperator& a, const SparseOperator& b);

    /// Max absolute row sum.
    double norm_inf() const;
    double max_abs() const;

    const std::vector<std::int64_t>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_ind() const { return col_ind_; }
    const std::vector<Complex>& values() const { return values_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::int64_t> row_ptr_;
    std::vector<int> col_ind_;
    std::vector<Complex> values_;
};

SparseOperator kron(const SparseOperator& a, const SparseOperator& b);

}  // namespace tcsim
