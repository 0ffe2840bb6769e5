#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace smoothext {

using Vector = std::vector<double>;

struct Triplet {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

/// Symmetric sparse matrix in compressed row form. Both triangles are stored, column
/// indices are sorted per row and unique.
class SparseSymMatrix {
public:
    SparseSymMatrix() = default;

    [[nodiscard]] std::size_t dimension() const noexcept { return dim_; }
    [[nodiscard]] std::size_t nonzeros() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
    [[nodiscard]] std::span<const std::size_t> columns() const noexcept { return columns_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    /// Stored value at (i, j); 0 outside the pattern.
    [[nodiscard]] double entry(std::size_t i, std::size_t j) const;

    friend SparseSymMatrix from_triplets(std::size_t dimension, std::span<const Triplet> triplets);

private:
    std::size_t dim_ = 0;
    std::vector<std::size_t> row_offsets_{0};
    std::vector<std::size_t> columns_;
    std::vector<double> values_;
};

/// Builds the matrix, summing duplicates. If entries appear strictly on one side of the
/// diagonal only, that triangle is mirrored; otherwise the input must already be
/// symmetric to 1e-12 relative.
[[nodiscard]] SparseSymMatrix from_triplets(std::size_t dimension, std::span<const Triplet> triplets);

/// Sparse Cholesky factorization with a fill-reducing ordering. Cheap to copy (shared,
/// immutable); solves may run concurrently.
class SpdFactorization {
public:
    /// Empty placeholder; solving with it throws.
    SpdFactorization() = default;

    [[nodiscard]] std::size_t dimension() const noexcept;
    [[nodiscard]] const std::string& name() const noexcept;

    [[nodiscard]] Vector solve(std::span<const double> b) const;

    struct Impl;

private:
    friend SpdFactorization factorize_spd(const SparseSymMatrix& m, std::string name);
    explicit SpdFactorization(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// Throws NotPositiveDefinite(name) when a pivot is not strictly positive.
[[nodiscard]] SpdFactorization factorize_spd(const SparseSymMatrix& m, std::string name = "matrix");

[[nodiscard]] inline Vector solve(const SpdFactorization& f, std::span<const double> b) { return f.solve(b); }

[[nodiscard]] Vector matvec(const SparseSymMatrix& m, std::span<const double> x);
[[nodiscard]] double dot(std::span<const double> x, std::span<const double> y);
[[nodiscard]] double norm(std::span<const double> x);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace smoothext
