#include "smoothext/linalg.hpp"

#include "smoothext/error.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace smoothext {

double SparseSymMatrix::entry(std::size_t i, std::size_t j) const {
    if (i >= dim_ || j >= dim_) {
        throw InvalidArgument(fmt::format("entry ({}, {}) out of range for dimension {}", i, j, dim_));
    }
    const auto first = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
    const auto last = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) {
        return 0.0;
    }
    return values_[static_cast<std::size_t>(it - columns_.begin())];
}

SparseSymMatrix from_triplets(std::size_t dimension, std::span<const Triplet> triplets) {
    if (dimension == 0) {
        throw InvalidArgument("from_triplets: dimension must be positive");
    }
    bool has_lower = false;
    bool has_upper = false;
    for (const auto& t : triplets) {
        if (t.row >= dimension || t.col >= dimension) {
            throw InvalidArgument(
                fmt::format("from_triplets: index ({}, {}) out of range for dimension {}", t.row, t.col, dimension));
        }
        has_lower = has_lower || t.row > t.col;
        has_upper = has_upper || t.row < t.col;
    }
    const bool mirror = has_lower != has_upper;

    std::vector<Triplet> all(triplets.begin(), triplets.end());
    if (mirror) {
        all.reserve(all.size() * 2);
        for (const auto& t : triplets) {
            if (t.row != t.col) {
                all.push_back({t.col, t.row, t.value});
            }
        }
    }
    std::sort(all.begin(), all.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseSymMatrix m;
    m.dim_ = dimension;
    m.row_offsets_.assign(dimension + 1, 0);
    for (std::size_t k = 0; k < all.size();) {
        const std::size_t r = all[k].row;
        const std::size_t c = all[k].col;
        double sum = 0.0;
        while (k < all.size() && all[k].row == r && all[k].col == c) {
            sum += all[k].value;
            ++k;
        }
        m.columns_.push_back(c);
        m.values_.push_back(sum);
        ++m.row_offsets_[r + 1];
    }
    for (std::size_t r = 0; r < dimension; ++r) {
        m.row_offsets_[r + 1] += m.row_offsets_[r];
    }

    if (!mirror) {
        double scale = 0.0;
        for (double v : m.values_) scale = std::max(scale, std::abs(v));
        for (std::size_t r = 0; r < dimension; ++r) {
            for (std::size_t k = m.row_offsets_[r]; k < m.row_offsets_[r + 1]; ++k) {
                const std::size_t c = m.columns_[k];
                if (c <= r) continue;
                const double a = m.values_[k];
                const double b = m.entry(c, r);
                if (std::abs(a - b) > 1e-12 * scale) {
                    throw InvalidArgument(fmt::format("from_triplets: asymmetric input at ({}, {}): {} vs {}", r, c, a, b));
                }
            }
        }
    }
    return m;
}

struct SpdFactorization::Impl {
    std::size_t dim = 0;
    std::string name;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> llt;
};

SpdFactorization factorize_spd(const SparseSymMatrix& m, std::string name) {
    const auto n = static_cast<Eigen::Index>(m.dimension());
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(m.nonzeros() / 2 + m.dimension());
    const auto rows = m.row_offsets();
    const auto cols = m.columns();
    const auto vals = m.values();
    for (std::size_t r = 0; r < m.dimension(); ++r) {
        for (std::size_t k = rows[r]; k < rows[r + 1]; ++k) {
            if (cols[k] <= r) {
                entries.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(cols[k]), vals[k]);
            }
        }
    }
    Eigen::SparseMatrix<double> lower(n, n);
    lower.setFromTriplets(entries.begin(), entries.end());

    auto impl = std::make_shared<SpdFactorization::Impl>();
    impl->dim = m.dimension();
    impl->name = std::move(name);
    impl->llt.compute(lower);
    if (impl->llt.info() != Eigen::Success) {
        throw NotPositiveDefinite(impl->name);
    }
    // SimplicialLLT only fails on a negative radicand; a zero pivot slips through as inf/nan.
    const auto& diag = impl->llt.matrixL().nestedExpression().diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        if (!(diag[i] > 0.0) || !std::isfinite(diag[i])) {
            throw NotPositiveDefinite(impl->name);
        }
    }
    return SpdFactorization(std::move(impl));
}

std::size_t SpdFactorization::dimension() const noexcept { return impl_ ? impl_->dim : 0; }

const std::string& SpdFactorization::name() const noexcept {
    static const std::string empty;
    return impl_ ? impl_->name : empty;
}

Vector SpdFactorization::solve(std::span<const double> b) const {
    if (!impl_) {
        throw InvalidArgument("solve: factorization is empty");
    }
    if (b.size() != impl_->dim) {
        throw InvalidArgument(
            fmt::format("solve ({}): right-hand side has length {}, expected {}", impl_->name, b.size(), impl_->dim));
    }
    const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
    const Eigen::VectorXd x = impl_->llt.solve(rhs);
    return Vector(x.data(), x.data() + x.size());
}

Vector matvec(const SparseSymMatrix& m, std::span<const double> x) {
    if (x.size() != m.dimension()) {
        throw InvalidArgument(fmt::format("matvec: vector length {} vs dimension {}", x.size(), m.dimension()));
    }
    Vector y(m.dimension(), 0.0);
    const auto rows = m.row_offsets();
    const auto cols = m.columns();
    const auto vals = m.values();
    for (std::size_t r = 0; r < m.dimension(); ++r) {
        double sum = 0.0;
        for (std::size_t k = rows[r]; k < rows[r + 1]; ++k) {
            sum += vals[k] * x[cols[k]];
        }
        y[r] = sum;
    }
    return y;
}

double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw InvalidArgument(fmt::format("dot: length mismatch {} vs {}", x.size(), y.size()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
    return sum;
}

double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size()) {
        throw InvalidArgument(fmt::format("axpy: length mismatch {} vs {}", x.size(), y.size()));
    }
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace smoothext
