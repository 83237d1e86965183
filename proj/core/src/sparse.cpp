// SPDX-License-Identifier: Apache-2.0
#include "porohom/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace porohom {

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<Triplet> triplets) {
    if (n < 0) throw std::invalid_argument("SparseMatrix: negative dimension");
    for (const auto& t : triplets)
        if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
            throw std::invalid_argument("SparseMatrix: triplet index out of range");

    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseMatrix m;
    m.n_ = n;
    m.row_start_.assign(static_cast<std::size_t>(n) + 1, 0);
    m.col_.reserve(triplets.size());
    m.val_.reserve(triplets.size());

    std::size_t k = 0;
    while (k < triplets.size()) {
        const int r = triplets[k].row;
        const int c = triplets[k].col;
        double v = triplets[k].value;
        ++k;
        while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) {
            v += triplets[k].value;
            ++k;
        }
        m.col_.push_back(c);
        m.val_.push_back(v);
        ++m.row_start_[static_cast<std::size_t>(r) + 1];
    }
    for (int r = 0; r < n; ++r) m.row_start_[r + 1] += m.row_start_[r];
    return m;
}

namespace {

SparseMatrix combine(const std::vector<std::pair<double, const SparseMatrix*>>& terms) {
    const int n = terms.front().second->dim();
    for (const auto& [c, a] : terms)
        if (a->dim() != n) throw std::invalid_argument("linear_combination: dimension mismatch");

    SparseMatrix result;
    std::vector<Triplet> trip;
    std::size_t total = 0;
    for (const auto& [c, a] : terms) total += a->nnz();
    trip.reserve(total);
    for (const auto& [c, a] : terms) {
        const auto& rs = a->row_start();
        const auto& cols = a->cols();
        const auto& vals = a->values();
        for (int r = 0; r < n; ++r)
            for (int k = rs[r]; k < rs[r + 1]; ++k)
                trip.push_back({r, cols[k], c * vals[k]});
    }
    return SparseMatrix::from_triplets(n, std::move(trip));
}

} // namespace

SparseMatrix SparseMatrix::scaled(double c, const SparseMatrix& a) { return combine({{c, &a}}); }

SparseMatrix SparseMatrix::linear_combination(double c0, const SparseMatrix& a0,
                                              double c1, const SparseMatrix& a1) {
    return combine({{c0, &a0}, {c1, &a1}});
}

SparseMatrix SparseMatrix::linear_combination(double c0, const SparseMatrix& a0,
                                              double c1, const SparseMatrix& a1,
                                              double c2, const SparseMatrix& a2) {
    return combine({{c0, &a0}, {c1, &a1}, {c2, &a2}});
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (static_cast<int>(x.size()) != n_ || static_cast<int>(y.size()) != n_)
        throw std::invalid_argument("SparseMatrix::multiply: size mismatch");
    for (int r = 0; r < n_; ++r) {
        double s = 0.0;
        for (int k = row_start_[r]; k < row_start_[r + 1]; ++k) s += val_[k] * x[col_[k]];
        y[r] = s;
    }
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
    std::vector<double> y(static_cast<std::size_t>(n_));
    multiply(x, y);
    return y;
}

double SparseMatrix::bilinear(std::span<const double> x, std::span<const double> y) const {
    if (static_cast<int>(x.size()) != n_ || static_cast<int>(y.size()) != n_)
        throw std::invalid_argument("SparseMatrix::bilinear: size mismatch");
    double s = 0.0;
    for (int r = 0; r < n_; ++r) {
        double row = 0.0;
        for (int k = row_start_[r]; k < row_start_[r + 1]; ++k) row += val_[k] * y[col_[k]];
        s += x[r] * row;
    }
    return s;
}

double SparseMatrix::coeff(int i, int j) const {
    if (i < 0 || i >= n_ || j < 0 || j >= n_)
        throw std::invalid_argument("SparseMatrix::coeff: index out of range");
    for (int k = row_start_[i]; k < row_start_[i + 1]; ++k)
        if (col_[k] == j) return val_[k];
    return 0.0;
}

std::vector<double> SparseMatrix::row_sums() const {
    std::vector<double> s(static_cast<std::size_t>(n_), 0.0);
    for (int r = 0; r < n_; ++r)
        for (int k = row_start_[r]; k < row_start_[r + 1]; ++k) s[r] += val_[k];
    return s;
}

double SparseMatrix::max_asymmetry() const {
    double worst = 0.0;
    for (int r = 0; r < n_; ++r)
        for (int k = row_start_[r]; k < row_start_[r + 1]; ++k)
            worst = std::max(worst, std::abs(val_[k] - coeff(col_[k], r)));
    return worst;
}

} // namespace porohom
