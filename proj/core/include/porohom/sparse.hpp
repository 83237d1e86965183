// SPDX-License-Identifier: Apache-2.0
#ifndef POROHOM_SPARSE_HPP
#define POROHOM_SPARSE_HPP

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace porohom {

struct Triplet {
    int row;
    int col;
    double value;
};

// Symmetric row-compressed sparse matrix. Duplicate triplets are summed on
// compression, so the stored pattern has no repeated entries; assembly emits
// (i,j) and (j,i) with the same value, which keeps symmetry exact.
class SparseMatrix {
public:
    SparseMatrix() = default;
    static SparseMatrix from_triplets(int n, std::vector<Triplet> triplets);
    static SparseMatrix scaled(double c, const SparseMatrix& a);
    // c0*A0 + c1*A1 (+ c2*A2); all operands must share the dimension.
    static SparseMatrix linear_combination(double c0, const SparseMatrix& a0,
                                           double c1, const SparseMatrix& a1);
    static SparseMatrix linear_combination(double c0, const SparseMatrix& a0,
                                           double c1, const SparseMatrix& a1,
                                           double c2, const SparseMatrix& a2);

    int dim() const { return n_; }
    std::size_t nnz() const { return col_.size(); }

    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(const std::vector<double>& x) const;
    // x^T A y without forming intermediates.
    double bilinear(std::span<const double> x, std::span<const double> y) const;
    double coeff(int i, int j) const;
    std::vector<double> row_sums() const;
    double max_asymmetry() const;

    const std::vector<int>& row_start() const { return row_start_; }
    const std::vector<int>& cols() const { return col_; }
    const std::vector<double>& values() const { return val_; }

private:
    int n_ = 0;
    std::vector<int> row_start_; // size n_+1
    std::vector<int> col_;
    std::vector<double> val_;
};

} // namespace porohom

#endif
