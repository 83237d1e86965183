// SPDX-License-Identifier: Apache-2.0
////////////////////////////////////////////////////////////////////////////////
// cell_problem.hpp
//
// The two periodic cell problems on the perforated unit cell,
//     -div(e_i + grad w_i) = 0 in Y'_f,  (e_i + grad w_i).n = 0 on dF',
//     w_i periodic with weighted mean zero,
// and the homogenized matrix
//     q_ij = int_{Y'_f} (e_i + grad w_i) . (e_j + grad w_j).
// The energy (long) form above is what gets reported; the flux (short) form
// int (e_i + grad w_i) . e_j agrees with it up to solver tolerance through
// Galerkin orthogonality and is evaluated as a consistency check.
////////////////////////////////////////////////////////////////////////////////
#ifndef POROHOM_CELL_PROBLEM_HPP
#define POROHOM_CELL_PROBLEM_HPP

#include <array>
#include <string>
#include <vector>

#include "porohom/fem.hpp"
#include "porohom/geometry.hpp"

namespace porohom {

struct CorrectorField {
    int direction = 1; // 1 or 2
    std::vector<double> values; // one per mesh vertex, slaves carry master values
    int cg_iterations = 0;
    double cg_residual = 0.0;
};

struct EffectiveTensor {
    Tensor2 q{};
    double theta = 1.0;
    double sigma = 0.0;
    std::array<CorrectorField, 2> correctors;
    int subdivision = 0;
    std::string obstacle_id = "none";

    double min_eigenvalue() const;
    double max_offdiagonal_asymmetry() const { return std::abs(q[0][1] - q[1][0]); }
};

// Weak-form load of the direction-i cell problem, b_j = -int e_i . grad phi_j.
// Its entries sum to zero (constants are test functions).
std::vector<double> cell_problem_load(const Mesh& mesh, int direction);

// Solves the direction-i cell problem. The condensed stiffness system is
// singular (kernel = constants); uniqueness comes from the weighted zero-mean
// projection with mass-matrix row sums as weights.
CorrectorField solve_cell_corrector(const Mesh& mesh, int direction, double cg_tol = 1e-10);

// Evaluates Q triangle-wise with exact P1 gradients and cross-checks the
// short form against the long form at 10 * cg_tol * ||Q||_F.
EffectiveTensor homogenized_matrix(const Mesh& mesh, const CorrectorField& w1,
                                   const CorrectorField& w2, double cg_tol = 1e-10);

// Both corrector solves plus the tensor evaluation.
EffectiveTensor compute_effective_tensor(const Mesh& mesh, double cg_tol = 1e-10);

} // namespace porohom

#endif
