// SPDX-License-Identifier: Apache-2.0
////////////////////////////////////////////////////////////////////////////////
// fem.hpp
//
// P1 finite elements on triangle meshes: stiffness, mass and boundary-mass
// assembly in closed form (no quadrature error), constraint condensation for
// Dirichlet and periodic degrees of freedom, and a conjugate-gradient solver
// with an optional zero-mean projection for the singular periodic systems.
////////////////////////////////////////////////////////////////////////////////
#ifndef POROHOM_FEM_HPP
#define POROHOM_FEM_HPP

#include <array>
#include <optional>
#include <vector>

#include "porohom/geometry.hpp"
#include "porohom/sparse.hpp"

namespace porohom {

using Tensor2 = std::array<std::array<double, 2>, 2>;

inline constexpr Tensor2 identity_tensor() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }

// Classifies every vertex as free, Dirichlet-constrained, or periodic slave,
// and maps the free ones onto contiguous indices. Slave chains are resolved
// to their root master; a slave whose root is Dirichlet is rejected.
class DofMap {
public:
    static DofMap build(int n_vertices,
                        const std::vector<std::pair<int, int>>& periodic_pairs,
                        const std::vector<int>& dirichlet_vertices,
                        const std::vector<double>& dirichlet_values = {});
    // Convenience: Dirichlet on every vertex of an edge with the given tag,
    // periodic pairs taken from the mesh.
    static DofMap from_mesh(const Mesh& mesh, std::optional<EdgeTag> dirichlet_tag);

    int n_vertices() const { return static_cast<int>(master_.size()); }
    int n_free() const { return n_free_; }
    bool is_dirichlet(int v) const { return dirichlet_[static_cast<std::size_t>(v)] != 0; }
    bool is_slave(int v) const { return master_[static_cast<std::size_t>(v)] != v; }
    int master_of(int v) const { return master_[static_cast<std::size_t>(v)]; }
    int free_index(int v) const { return free_index_[static_cast<std::size_t>(v)]; }
    double dirichlet_value(int v) const { return dirichlet_value_[static_cast<std::size_t>(v)]; }

    // u_full = P u_free + g  (slaves copy their master, Dirichlet nodes get g)
    std::vector<double> expand(const std::vector<double>& reduced) const;
    // P^T f  (slave rows fold into their master)
    std::vector<double> reduce(const std::vector<double>& full) const;

private:
    std::vector<int> master_;
    std::vector<char> dirichlet_;
    std::vector<double> dirichlet_value_;
    std::vector<int> free_index_;
    int n_free_ = 0;
};

// K_ij = sum_T int_T (A grad phi_j) . grad phi_i, A constant symmetric.
SparseMatrix assemble_stiffness(const Mesh& mesh, const Tensor2& a);
// M_ij = sum_T int_T phi_i phi_j (area/6 diagonal, area/12 off-diagonal).
SparseMatrix assemble_mass(const Mesh& mesh);
// B_ij over edges carrying `tag` (length/3 diagonal, length/6 off-diagonal).
SparseMatrix assemble_boundary_mass(const Mesh& mesh, EdgeTag tag);
// Consistent load M * fvals without forming M.
std::vector<double> assemble_load(const Mesh& mesh, const std::vector<double>& fvals);

// Condenses periodic slaves into masters and eliminates Dirichlet rows and
// columns symmetrically; returns the SPD free-dof system.
std::pair<SparseMatrix, std::vector<double>> apply_constraints(const SparseMatrix& matrix,
                                                               const std::vector<double>& rhs,
                                                               const DofMap& dofs);

struct CgOptions {
    double tol = 1e-10;  // relative residual
    int maxiter = -1;    // default 10n
    // Weighted zero-mean projection for consistent singular systems: each
    // iterate is shifted so sum_i w_i x_i = 0 (kernel = constants).
    const std::vector<double>* zero_mean_weights = nullptr;
    const std::vector<double>* initial_guess = nullptr;
};

struct CgResult {
    std::vector<double> x;
    int iterations = 0;
    double relative_residual = 0.0;
    // 0.5 x^T A x - b^T x after each iteration; monotone for SPD systems.
    std::vector<double> energy_trace;
};

// Plain conjugate gradients; throws convergence_error when maxiter is hit.
CgResult solve_cg(const SparseMatrix& matrix, const std::vector<double>& rhs,
                  const CgOptions& options = {});

} // namespace porohom

#endif
