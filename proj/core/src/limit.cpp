// SPDX-License-Identifier: Apache-2.0
#include "porohom/limit.hpp"

#include <stdexcept>

namespace porohom {

TransientSolution run_limit(const LimitProblem& problem, double cg_tol) {
    if (!problem.mesh) throw std::invalid_argument("run_limit: missing mesh");
    if (!(problem.data.kappa > 0.0)) throw std::invalid_argument("run_limit: kappa must be positive");
    if (!(problem.tensor.min_eigenvalue() > 0.0))
        throw std::invalid_argument("run_limit: effective tensor is not positive-definite");
    const Mesh& mesh = *problem.mesh;
    const double theta = problem.tensor.theta;
    const double sigma = problem.tensor.sigma;

    const SparseMatrix mass = assemble_mass(mesh);
    const SparseMatrix stiffness = assemble_stiffness(mesh, problem.tensor.q);
    const SparseMatrix time_mass = SparseMatrix::scaled(theta + sigma, mass);
    const SparseMatrix reaction = SparseMatrix::scaled(theta * problem.data.kappa, mass);

    const DofMap dofs = DofMap::from_mesh(mesh, EdgeTag::exterior_dirichlet);

    const ProblemData& data = problem.data;
    auto load_at = [&, theta, sigma](double t, std::vector<double>& out) {
        std::vector<double> vals(mesh.vertices.size());
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const Vec2 p = mesh.vertices[i];
            vals[i] = theta * data.f(p.x, p.y, t) + sigma * data.g(p.x, p.y, t);
        }
        out = assemble_load(mesh, vals);
    };

    const std::vector<double> u0 = eval_at_vertices(mesh, data.u0);
    return march_implicit_euler(mesh, time_mass, stiffness, reaction, load_at, u0, dofs,
                                problem.grid, cg_tol);
}

} // namespace porohom
