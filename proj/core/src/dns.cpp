// SPDX-License-Identifier: Apache-2.0
#include "porohom/dns.hpp"

#include <cmath>
#include <stdexcept>

namespace porohom {

TransientSolution run_dns(const Mesh& mesh, const ProblemData& data, const TimeGrid& grid,
                          double eps, double cg_tol) {
    if (!(data.kappa > 0.0)) throw std::invalid_argument("run_dns: kappa must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument("run_dns: eps must be positive");
    if (mesh.domain && std::abs(mesh.domain->epsilon - eps) > 1e-12 * eps)
        throw std::invalid_argument("run_dns: mesh was built for a different eps");

    const SparseMatrix mass = assemble_mass(mesh);
    const SparseMatrix bmass = assemble_boundary_mass(mesh, EdgeTag::obstacle);
    const SparseMatrix stiffness = assemble_stiffness(mesh, identity_tensor());
    const SparseMatrix time_mass = SparseMatrix::linear_combination(1.0, mass, eps, bmass);
    const SparseMatrix reaction = SparseMatrix::scaled(data.kappa, mass);

    const DofMap dofs = DofMap::from_mesh(mesh, EdgeTag::exterior_dirichlet);

    auto load_at = [&](double t, std::vector<double>& out) {
        out = assemble_load(mesh, eval_at_vertices(mesh, data.f, t));
        const std::vector<double> bg = bmass.multiply(eval_at_vertices(mesh, data.g, t));
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += eps * bg[i];
    };

    const std::vector<double> u0 = eval_at_vertices(mesh, data.u0);
    return march_implicit_euler(mesh, time_mass, stiffness, reaction, load_at, u0, dofs, grid,
                                cg_tol);
}

std::vector<double> energy_residual(const TransientSolution& sol, const ProblemData& data,
                                    double eps) {
    if (sol.store_stride != 1)
        throw std::invalid_argument("energy_residual: solutions stored with stride > 1 unsupported");
    if (!sol.mesh) throw std::invalid_argument("energy_residual: solution lost its mesh");
    const Mesh& mesh = *sol.mesh;

    const SparseMatrix mass = assemble_mass(mesh);
    const SparseMatrix bmass = assemble_boundary_mass(mesh, EdgeTag::obstacle);
    const SparseMatrix stiffness = assemble_stiffness(mesh, identity_tensor());
    const SparseMatrix time_mass = SparseMatrix::linear_combination(1.0, mass, eps, bmass);

    const double dt = sol.grid.dt();
    std::vector<double> residuals;
    residuals.reserve(sol.values.size() - 1);
    double energy_prev = 0.5 * time_mass.bilinear(sol.values.front(), sol.values.front());
    for (std::size_t n = 1; n < sol.values.size(); ++n) {
        const std::vector<double>& u = sol.values[n];
        const double t = sol.time_of(n);
        const double energy = 0.5 * time_mass.bilinear(u, u);
        const std::vector<double> mu = mass.multiply(u);
        const std::vector<double> bu = bmass.multiply(u);
        const std::vector<double> fv = eval_at_vertices(mesh, data.f, t);
        const std::vector<double> gv = eval_at_vertices(mesh, data.g, t);
        double fmu = 0.0, gbu = 0.0, umu = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            fmu += fv[i] * mu[i];
            gbu += gv[i] * bu[i];
            umu += u[i] * mu[i];
        }
        const double r = (energy - energy_prev) / dt + stiffness.bilinear(u, u) +
                         data.kappa * umu - fmu - eps * gbu;
        residuals.push_back(r);
        energy_prev = energy;
    }
    return residuals;
}

} // namespace porohom
