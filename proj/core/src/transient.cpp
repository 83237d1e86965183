// SPDX-License-Identifier: Apache-2.0
#include "porohom/transient.hpp"

#include <cmath>
#include <stdexcept>

namespace porohom {

std::vector<double> TransientSolution::sample(double t) const {
    if (values.empty()) throw std::invalid_argument("TransientSolution::sample: empty solution");
    const double step = grid.dt() * store_stride;
    const double pos = t / step;
    const auto last = static_cast<double>(values.size() - 1);
    if (pos <= 0.0) return values.front();
    if (pos >= last) return values.back();
    const std::size_t k = static_cast<std::size_t>(pos);
    const double w = pos - static_cast<double>(k);
    std::vector<double> out(values[k].size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (1.0 - w) * values[k][i] + w * values[k + 1][i];
    return out;
}

TransientSolution march_implicit_euler(const Mesh& mesh, const SparseMatrix& time_mass,
                                       const SparseMatrix& stiffness, const SparseMatrix& reaction,
                                       const std::function<void(double, std::vector<double>&)>& load_at,
                                       const std::vector<double>& initial, const DofMap& dofs,
                                       const TimeGrid& grid, double cg_tol) {
    if (grid.nsteps < 1) throw std::invalid_argument("march_implicit_euler: nsteps must be >= 1");
    const double dt = grid.dt();
    const SparseMatrix system = SparseMatrix::linear_combination(1.0 / dt, time_mass, 1.0, stiffness,
                                                                 1.0, reaction);
    const std::vector<double> zero(mesh.vertices.size(), 0.0);
    const auto [system_red, rhs0] = apply_constraints(system, zero, dofs);

    TransientSolution sol;
    sol.mesh = &mesh;
    sol.grid = grid;
    sol.store_stride = 1;
    sol.values.reserve(static_cast<std::size_t>(grid.nsteps) + 1);

    std::vector<double> u = initial;
    for (std::size_t v = 0; v < u.size(); ++v)
        if (dofs.is_dirichlet(static_cast<int>(v))) u[v] = 0.0;
    sol.values.push_back(u);

    std::vector<double> guess(static_cast<std::size_t>(dofs.n_free()), 0.0);
    for (int v = 0; v < dofs.n_vertices(); ++v) {
        const int fi = dofs.free_index(v);
        if (fi >= 0) guess[static_cast<std::size_t>(fi)] = u[static_cast<std::size_t>(v)];
    }

    std::vector<double> full_rhs(mesh.vertices.size());
    std::vector<double> load(mesh.vertices.size());
    for (int n = 0; n < grid.nsteps; ++n) {
        const double t_next = dt * static_cast<double>(n + 1);
        time_mass.multiply(u, full_rhs);
        for (double& r : full_rhs) r /= dt;
        load_at(t_next, load);
        for (std::size_t i = 0; i < full_rhs.size(); ++i) full_rhs[i] += load[i];

        const std::vector<double> rhs_red = dofs.reduce(full_rhs);
        CgOptions opt;
        opt.tol = cg_tol;
        opt.initial_guess = &guess;
        CgResult step;
        try {
            step = solve_cg(system_red, rhs_red, opt);
        } catch (const convergence_error& e) {
            throw convergence_error(std::string(e.what()) + " (time step " + std::to_string(n + 1) + ")",
                                    e.residual, n + 1);
        }
        u = dofs.expand(step.x);
        guess = std::move(step.x);
        sol.values.push_back(u);
    }
    return sol;
}

std::vector<double> eval_at_vertices(const Mesh& mesh,
                                     const std::function<double(double, double, double)>& f, double t) {
    std::vector<double> v(mesh.vertices.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(mesh.vertices[i].x, mesh.vertices[i].y, t);
    return v;
}

std::vector<double> eval_at_vertices(const Mesh& mesh,
                                     const std::function<double(double, double)>& f) {
    std::vector<double> v(mesh.vertices.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(mesh.vertices[i].x, mesh.vertices[i].y);
    return v;
}

} // namespace porohom
