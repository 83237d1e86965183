// SPDX-License-Identifier: Apache-2.0
#ifndef POROHOM_TRANSIENT_HPP
#define POROHOM_TRANSIENT_HPP

#include <functional>
#include <vector>

#include "porohom/fem.hpp"
#include "porohom/geometry.hpp"
#include "porohom/sparse.hpp"

namespace porohom {

// Reaction constant, sources and initial datum; f and g depend on (x,y,t)
// only, u0 on (x,y) and must vanish on the exterior boundary.
struct ProblemData {
    double kappa = 1.0;
    double T = 1.0;
    std::function<double(double, double, double)> f;
    std::function<double(double, double, double)> g;
    std::function<double(double, double)> u0;
};

struct TimeGrid {
    double T = 1.0;
    int nsteps = 1;
    double dt() const { return T / nsteps; }
};

struct TransientSolution {
    const Mesh* mesh = nullptr;
    TimeGrid grid;
    int store_stride = 1;
    std::vector<std::vector<double>> values; // values[k] at t = k*stride*dt

    double time_of(std::size_t k) const { return grid.dt() * store_stride * static_cast<double>(k); }
    const std::vector<double>& final_state() const { return values.back(); }
    // Piecewise-linear sample in time between stored steps.
    std::vector<double> sample(double t) const;
};

// Backward-Euler engine shared by the direct and homogenized solvers:
//     [W/dt + K + R] u^{n+1} = W/dt u^n + load(t^{n+1}),
// with homogeneous Dirichlet elimination through `dofs` and warm-started CG.
TransientSolution march_implicit_euler(const Mesh& mesh, const SparseMatrix& time_mass,
                                       const SparseMatrix& stiffness, const SparseMatrix& reaction,
                                       const std::function<void(double, std::vector<double>&)>& load_at,
                                       const std::vector<double>& initial, const DofMap& dofs,
                                       const TimeGrid& grid, double cg_tol);

// Nodal interpolation helpers.
std::vector<double> eval_at_vertices(const Mesh& mesh,
                                     const std::function<double(double, double, double)>& f, double t);
std::vector<double> eval_at_vertices(const Mesh& mesh,
                                     const std::function<double(double, double)>& f);

} // namespace porohom

#endif
