// SPDX-License-Identifier: Apache-2.0
#include "porohom/cell_problem.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace porohom {

double EffectiveTensor::min_eigenvalue() const {
    const double tr = q[0][0] + q[1][1];
    const double diff = q[0][0] - q[1][1];
    const double rad = std::sqrt(diff * diff + 4.0 * q[0][1] * q[1][0]);
    return 0.5 * (tr - rad);
}

std::vector<double> cell_problem_load(const Mesh& mesh, int direction) {
    if (direction != 1 && direction != 2)
        throw std::invalid_argument("cell_problem_load: direction must be 1 or 2");
    std::vector<double> b(mesh.vertices.size(), 0.0);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        const Vec2 p0 = mesh.vertices[static_cast<std::size_t>(tr[0])];
        const Vec2 p1 = mesh.vertices[static_cast<std::size_t>(tr[1])];
        const Vec2 p2 = mesh.vertices[static_cast<std::size_t>(tr[2])];
        const double twice_area = cross(p1 - p0, p2 - p0);
        const std::array<Vec2, 3> grad = {perp(p2 - p1), perp(p0 - p2), perp(p1 - p0)};
        for (int v = 0; v < 3; ++v) {
            const Vec2 gv = (1.0 / twice_area) * grad[static_cast<std::size_t>(v)];
            const double comp = direction == 1 ? gv.x : gv.y;
            b[static_cast<std::size_t>(tr[static_cast<std::size_t>(v)])] -= 0.5 * twice_area * comp;
        }
    }
    return b;
}

CorrectorField solve_cell_corrector(const Mesh& mesh, int direction, double cg_tol) {
    if (direction != 1 && direction != 2)
        throw std::invalid_argument("solve_cell_corrector: direction must be 1 or 2");
    if (mesh.periodic_pairs.empty())
        throw constraint_error("solve_cell_corrector: mesh has no periodic pairing");

    const DofMap dofs = DofMap::from_mesh(mesh, std::nullopt);
    const SparseMatrix k = assemble_stiffness(mesh, identity_tensor());
    const std::vector<double> b = cell_problem_load(mesh, direction);

    auto [k_red, b_red] = apply_constraints(k, b, dofs);
    const std::vector<double> w_full = assemble_mass(mesh).row_sums();
    const std::vector<double> w_red = dofs.reduce(w_full);

    CgOptions opt;
    opt.tol = cg_tol;
    opt.zero_mean_weights = &w_red;
    const CgResult sol = solve_cg(k_red, b_red, opt);

    CorrectorField field;
    field.direction = direction;
    field.values = dofs.expand(sol.x);
    field.cg_iterations = sol.iterations;
    field.cg_residual = sol.relative_residual;

    // pin the additive constant: weighted mean zero over the whole cell
    double num = 0.0, den = 0.0;
    for (std::size_t v = 0; v < field.values.size(); ++v) {
        num += w_full[v] * field.values[v];
        den += w_full[v];
    }
    const double shift = num / den;
    for (double& x : field.values) x -= shift;
    return field;
}

EffectiveTensor homogenized_matrix(const Mesh& mesh, const CorrectorField& w1,
                                   const CorrectorField& w2, double cg_tol) {
    if (w1.values.size() != mesh.vertices.size() || w2.values.size() != mesh.vertices.size())
        throw std::invalid_argument("homogenized_matrix: corrector/mesh size mismatch");
    if (w1.direction != 1 || w2.direction != 2)
        throw std::invalid_argument("homogenized_matrix: correctors must be directions 1 and 2");
    if (!mesh.cell)
        throw std::invalid_argument("homogenized_matrix: mesh carries no cell geometry");

    Tensor2 q_long{};
    Tensor2 q_short{};
    const std::array<const std::vector<double>*, 2> w = {&w1.values, &w2.values};
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        const Vec2 p0 = mesh.vertices[static_cast<std::size_t>(tr[0])];
        const Vec2 p1 = mesh.vertices[static_cast<std::size_t>(tr[1])];
        const Vec2 p2 = mesh.vertices[static_cast<std::size_t>(tr[2])];
        const double twice_area = cross(p1 - p0, p2 - p0);
        const double area = 0.5 * twice_area;
        const std::array<Vec2, 3> grad = {(1.0 / twice_area) * perp(p2 - p1),
                                          (1.0 / twice_area) * perp(p0 - p2),
                                          (1.0 / twice_area) * perp(p1 - p0)};
        std::array<Vec2, 2> field;
        for (int i = 0; i < 2; ++i) {
            Vec2 gw{0.0, 0.0};
            for (int v = 0; v < 3; ++v)
                gw = gw + (*w[static_cast<std::size_t>(i)])[static_cast<std::size_t>(
                              tr[static_cast<std::size_t>(v)])] *
                              grad[static_cast<std::size_t>(v)];
            field[static_cast<std::size_t>(i)] =
                i == 0 ? Vec2{1.0 + gw.x, gw.y} : Vec2{gw.x, 1.0 + gw.y};
        }
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                q_long[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                    area * dot(field[static_cast<std::size_t>(i)], field[static_cast<std::size_t>(j)]);
                q_short[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                    area * (j == 0 ? field[static_cast<std::size_t>(i)].x
                                   : field[static_cast<std::size_t>(i)].y);
            }
    }

    double qnorm = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            qnorm += q_long[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                     q_long[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    qnorm = std::sqrt(qnorm);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double gap = std::abs(q_long[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                                        q_short[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
            if (gap > 10.0 * cg_tol * qnorm)
                throw convergence_error(
                    "homogenized_matrix: long and short forms disagree beyond solver tolerance", gap);
        }

    EffectiveTensor tensor;
    tensor.q = q_long;
    const auto [theta, sigma] = geometric_coefficients(*mesh.cell);
    tensor.theta = theta;
    tensor.sigma = sigma;
    tensor.correctors = {w1, w2};
    tensor.subdivision = mesh.subdivision;
    tensor.obstacle_id = mesh.cell->describe();
    return tensor;
}

EffectiveTensor compute_effective_tensor(const Mesh& mesh, double cg_tol) {
    const CorrectorField w1 = solve_cell_corrector(mesh, 1, cg_tol);
    const CorrectorField w2 = solve_cell_corrector(mesh, 2, cg_tol);
    return homogenized_matrix(mesh, w1, w2, cg_tol);
}

} // namespace porohom
