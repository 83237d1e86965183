// SPDX-License-Identifier: Apache-2.0
#include "porohom/fem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace porohom {

DofMap DofMap::build(int n_vertices, const std::vector<std::pair<int, int>>& periodic_pairs,
                     const std::vector<int>& dirichlet_vertices,
                     const std::vector<double>& dirichlet_values) {
    if (!dirichlet_values.empty() && dirichlet_values.size() != dirichlet_vertices.size())
        throw std::invalid_argument("DofMap: dirichlet value list size mismatch");

    DofMap d;
    d.master_.resize(static_cast<std::size_t>(n_vertices));
    for (int v = 0; v < n_vertices; ++v) d.master_[static_cast<std::size_t>(v)] = v;
    d.dirichlet_.assign(static_cast<std::size_t>(n_vertices), 0);
    d.dirichlet_value_.assign(static_cast<std::size_t>(n_vertices), 0.0);

    for (const auto& [slave, master] : periodic_pairs) {
        if (slave < 0 || slave >= n_vertices || master < 0 || master >= n_vertices)
            throw constraint_error("DofMap: periodic pair index out of range");
        if (slave == master) throw constraint_error("DofMap: vertex paired with itself");
        d.master_[static_cast<std::size_t>(slave)] = master;
    }
    // resolve chains (corner classes) to the root master
    for (int v = 0; v < n_vertices; ++v) {
        int root = v;
        int hops = 0;
        while (d.master_[static_cast<std::size_t>(root)] != root) {
            root = d.master_[static_cast<std::size_t>(root)];
            if (++hops > n_vertices) throw constraint_error("DofMap: cyclic periodic pairing");
        }
        d.master_[static_cast<std::size_t>(v)] = root;
    }

    for (std::size_t k = 0; k < dirichlet_vertices.size(); ++k) {
        const int v = dirichlet_vertices[k];
        if (v < 0 || v >= n_vertices) throw constraint_error("DofMap: dirichlet index out of range");
        d.dirichlet_[static_cast<std::size_t>(v)] = 1;
        d.dirichlet_value_[static_cast<std::size_t>(v)] =
            dirichlet_values.empty() ? 0.0 : dirichlet_values[k];
    }
    for (int v = 0; v < n_vertices; ++v) {
        if (d.master_[static_cast<std::size_t>(v)] == v) continue;
        if (d.dirichlet_[static_cast<std::size_t>(v)])
            throw constraint_error("DofMap: vertex is both periodic slave and Dirichlet");
        if (d.dirichlet_[static_cast<std::size_t>(d.master_[static_cast<std::size_t>(v)])])
            throw constraint_error("DofMap: periodic slave mapped to a Dirichlet vertex");
    }

    d.free_index_.assign(static_cast<std::size_t>(n_vertices), -1);
    for (int v = 0; v < n_vertices; ++v)
        if (d.master_[static_cast<std::size_t>(v)] == v && !d.dirichlet_[static_cast<std::size_t>(v)])
            d.free_index_[static_cast<std::size_t>(v)] = d.n_free_++;
    return d;
}

DofMap DofMap::from_mesh(const Mesh& mesh, std::optional<EdgeTag> dirichlet_tag) {
    std::vector<int> dir;
    if (dirichlet_tag) dir = mesh.tagged_vertices(*dirichlet_tag);
    return build(static_cast<int>(mesh.vertices.size()), mesh.periodic_pairs, dir);
}

std::vector<double> DofMap::expand(const std::vector<double>& reduced) const {
    if (static_cast<int>(reduced.size()) != n_free_)
        throw std::invalid_argument("DofMap::expand: size mismatch");
    std::vector<double> full(master_.size());
    for (std::size_t v = 0; v < master_.size(); ++v) {
        const int root = master_[v];
        if (dirichlet_[static_cast<std::size_t>(root)])
            full[v] = dirichlet_value_[static_cast<std::size_t>(root)];
        else
            full[v] = reduced[static_cast<std::size_t>(free_index_[static_cast<std::size_t>(root)])];
    }
    return full;
}

std::vector<double> DofMap::reduce(const std::vector<double>& full) const {
    if (full.size() != master_.size()) throw std::invalid_argument("DofMap::reduce: size mismatch");
    std::vector<double> red(static_cast<std::size_t>(n_free_), 0.0);
    for (std::size_t v = 0; v < master_.size(); ++v) {
        const int fi = free_index_[static_cast<std::size_t>(master_[v])];
        if (fi >= 0) red[static_cast<std::size_t>(fi)] += full[v];
    }
    return red;
}

namespace {

struct P1Gradients {
    std::array<Vec2, 3> grad;
    double area;
};

P1Gradients p1_gradients(const Mesh& mesh, const std::array<int, 3>& t) {
    const Vec2 p0 = mesh.vertices[static_cast<std::size_t>(t[0])];
    const Vec2 p1 = mesh.vertices[static_cast<std::size_t>(t[1])];
    const Vec2 p2 = mesh.vertices[static_cast<std::size_t>(t[2])];
    const double twice_area = cross(p1 - p0, p2 - p0);
    P1Gradients g;
    g.area = 0.5 * twice_area;
    g.grad[0] = (1.0 / twice_area) * perp(p2 - p1);
    g.grad[1] = (1.0 / twice_area) * perp(p0 - p2);
    g.grad[2] = (1.0 / twice_area) * perp(p1 - p0);
    return g;
}

} // namespace

SparseMatrix assemble_stiffness(const Mesh& mesh, const Tensor2& a) {
    const double scale = std::max({std::abs(a[0][0]), std::abs(a[0][1]), std::abs(a[1][0]),
                                   std::abs(a[1][1]), 1e-30});
    if (std::abs(a[0][1] - a[1][0]) > 1e-14 * scale)
        throw std::invalid_argument("assemble_stiffness: tensor must be symmetric");
    if (!(a[0][0] > 0.0 && a[0][0] * a[1][1] - a[0][1] * a[1][0] > 0.0))
        throw std::invalid_argument("assemble_stiffness: tensor must be positive-definite");

    auto apply = [&](Vec2 v) { return Vec2{a[0][0] * v.x + a[0][1] * v.y, a[1][0] * v.x + a[1][1] * v.y}; };

    std::vector<Triplet> trip;
    trip.reserve(mesh.triangles.size() * 9);
    for (const auto& t : mesh.triangles) {
        const P1Gradients g = p1_gradients(mesh, t);
        for (int i = 0; i < 3; ++i) {
            const Vec2 agi = apply(g.grad[static_cast<std::size_t>(i)]);
            trip.push_back({t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(i)],
                            g.area * dot(agi, g.grad[static_cast<std::size_t>(i)])});
            for (int j = i + 1; j < 3; ++j) {
                const double v = g.area * dot(agi, g.grad[static_cast<std::size_t>(j)]);
                trip.push_back({t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(j)], v});
                trip.push_back({t[static_cast<std::size_t>(j)], t[static_cast<std::size_t>(i)], v});
            }
        }
    }
    return SparseMatrix::from_triplets(static_cast<int>(mesh.vertices.size()), std::move(trip));
}

SparseMatrix assemble_mass(const Mesh& mesh) {
    std::vector<Triplet> trip;
    trip.reserve(mesh.triangles.size() * 9);
    for (std::size_t k = 0; k < mesh.triangles.size(); ++k) {
        const auto& t = mesh.triangles[k];
        const double area = mesh.triangle_area(static_cast<int>(k));
        for (int i = 0; i < 3; ++i) {
            trip.push_back({t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(i)], area / 6.0});
            for (int j = i + 1; j < 3; ++j) {
                trip.push_back({t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(j)], area / 12.0});
                trip.push_back({t[static_cast<std::size_t>(j)], t[static_cast<std::size_t>(i)], area / 12.0});
            }
        }
    }
    return SparseMatrix::from_triplets(static_cast<int>(mesh.vertices.size()), std::move(trip));
}

SparseMatrix assemble_boundary_mass(const Mesh& mesh, EdgeTag tag) {
    std::vector<Triplet> trip;
    for (const auto& [e, t] : mesh.edge_tags) {
        if (t != tag) continue;
        const double len = norm(mesh.vertices[static_cast<std::size_t>(e.second)] -
                                mesh.vertices[static_cast<std::size_t>(e.first)]);
        trip.push_back({e.first, e.first, len / 3.0});
        trip.push_back({e.second, e.second, len / 3.0});
        trip.push_back({e.first, e.second, len / 6.0});
        trip.push_back({e.second, e.first, len / 6.0});
    }
    return SparseMatrix::from_triplets(static_cast<int>(mesh.vertices.size()), std::move(trip));
}

std::vector<double> assemble_load(const Mesh& mesh, const std::vector<double>& fvals) {
    if (fvals.size() != mesh.vertices.size())
        throw std::invalid_argument("assemble_load: one value per vertex required");
    std::vector<double> load(fvals.size(), 0.0);
    for (std::size_t k = 0; k < mesh.triangles.size(); ++k) {
        const auto& t = mesh.triangles[k];
        const double a12 = mesh.triangle_area(static_cast<int>(k)) / 12.0;
        const double f0 = fvals[static_cast<std::size_t>(t[0])];
        const double f1 = fvals[static_cast<std::size_t>(t[1])];
        const double f2 = fvals[static_cast<std::size_t>(t[2])];
        load[static_cast<std::size_t>(t[0])] += a12 * (2.0 * f0 + f1 + f2);
        load[static_cast<std::size_t>(t[1])] += a12 * (f0 + 2.0 * f1 + f2);
        load[static_cast<std::size_t>(t[2])] += a12 * (f0 + f1 + 2.0 * f2);
    }
    return load;
}

std::pair<SparseMatrix, std::vector<double>> apply_constraints(const SparseMatrix& matrix,
                                                               const std::vector<double>& rhs,
                                                               const DofMap& dofs) {
    const int n = matrix.dim();
    if (n != dofs.n_vertices() || rhs.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("apply_constraints: size mismatch");

    // b - A g, with g the Dirichlet values
    std::vector<double> g(static_cast<std::size_t>(n), 0.0);
    bool any_dirichlet_value = false;
    for (int v = 0; v < n; ++v)
        if (dofs.is_dirichlet(v) && dofs.dirichlet_value(v) != 0.0) {
            g[static_cast<std::size_t>(v)] = dofs.dirichlet_value(v);
            any_dirichlet_value = true;
        }
    std::vector<double> b = rhs;
    if (any_dirichlet_value) {
        std::vector<double> ag(static_cast<std::size_t>(n));
        matrix.multiply(g, ag);
        for (int v = 0; v < n; ++v) b[static_cast<std::size_t>(v)] -= ag[static_cast<std::size_t>(v)];
    }

    std::vector<Triplet> trip;
    trip.reserve(matrix.nnz());
    const auto& rs = matrix.row_start();
    const auto& cols = matrix.cols();
    const auto& vals = matrix.values();
    for (int r = 0; r < n; ++r) {
        const int fr = dofs.free_index(dofs.master_of(r));
        if (fr < 0) continue;
        for (int k = rs[static_cast<std::size_t>(r)]; k < rs[static_cast<std::size_t>(r) + 1]; ++k) {
            const int fc = dofs.free_index(dofs.master_of(cols[static_cast<std::size_t>(k)]));
            if (fc < 0) continue;
            trip.push_back({fr, fc, vals[static_cast<std::size_t>(k)]});
        }
    }
    std::vector<double> b_red(static_cast<std::size_t>(dofs.n_free()), 0.0);
    for (int v = 0; v < n; ++v) {
        const int fi = dofs.free_index(dofs.master_of(v));
        if (fi >= 0) b_red[static_cast<std::size_t>(fi)] += b[static_cast<std::size_t>(v)];
    }
    return {SparseMatrix::from_triplets(dofs.n_free(), std::move(trip)), std::move(b_red)};
}

CgResult solve_cg(const SparseMatrix& matrix, const std::vector<double>& rhs,
                  const CgOptions& options) {
    const int n = matrix.dim();
    if (rhs.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("solve_cg: size mismatch");
    const int maxiter = options.maxiter > 0 ? options.maxiter : 10 * std::max(n, 1);

    const std::vector<double>* w = options.zero_mean_weights;
    double w_total = 0.0;
    if (w) {
        if (w->size() != static_cast<std::size_t>(n))
            throw std::invalid_argument("solve_cg: projection weight size mismatch");
        for (double wi : *w) w_total += wi;
        if (w_total == 0.0) throw std::invalid_argument("solve_cg: projection weights sum to zero");
    }
    auto project_x = [&](std::vector<double>& x) {
        if (!w) return;
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += (*w)[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        const double shift = s / w_total;
        for (double& xi : x) xi -= shift;
    };
    auto project_r = [&](std::vector<double>& r) {
        // keep the residual in range(A) = {mean zero} for the singular case
        if (!w) return;
        double s = 0.0;
        for (double ri : r) s += ri;
        const double shift = s / n;
        for (double& ri : r) ri -= shift;
    };

    CgResult res;
    res.x.assign(static_cast<std::size_t>(n), 0.0);
    if (options.initial_guess) {
        if (options.initial_guess->size() != static_cast<std::size_t>(n))
            throw std::invalid_argument("solve_cg: initial guess size mismatch");
        res.x = *options.initial_guess;
        project_x(res.x);
    }

    auto dot_v = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };

    const double bnorm = std::sqrt(dot_v(rhs, rhs));
    if (bnorm == 0.0) {
        res.x.assign(static_cast<std::size_t>(n), 0.0);
        return res;
    }

    std::vector<double> r(static_cast<std::size_t>(n));
    matrix.multiply(res.x, r);
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(i)];
    project_r(r);

    std::vector<double> p = r;
    std::vector<double> ap(static_cast<std::size_t>(n));
    double rr = dot_v(r, r);

    auto record_energy = [&]() {
        // f(x) = 0.5 x^T A x - b^T x = -0.5 x^T (b + r)
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            s += res.x[static_cast<std::size_t>(i)] * (rhs[static_cast<std::size_t>(i)] + r[static_cast<std::size_t>(i)]);
        res.energy_trace.push_back(-0.5 * s);
    };

    while (std::sqrt(rr) > options.tol * bnorm) {
        if (res.iterations >= maxiter)
            throw convergence_error("solve_cg: maximum iteration count exceeded",
                                    std::sqrt(rr) / bnorm);
        matrix.multiply(p, ap);
        const double pap = dot_v(p, ap);
        if (!(pap > 0.0))
            throw convergence_error("solve_cg: matrix is not positive-definite on the search space",
                                    std::sqrt(rr) / bnorm);
        const double alpha = rr / pap;
        for (int i = 0; i < n; ++i) res.x[static_cast<std::size_t>(i)] += alpha * p[static_cast<std::size_t>(i)];
        for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] -= alpha * ap[static_cast<std::size_t>(i)];
        project_x(res.x);
        project_r(r);
        const double rr_new = dot_v(r, r);
        const double beta = rr_new / rr;
        for (int i = 0; i < n; ++i)
            p[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)] + beta * p[static_cast<std::size_t>(i)];
        rr = rr_new;
        ++res.iterations;
        record_energy();
    }
    res.relative_residual = std::sqrt(rr) / bnorm;
    return res;
}

} // namespace porohom
