// SPDX-License-Identifier: Apache-2.0
#include "porohom/study.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "porohom/dns.hpp"
#include "porohom/interpolate.hpp"
#include "porohom/limit.hpp"

namespace porohom {

namespace {

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> sample_times(double T) {
    return {0.2 * T, 0.4 * T, 0.6 * T, 0.8 * T, T};
}

} // namespace

std::string format_eps(double eps) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", eps);
    return buf;
}

std::vector<StepTrace> dns_trace(const TransientSolution& sol, const ProblemData& data, double eps) {
    const Mesh& mesh = *sol.mesh;
    const SparseMatrix mass = assemble_mass(mesh);
    const SparseMatrix bmass = assemble_boundary_mass(mesh, EdgeTag::obstacle);
    const SparseMatrix time_mass = SparseMatrix::linear_combination(1.0, mass, eps, bmass);
    const std::vector<double> residuals = energy_residual(sol, data, eps);

    std::vector<StepTrace> trace;
    trace.reserve(sol.values.size());
    for (std::size_t k = 0; k < sol.values.size(); ++k) {
        StepTrace row;
        row.step = static_cast<int>(k);
        row.time = sol.time_of(k);
        row.l2_norm = std::sqrt(std::max(0.0, mass.bilinear(sol.values[k], sol.values[k])));
        row.energy = 0.5 * time_mass.bilinear(sol.values[k], sol.values[k]);
        row.residual = k == 0 ? 0.0 : residuals[k - 1];
        trace.push_back(row);
    }
    return trace;
}

ConvergenceReport run_convergence_study(const ExperimentConfig& config, int threads) {
    ConvergenceReport report;

    const CellGeometry cell = config.make_cell();
    const Mesh cell_mesh = build_cell_mesh(cell, config.cell_m);
    report.tensor = compute_effective_tensor(cell_mesh, config.cg_tol);

    // coefficient chain: the reported (theta, sigma) must be exactly the
    // geometric coefficients of the polygon the meshes are cut against
    {
        const auto [theta, sigma] = geometric_coefficients(cell);
        if (std::abs(theta - report.tensor.theta) > 1e-14 ||
            std::abs(sigma - report.tensor.sigma) > 1e-14)
            throw geometry_error("convergence study: coefficient chain broken");
    }
    report.tensor.obstacle_id = config.obstacle_id();

    const ProblemData data = config.make_data();
    const double eps_min = config.eps_list.back();

    const CellGeometry plain_cell{std::nullopt, config.clearance};
    const DomainSpec limit_domain{config.L, eps_min};
    const Mesh limit_mesh = build_perforated_mesh(limit_domain, plain_cell, config.dns_m);
    const TimeGrid limit_grid{config.T, config.nsteps_for(eps_min)};

    LimitProblem limit_problem;
    limit_problem.tensor = report.tensor;
    limit_problem.data = data;
    limit_problem.mesh = &limit_mesh;
    limit_problem.grid = limit_grid;
    const TransientSolution limit_sol = run_limit(limit_problem, config.cg_tol);

    report.records.resize(config.eps_list.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;

    auto job = [&](std::size_t idx) {
        const double eps = config.eps_list[idx];
        const auto start = std::chrono::steady_clock::now();

        const DomainSpec domain{config.L, eps};
        const Mesh dns_mesh = build_perforated_mesh(domain, cell, config.dns_m);
        const TimeGrid grid{config.T, config.nsteps_for(eps)};
        const TransientSolution dns_sol = run_dns(dns_mesh, data, grid, eps, config.cg_tol);

        EpsRecord rec;
        rec.eps = eps;
        rec.h = dns_mesh.h;
        rec.dofs = static_cast<int>(dns_mesh.vertices.size());

        double sum_rel = 0.0, sum_abs = 0.0;
        for (double t : sample_times(config.T)) {
            const auto [abs_err, rel_err] = l2_error_on_perforated(
                dns_mesh, dns_sol.sample(t), limit_mesh, limit_sol.sample(t));
            sum_abs += abs_err;
            sum_rel += rel_err;
            if (t == config.T) {
                rec.error_l2_final = rel_err;
                rec.error_l2_final_abs = abs_err;
            }
        }
        rec.error_l2_timeavg = sum_rel / 5.0;
        rec.error_l2_timeavg_abs = sum_abs / 5.0;
        rec.trace = dns_trace(dns_sol, data, eps);
        rec.runtime_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report.records[idx] = std::move(rec);
    };

    std::string first_error;
    auto worker = [&]() {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= config.eps_list.size()) return;
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error.empty()) return;
            }
            try {
                job(idx);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error.empty())
                    first_error = "eps=" + format_eps(config.eps_list[idx]) + ": " + e.what();
            }
        }
    };

    const int nworkers = std::max(1, std::min<int>(threads, static_cast<int>(config.eps_list.size())));
    if (nworkers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nworkers));
        for (int k = 0; k < nworkers; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (!first_error.empty()) {
        report.error = first_error;
        std::vector<EpsRecord> done;
        for (auto& rec : report.records)
            if (rec.dofs > 0) done.push_back(std::move(rec));
        report.records = std::move(done);
        report.complete = false;
        return report;
    }

    report.complete = true;
    report.monotone_applicable = report.records.size() >= 2;
    if (report.monotone_applicable) {
        report.monotone = true;
        for (std::size_t i = 0; i + 1 < report.records.size(); ++i)
            if (!(report.records[i + 1].error_l2_final < report.records[i].error_l2_final))
                report.monotone = false;
    }
    return report;
}

void write_tensor_csv(const std::string& path, const EffectiveTensor& tensor) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "theta,sigma,q11,q12,q21,q22,m,obstacle,cg_iter_w1,cg_iter_w2,cg_res_w1,cg_res_w2\n";
    out << num17(tensor.theta) << ',' << num17(tensor.sigma) << ',' << num17(tensor.q[0][0]) << ','
        << num17(tensor.q[0][1]) << ',' << num17(tensor.q[1][0]) << ',' << num17(tensor.q[1][1])
        << ',' << tensor.subdivision << ",\"" << tensor.obstacle_id << "\","
        << tensor.correctors[0].cg_iterations << ',' << tensor.correctors[1].cg_iterations << ','
        << num17(tensor.correctors[0].cg_residual) << ',' << num17(tensor.correctors[1].cg_residual)
        << '\n';
}

EffectiveTensor load_tensor_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string header, row;
    if (!std::getline(in, header) || !std::getline(in, row))
        throw std::runtime_error("tensor record missing in " + path);
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (char ch : row) {
        if (ch == '"') {
            quoted = !quoted;
        } else if (ch == ',' && !quoted) {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(cur);
    if (fields.size() < 8) throw std::runtime_error("malformed tensor record in " + path);
    EffectiveTensor t;
    t.theta = std::stod(fields[0]);
    t.sigma = std::stod(fields[1]);
    t.q[0][0] = std::stod(fields[2]);
    t.q[0][1] = std::stod(fields[3]);
    t.q[1][0] = std::stod(fields[4]);
    t.q[1][1] = std::stod(fields[5]);
    t.subdivision = std::stoi(fields[6]);
    t.obstacle_id = fields[7];
    return t;
}

void write_errors_csv(const std::string& path, const ConvergenceReport& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "eps,h,dofs,error_l2_final,error_l2_final_abs,error_l2_timeavg,error_l2_timeavg_abs,"
           "runtime_seconds\n";
    for (const EpsRecord& r : report.records)
        out << num17(r.eps) << ',' << num17(r.h) << ',' << r.dofs << ',' << num17(r.error_l2_final)
            << ',' << num17(r.error_l2_final_abs) << ',' << num17(r.error_l2_timeavg) << ','
            << num17(r.error_l2_timeavg_abs) << ',' << num17(r.runtime_seconds) << '\n';
}

void write_trace_csv(const std::string& path, const std::vector<StepTrace>& trace) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "step,time,l2_norm,energy,residual\n";
    for (const StepTrace& row : trace)
        out << row.step << ',' << num17(row.time) << ',' << num17(row.l2_norm) << ','
            << num17(row.energy) << ',' << num17(row.residual) << '\n';
}

} // namespace porohom
