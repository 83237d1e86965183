// SPDX-License-Identifier: Apache-2.0
//
// porohom: effective-tensor computation, direct and homogenized simulation,
// and the eps-convergence study, driven by a key-value or JSON config.
#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "porohom/dns.hpp"
#include "porohom/limit.hpp"
#include "porohom/study.hpp"

namespace fs = std::filesystem;
using namespace porohom;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    int threads = 1;
    long seed = 0; // reserved; nothing numerical depends on it
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("config", args.config_path, "experiment config file")->required();
    cmd->add_option("--out", args.out_dir, "output directory (overrides output.dir)");
    cmd->add_option("--threads", args.threads, "worker threads for the eps sweep")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", args.seed, "reserved");
}

fs::path prepare_out_dir(const ExperimentConfig& config, const CommonArgs& args) {
    const fs::path dir = args.out_dir.empty() ? fs::path(config.output_dir) : fs::path(args.out_dir);
    fs::create_directories(dir);
    return dir;
}

void print_tensor(const EffectiveTensor& t) {
    std::printf("theta  = %.12g\nsigma  = %.12g\n", t.theta, t.sigma);
    std::printf("Q      = [[%.12g, %.12g], [%.12g, %.12g]]\n", t.q[0][0], t.q[0][1], t.q[1][0],
                t.q[1][1]);
    std::printf("m      = %d  obstacle = %s\n", t.subdivision, t.obstacle_id.c_str());
    std::printf("cg     = %d/%d iterations, residuals %.3g/%.3g\n",
                t.correctors[0].cg_iterations, t.correctors[1].cg_iterations,
                t.correctors[0].cg_residual, t.correctors[1].cg_residual);
}

int run_cell(const CommonArgs& args) {
    const ExperimentConfig config = load_config_file(args.config_path);
    const Mesh mesh = build_cell_mesh(config.make_cell(), config.cell_m);
    EffectiveTensor tensor = compute_effective_tensor(mesh, config.cg_tol);
    tensor.obstacle_id = config.obstacle_id();
    print_tensor(tensor);
    const fs::path dir = prepare_out_dir(config, args);
    write_tensor_csv((dir / "tensor.csv").string(), tensor);
    std::printf("wrote %s\n", (dir / "tensor.csv").c_str());
    return 0;
}

// per-run overrides of the config values, shared by dns and limit
struct RunOverrides {
    int m = 0;
    double dt = 0.0;
    double T = 0.0;
    double kappa = 0.0;
    std::string preset;
    std::string trace_path;

    void add(CLI::App* cmd) {
        cmd->add_option("--m", m, "background subdivision per cell (overrides dns.m)");
        cmd->add_option("--dt", dt, "time step (overrides the time rule)");
        cmd->add_option("--T", T, "final time (overrides data.T)");
        cmd->add_option("--kappa", kappa, "reaction constant (overrides data.kappa)");
        cmd->add_option("--preset", preset, "data preset id (overrides data.preset)");
        cmd->add_option("--trace", trace_path, "output CSV path (overrides the default name)");
    }
    ExperimentConfig apply(ExperimentConfig config) const {
        if (m > 0) config.dns_m = m;
        if (T > 0.0) config.T = T;
        if (kappa > 0.0) config.kappa = kappa;
        if (!preset.empty()) config.preset = preset;
        if (dt > 0.0) {
            config.time_rule = "explicit";
            config.nsteps = std::max(1, static_cast<int>(std::lround(config.T / dt)));
        }
        config.make_data(); // rejects unknown presets
        return config;
    }
};

int run_dns_cmd(const CommonArgs& args, const RunOverrides& overrides, double eps) {
    const ExperimentConfig config = overrides.apply(load_config_file(args.config_path));
    const DomainSpec domain{config.L, eps};
    domain.cells_per_side(); // validates L/eps
    const Mesh mesh = build_perforated_mesh(domain, config.make_cell(), config.dns_m);
    const ProblemData data = config.make_data();
    const TimeGrid grid{config.T, config.nsteps_for(eps)};
    std::printf("dns: eps=%s  dofs=%zu  h=%.4g  nsteps=%d\n", format_eps(eps).c_str(),
                mesh.vertices.size(), mesh.h, grid.nsteps);
    const TransientSolution sol = run_dns(mesh, data, grid, eps, config.cg_tol);
    const std::vector<StepTrace> trace = dns_trace(sol, data, eps);
    const fs::path dir = prepare_out_dir(config, args);
    const fs::path path = overrides.trace_path.empty()
                              ? dir / ("trace_eps_" + format_eps(eps) + ".csv")
                              : fs::path(overrides.trace_path);
    write_trace_csv(path.string(), trace);
    std::printf("final l2 norm = %.12g\nwrote %s\n", trace.back().l2_norm, path.c_str());
    return 0;
}

int run_limit_cmd(const CommonArgs& args, const std::string& tensor_path) {
    const ExperimentConfig config = load_config_file(args.config_path);
    EffectiveTensor tensor;
    if (!tensor_path.empty()) {
        tensor = load_tensor_csv(tensor_path);
        std::printf("loaded tensor from %s\n", tensor_path.c_str());
    } else {
        const Mesh cell_mesh = build_cell_mesh(config.make_cell(), config.cell_m);
        tensor = compute_effective_tensor(cell_mesh, config.cg_tol);
        tensor.obstacle_id = config.obstacle_id();
    }
    print_tensor(tensor);

    const double eps_min = config.eps_list.back();
    const Mesh mesh = build_perforated_mesh(
        DomainSpec{config.L, eps_min}, CellGeometry{std::nullopt, config.clearance}, config.dns_m);
    LimitProblem problem;
    problem.tensor = tensor;
    problem.data = config.make_data();
    problem.mesh = &mesh;
    problem.grid = TimeGrid{config.T, config.nsteps_for(eps_min)};
    const TransientSolution sol = run_limit(problem, config.cg_tol);

    const SparseMatrix mass = assemble_mass(mesh);
    std::vector<StepTrace> trace;
    for (std::size_t k = 0; k < sol.values.size(); ++k) {
        StepTrace row;
        row.step = static_cast<int>(k);
        row.time = sol.time_of(k);
        row.l2_norm = std::sqrt(std::max(0.0, mass.bilinear(sol.values[k], sol.values[k])));
        row.energy =
            0.5 * (tensor.theta + tensor.sigma) * mass.bilinear(sol.values[k], sol.values[k]);
        row.residual = 0.0;
        trace.push_back(row);
    }
    const fs::path dir = prepare_out_dir(config, args);
    write_trace_csv((dir / "limit_trace.csv").string(), trace);
    std::printf("final l2 norm = %.12g\nwrote %s\n", trace.back().l2_norm,
                (dir / "limit_trace.csv").c_str());
    return 0;
}

int run_converge(const CommonArgs& args) {
    const ExperimentConfig config = load_config_file(args.config_path);
    const ConvergenceReport report = run_convergence_study(config, args.threads);
    const fs::path dir = prepare_out_dir(config, args);

    write_tensor_csv((dir / "tensor.csv").string(), report.tensor);
    write_errors_csv((dir / "errors.csv").string(), report);
    for (const EpsRecord& rec : report.records)
        write_trace_csv((dir / ("trace_eps_" + format_eps(rec.eps) + ".csv")).string(), rec.trace);

    print_tensor(report.tensor);
    std::printf("%-10s %-10s %-8s %-14s %-14s %-10s\n", "eps", "h", "dofs", "err_final",
                "err_timeavg", "runtime_s");
    for (const EpsRecord& rec : report.records)
        std::printf("%-10s %-10.4g %-8d %-14.6e %-14.6e %-10.3f\n", format_eps(rec.eps).c_str(),
                    rec.h, rec.dofs, rec.error_l2_final, rec.error_l2_timeavg, rec.runtime_seconds);
    if (!report.complete) {
        std::printf("study INCOMPLETE: %s\n", report.error.c_str());
        return 1;
    }
    if (report.monotone_applicable)
        std::printf("monotone decrease: %s\n", report.monotone ? "yes" : "NO");
    else
        std::printf("monotone decrease: not applicable (single eps)\n");
    std::printf("wrote tensor.csv, errors.csv and %zu trace files under %s\n",
                report.records.size(), dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-element homogenization toolkit for reaction-diffusion problems on "
                 "perforated domains"};
    app.require_subcommand(1);

    CommonArgs cell_args, dns_args, limit_args, conv_args;
    double dns_eps = 0.0;
    std::string tensor_path;

    CLI::App* cell_cmd = app.add_subcommand("cell", "solve the periodic cell problems and report "
                                                    "the effective tensor");
    add_common(cell_cmd, cell_args);

    CLI::App* dns_cmd = app.add_subcommand("dns", "direct simulation on the perforated domain");
    add_common(dns_cmd, dns_args);
    dns_cmd->add_option("--eps", dns_eps, "cell size for this run")->required();

    CLI::App* limit_cmd = app.add_subcommand("limit", "solve the homogenized problem");
    add_common(limit_cmd, limit_args);
    limit_cmd->add_option("--tensor", tensor_path, "stored effective-tensor record (tensor.csv)");

    CLI::App* conv_cmd = app.add_subcommand("converge", "full eps-convergence study");
    add_common(conv_cmd, conv_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cell_cmd->parsed()) return run_cell(cell_args);
        if (dns_cmd->parsed()) return run_dns_cmd(dns_args, dns_eps);
        if (limit_cmd->parsed()) return run_limit_cmd(limit_args, tensor_path);
        if (conv_cmd->parsed()) return run_converge(conv_args);
    } catch (const config_error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
