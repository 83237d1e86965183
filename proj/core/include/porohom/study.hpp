// SPDX-License-Identifier: Apache-2.0
#ifndef POROHOM_STUDY_HPP
#define POROHOM_STUDY_HPP

#include <string>
#include <vector>

#include "porohom/cell_problem.hpp"
#include "porohom/config.hpp"

namespace porohom {

struct StepTrace {
    int step;
    double time;
    double l2_norm;
    double energy;
    double residual;
};

struct EpsRecord {
    double eps = 0.0;
    double h = 0.0;
    int dofs = 0;
    double error_l2_final = 0.0;     // relative L2(omega_eps) at t = T
    double error_l2_final_abs = 0.0;
    double error_l2_timeavg = 0.0;   // mean of relative errors at 5 sample times
    double error_l2_timeavg_abs = 0.0;
    double runtime_seconds = 0.0;
    std::vector<StepTrace> trace;
};

struct ConvergenceReport {
    EffectiveTensor tensor;
    std::vector<EpsRecord> records; // sorted by decreasing eps
    bool monotone = false;          // strictly decreasing final error
    bool monotone_applicable = false;
    bool complete = false;
    std::string error;              // first failure when incomplete
};

// Cell solve once, limit solve once on the finest background grid, then a
// DNS run per eps compared against the limit solution on the perforated
// domain. Jobs for distinct eps may run on `threads` workers.
ConvergenceReport run_convergence_study(const ExperimentConfig& config, int threads = 1);

// Per-step diagnostics of a DNS solution (norms, energy, energy residual).
std::vector<StepTrace> dns_trace(const TransientSolution& sol, const ProblemData& data, double eps);

void write_tensor_csv(const std::string& path, const EffectiveTensor& tensor);
// Reads Q, theta, sigma and the mesh descriptor back (no corrector fields).
EffectiveTensor load_tensor_csv(const std::string& path);
void write_errors_csv(const std::string& path, const ConvergenceReport& report);
void write_trace_csv(const std::string& path, const std::vector<StepTrace>& trace);
std::string format_eps(double eps);

} // namespace porohom

#endif
