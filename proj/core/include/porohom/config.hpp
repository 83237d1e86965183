// SPDX-License-Identifier: Apache-2.0
#ifndef POROHOM_CONFIG_HPP
#define POROHOM_CONFIG_HPP

#include <string>
#include <vector>

#include "porohom/geometry.hpp"
#include "porohom/transient.hpp"

namespace porohom {

// One convergence experiment: cell geometry, eps sweep, data functions,
// discretization and tolerances. Defaults match a desk-scale study.
struct ExperimentConfig {
    // cell.*
    std::string obstacle = "none"; // none | square | ngon
    double square_side = 0.5;
    int ngon_n = 64;
    double ngon_r = 0.25;
    double clearance = 0.05;
    int cell_m = 64; // cell-problem subdivision

    // domain.* / sweep.*
    double L = 1.0;
    std::vector<double> eps_list = {0.25, 0.125, 0.0625};

    // dns.*
    int dns_m = 8; // background subdivision per cell

    // data.*
    std::string preset = "sinpi";
    double kappa = 1.0;
    double T = 0.5;

    // time.*: dt = dt_ref * eps (eps_linear), dt_ref * eps^2 (eps_quadratic),
    // or T/nsteps (explicit)
    std::string time_rule = "eps_linear";
    double dt_ref = 0.125;
    int nsteps = 0;

    // solver.* / output.*
    double cg_tol = 1e-10;
    std::string output_dir = "out";

    CellGeometry make_cell() const;
    ProblemData make_data() const;
    std::string obstacle_id() const;
    int nsteps_for(double eps) const;
};

// Parses either a flat `key = value` document with dotted keys or a JSON
// object, validates everything, and reports every violation at once.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config_file(const std::string& path);

std::vector<std::string> known_data_presets();

} // namespace porohom

#endif
