// SPDX-License-Identifier: Apache-2.0
////////////////////////////////////////////////////////////////////////////////
// limit.hpp
//
// Homogenized problem on the unperforated domain:
//     (theta + sigma) du/dt - div(Q grad u) + theta kappa u = theta f + sigma g
// with u = 0 on the exterior boundary, stepped by backward Euler through the
// same engine as the direct simulation.
////////////////////////////////////////////////////////////////////////////////
#ifndef POROHOM_LIMIT_HPP
#define POROHOM_LIMIT_HPP

#include "porohom/cell_problem.hpp"
#include "porohom/transient.hpp"

namespace porohom {

struct LimitProblem {
    EffectiveTensor tensor;
    ProblemData data;
    const Mesh* mesh = nullptr; // unperforated structured mesh on omega
    TimeGrid grid;
};

TransientSolution run_limit(const LimitProblem& problem, double cg_tol = 1e-10);

} // namespace porohom

#endif
