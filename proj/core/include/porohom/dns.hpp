// SPDX-License-Identifier: Apache-2.0
////////////////////////////////////////////////////////////////////////////////
// dns.hpp
//
// Direct simulation of the reaction-diffusion problem on the perforated
// domain. The dynamic boundary condition on the obstacle boundaries,
//     grad u . n + eps du/dt = eps g,
// enters in weak form as an eps-weighted boundary-mass contribution to the
// time derivative, so one backward-Euler step solves
//     [(M + eps B)/dt + K + kappa M] u^{n+1}
//         = (M + eps B)/dt u^n + M f^{n+1} + eps B g^{n+1},
// with homogeneous Dirichlet values on the exterior boundary.
////////////////////////////////////////////////////////////////////////////////
#ifndef POROHOM_DNS_HPP
#define POROHOM_DNS_HPP

#include "porohom/transient.hpp"

namespace porohom {

TransientSolution run_dns(const Mesh& mesh, const ProblemData& data, const TimeGrid& grid,
                          double eps, double cg_tol = 1e-10);

// Discrete energy-balance audit. With E^n = (1/2) u^nT (M + eps B) u^n the
// per-step residual
//   r^n = (E^{n+1}-E^n)/dt + u^T K u + kappa u^T M u - f^T M u - eps g^T B u
// (all at n+1) measures how far the scheme is from the continuous energy
// equality; for backward Euler it equals minus the numerical dissipation.
std::vector<double> energy_residual(const TransientSolution& sol, const ProblemData& data,
                                    double eps);

} // namespace porohom

#endif
