#pragma once

#include <array>

#include "stfe/assemble_common.hpp"

namespace stfe {

// Parameters of the streamline-diffusion scheme for constant coefficients
// K = alpha I, beta, gamma.  The stabilization weight on an element of
// diameter h_T is theta * h_T^p * nu with nu = 1/sqrt(|beta|^2 + 1); the
// streamline direction is the space-time vector b = (beta, 1).
struct SdParameters {
  double alpha = 1.0;
  std::array<double, 2> beta{};
  double gamma = 0.0;
  double theta = 1e-2;
  double nu = 1.0;
  int p = 1;
  int r = 1;  // polynomial order of the trial space
};

// p = 1 for piecewise linears or vanishing diffusion, else 2.
int sd_select_p(int r, double alpha);

// Validates the constant-coefficient requirement and fills the derived
// quantities nu and p.
SdParameters make_sd_parameters(const SpaceTimeProblem& problem, double theta, int r);

// Local Petrov-Galerkin matrix
//   B_T(u, v) = int_T [alpha grad_x u . grad_x v + (u_t + beta.grad_x u) v
//                      + gamma u v]
//             + theta h_T^p nu int_T (u_t - alpha lap_x u + beta.grad_x u
//                      + gamma u) (v_t + beta.grad_x v),
// with the Laplacian term present only for r = 2 (it vanishes elementwise for
// linears).  a is (nloc x nloc) row-major with rows indexing the test function.
void local_sd_matrix(const ElementGeometry& geom, const SdParameters& params,
                     double* a);

struct SdOptions {
  bool parallel = false;
};

// Assembles the streamline-diffusion system.  The right-hand side tests the
// source against v + theta h_T^p nu (v_t + beta.grad_x v); no boundary term
// arises at the final time because the form never integrates by parts in t.
AssembledSystem assemble_sd(const SimplexMesh& mesh, const SpaceTimeProblem& problem,
                            const SdParameters& params, const SdOptions& opts = {});

// Scheme energy norm
//   |||u|||^2 = ||u(t_max)||^2 + int_Omega [alpha |grad_x u|^2
//             + h_T^p nu |u_t + beta.grad_x u|^2 + gamma u^2],
// with the first term an L2 norm over the final-time facets.
double energy_norm(const LagrangeSpace& space, const std::vector<double>& u,
                   const SdParameters& params);

}  // namespace stfe
