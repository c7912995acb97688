#pragma once

#include "stfe/assemble_common.hpp"
#include "stfe/bernoulli.hpp"

namespace stfe {

// Local exponentially-fitted flux matrix for one simplex with coefficients
// frozen on that element:
//   A[j][i] = d_ji * B(q.(y_i - y_j))        for i != j,
//   A[j][j] = -sum_{i != j} d_ji * B(q.(y_j - y_i)),
// where d_ji = |T| (D grad lambda_i).(grad lambda_j) and B is the Bernoulli
// function.  With q = 0 it reduces to the plain diffusion stiffness matrix,
// and A.1 recovers the convection column -\int_T b.grad lambda_j exactly.
// The result has (n+1)^2 row-major entries; gamma is not included here.
void local_eafe_matrix(const ElementGeometry& geom, const ElementCoefficients& coeff,
                       double* a);

struct EafeOptions {
  bool lump_mass = false;  // lumped gamma-mass keeps the M-matrix sign structure
  bool parallel = false;
  int source_quad_degree = 4;
};

// Assembles the exponentially-fitted system for the full problem: flux
// matrices, gamma mass term, the outflow closure at the final time, Dirichlet
// elimination, and the source load vector.
AssembledSystem assemble_eafe(const SimplexMesh& mesh, const SpaceTimeProblem& problem,
                              const EafeOptions& opts = {});

}  // namespace stfe
