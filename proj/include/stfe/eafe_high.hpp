#pragma once

#include <iosfwd>

#include "stfe/assemble_common.hpp"
#include "stfe/nedelec.hpp"

namespace stfe {

// Flux-recovery matrix of one element together with the recovery operator
// that produced it: a(i, j) = int_T J_T(xi_j) . grad xi_i, where J_T(xi_j)
// is the polynomial flux recovered from the exponentially weighted moments
// of the nodal shape xi_j.  With q = 0 this reduces to the plain diffusion
// stiffness matrix.
struct HighOrderLocal {
  FluxRecovery recovery;
  DenseMatrix a;  // nloc x nloc
};

HighOrderLocal local_high_order(const NedelecSpace& space,
                                const ElementCoefficients& coeff, int cell = -1);
DenseMatrix local_high_order_matrix(const NedelecSpace& space,
                                    const ElementCoefficients& coeff,
                                    int cell = -1);

struct HighOrderOptions {
  bool parallel = false;
  int source_quad_degree = 6;
  // When set, writes per-element P, Z and local matrices as plain text
  // (row-major, 17 significant digits):
  //   element <cell>
  //   P <rows> <cols>
  //   <one row per line>
  //   Z <rows> <cols> ... A <rows> <cols> ...
  // Dumping runs the element loop serially so records appear in cell order.
  std::ostream* dump = nullptr;
};

// Assembles the flux-recovery system on order-r Lagrange elements: local
// matrices as above, gamma mass, the outflow closure at the final time,
// Dirichlet elimination and the source load, all as in the lowest-order
// scheme.  Supported: r=1 (n=2,3) and r=2 (n=2).  Failures of the per-element
// recovery (out-of-range exponents, ill-conditioned moment systems) carry the
// element id.
AssembledSystem assemble_high_order(const SimplexMesh& mesh,
                                    const SpaceTimeProblem& problem, int r,
                                    const HighOrderOptions& opts = {});

}  // namespace stfe
